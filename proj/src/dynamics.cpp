// dynamics.cpp — Gillespie stepping with O(log n) event selection.

#include "zrp/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace zrp::dyn {

namespace {
constexpr std::uint64_t kRebuildInterval = 1u << 20;
constexpr std::int64_t kLargeSiteThreshold = 1024;
} // namespace

Simulator::Simulator(const env::OrientedEdgeSet& edges, const measures::JumpRate& g,
                     Configuration init)
    : edges_(&edges), g_(g), config_(std::move(init)) {
    if (static_cast<std::int64_t>(config_.occupancy.size()) != edges.n_vertices) {
        throw ValidationError("Simulator: configuration size does not match graph");
    }
    if (config_.total != config_.recount()) {
        throw ValidationError("Simulator: configuration total out of sync");
    }
    large_ = edges.n_sites > kLargeSiteThreshold;
    rate_.assign(config_.occupancy.size(), 0.0);
    if (large_) {
        tree_cap_ = 1;
        while (tree_cap_ < edges.n_vertices) tree_cap_ <<= 1;
        tree_.assign(static_cast<std::size_t>(tree_cap_ + 1), 0.0);
    }
    rebuild_rates();
}

void Simulator::rebuild_rates() {
    if (config_.total != config_.recount()) {
        throw NumericalError("Simulator: particle total drifted (bookkeeping bug)");
    }
    total_g_ = 0.0;
    for (std::size_t v = 0; v < rate_.size(); ++v) {
        rate_[v] = g_(config_.occupancy[v]);
        total_g_ += rate_[v];
    }
    if (large_) {
        std::fill(tree_.begin(), tree_.end(), 0.0);
        for (std::size_t v = 0; v < rate_.size(); ++v) {
            std::int64_t i = static_cast<std::int64_t>(v) + 1;
            while (i <= tree_cap_) {
                tree_[static_cast<std::size_t>(i)] += rate_[v];
                i += i & (-i);
            }
        }
    }
    events_since_rebuild_ = 0;
}

std::int32_t Simulator::select_vertex(double u) const {
    std::int64_t n = static_cast<std::int64_t>(rate_.size());
    if (large_) {
        std::int64_t pos = 0;
        std::int64_t step = tree_cap_;
        double rest = u;
        while (step > 0) {
            std::int64_t next = pos + step;
            if (next <= tree_cap_ && tree_[static_cast<std::size_t>(next)] <= rest) {
                rest -= tree_[static_cast<std::size_t>(next)];
                pos = next;
            }
            step >>= 1;
        }
        std::int64_t v = std::min(pos, n - 1);
        // guard against landing on a zero-rate slot through rounding
        while (rate_[static_cast<std::size_t>(v)] <= 0.0) {
            v = (v + 1) % n;
        }
        return static_cast<std::int32_t>(v);
    }
    double cum = 0.0;
    for (std::int64_t v = 0; v < n; ++v) {
        cum += rate_[static_cast<std::size_t>(v)];
        if (u < cum) return static_cast<std::int32_t>(v);
    }
    for (std::int64_t v = n - 1; v >= 0; --v) {
        if (rate_[static_cast<std::size_t>(v)] > 0.0) return static_cast<std::int32_t>(v);
    }
    throw NumericalError("select_vertex: no positive rate");
}

void Simulator::update_vertex(std::int32_t v) {
    double fresh = g_(config_.occupancy[static_cast<std::size_t>(v)]);
    double delta = fresh - rate_[static_cast<std::size_t>(v)];
    rate_[static_cast<std::size_t>(v)] = fresh;
    total_g_ += delta;
    if (large_) {
        std::int64_t i = static_cast<std::int64_t>(v) + 1;
        while (i <= tree_cap_) {
            tree_[static_cast<std::size_t>(i)] += delta;
            i += i & (-i);
        }
    }
}

double Simulator::propose_waiting_time(Rng& rng) {
    return rng.exponential(total_rate());
}

StepResult Simulator::apply_event(double dt, Rng& rng) {
    StepResult result;
    result.dt = dt;
    double u = rng.uniform01() * total_g_;
    std::int32_t v = select_vertex(u);
    std::int32_t w = edges_->out[static_cast<std::size_t>(2 * v) +
                                 (rng.uniform01() < 0.5 ? 0 : 1)];
    config_.move_particle(v, w);
    update_vertex(v);
    update_vertex(w);
    clock_.micro_time += dt;
    ++clock_.event_count;
    result.source = v;
    result.target = w;
    if (++events_since_rebuild_ >= kRebuildInterval) rebuild_rates();
    return result;
}

StepResult Simulator::step(Rng& rng) {
    if (total_g_ <= 0.0) {
        StepResult result;
        result.absorbed = true;
        return result;
    }
    return apply_event(propose_waiting_time(rng), rng);
}

SimulateResult simulate_micro(
    Configuration init, const env::OrientedEdgeSet& edges, const measures::JumpRate& g,
    double t_micro, Rng& rng, std::span<const double> snapshot_micro_times,
    const std::function<void(std::size_t, const Configuration&)>& on_snapshot) {
    if (t_micro < 0.0) throw ValidationError("simulate: negative time horizon");
    for (std::size_t i = 0; i < snapshot_micro_times.size(); ++i) {
        if (i > 0 && snapshot_micro_times[i] < snapshot_micro_times[i - 1]) {
            throw ValidationError("simulate: snapshot times must be sorted");
        }
        if (snapshot_micro_times[i] > t_micro) {
            throw ValidationError("simulate: snapshot time beyond the horizon");
        }
    }
    Simulator sim(edges, g, std::move(init));
    std::size_t next_snap = 0;
    bool absorbed = false;
    auto serve_rest = [&] {
        while (next_snap < snapshot_micro_times.size()) {
            if (on_snapshot) on_snapshot(next_snap, sim.config());
            ++next_snap;
        }
    };
    while (true) {
        if (sim.total_rate() <= 0.0) {
            // absorbing state: it persists, so remaining snapshots see it
            absorbed = true;
            serve_rest();
            break;
        }
        if (sim.clock().micro_time >= t_micro) {
            serve_rest();
            break;
        }
        // The state is constant on [micro_time, micro_time + dt); serve every
        // snapshot in that window before applying the event.
        double dt = sim.propose_waiting_time(rng);
        double t_next = sim.clock().micro_time + dt;
        while (next_snap < snapshot_micro_times.size() &&
               snapshot_micro_times[next_snap] <= t_next) {
            if (on_snapshot) on_snapshot(next_snap, sim.config());
            ++next_snap;
        }
        if (t_next >= t_micro) break;
        sim.apply_event(dt, rng);
    }
    SimulateResult out;
    out.final_config = sim.config();
    out.clock = sim.clock();
    if (!absorbed) out.clock.micro_time = t_micro;
    out.absorbed = absorbed;
    return out;
}

SimulateResult simulate(
    Configuration init, const env::OrientedEdgeSet& edges, const measures::JumpRate& g,
    double t_macro, Rng& rng, std::span<const double> snapshot_macro_times,
    const std::function<void(std::size_t, const Configuration&)>& on_snapshot) {
    double n = static_cast<double>(edges.n_sites);
    double scale = n * n;
    std::vector<double> micro_times(snapshot_macro_times.begin(), snapshot_macro_times.end());
    for (double& t : micro_times) t *= scale;
    return simulate_micro(std::move(init), edges, g, t_macro * scale, rng, micro_times,
                          on_snapshot);
}

} // namespace zrp::dyn
