// dynamics.hpp — event-driven simulation of the zero range process. A vertex
// holding k particles fires each of its two outgoing edges at rate g(k);
// macroscopic time t corresponds to generator time t*N^2 (diffusive scale).
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "zrp/configuration.hpp"
#include "zrp/environment.hpp"
#include "zrp/measures.hpp"
#include "zrp/rng.hpp"

namespace zrp::dyn {

struct SimClock {
    double micro_time = 0.0;  // generator-time units; macro = micro / N^2
    std::uint64_t event_count = 0;

    double macro_time(std::int64_t n_sites) const {
        double n = static_cast<double>(n_sites);
        return micro_time / (n * n);
    }
};

struct StepResult {
    bool absorbed = false;  // total rate was zero; no step taken
    double dt = 0.0;
    std::int32_t source = -1;
    std::int32_t target = -1;
};

// One trajectory. Selection uses a flat rate array with a running total for
// small systems and a binary-indexed tree above 1024 sites; rates are
// rebuilt every 2^20 events to cap floating-point drift.
class Simulator {
public:
    Simulator(const env::OrientedEdgeSet& edges, const measures::JumpRate& g,
              Configuration init);

    StepResult step(Rng& rng);

    // Split form of step(): the waiting time is drawn first so callers can
    // observe the pre-event state on [micro_time, micro_time + dt).
    double propose_waiting_time(Rng& rng);
    StepResult apply_event(double dt, Rng& rng);

    // Lambda = 2 * sum_x g(omega_x): every vertex has exactly two out-edges.
    double total_rate() const { return 2.0 * total_g_; }

    const Configuration& config() const { return config_; }
    const SimClock& clock() const { return clock_; }

private:
    void rebuild_rates();
    std::int32_t select_vertex(double u) const;  // u in [0, total_g_)
    void update_vertex(std::int32_t v);

    const env::OrientedEdgeSet* edges_;
    measures::JumpRate g_;
    Configuration config_;
    SimClock clock_;
    std::vector<double> rate_;  // g(omega_v) per vertex
    std::vector<double> tree_;  // Fenwick tree over rate_, used when large_
    std::int64_t tree_cap_ = 0;
    bool large_ = false;
    double total_g_ = 0.0;
    std::uint64_t events_since_rebuild_ = 0;
};

struct SimulateResult {
    Configuration final_config;
    SimClock clock;
    bool absorbed = false;
};

// Runs until generator time t_micro. Snapshot times must be sorted and
// <= t_micro; the observer sees the state exactly at each requested time
// (an absorbed trajectory keeps delivering its frozen state).
SimulateResult simulate_micro(
    Configuration init, const env::OrientedEdgeSet& edges, const measures::JumpRate& g,
    double t_micro, Rng& rng, std::span<const double> snapshot_micro_times = {},
    const std::function<void(std::size_t, const Configuration&)>& on_snapshot = {});

// Same at macroscopic times: runs to t_macro * N^2 with N = site count.
SimulateResult simulate(
    Configuration init, const env::OrientedEdgeSet& edges, const measures::JumpRate& g,
    double t_macro, Rng& rng, std::span<const double> snapshot_macro_times = {},
    const std::function<void(std::size_t, const Configuration&)>& on_snapshot = {});

} // namespace zrp::dyn
