// exact.cpp — state enumeration, generator assembly, uniformization.

#include "zrp/exact.hpp"

#include <algorithm>
#include <cmath>

namespace zrp::dyn {

namespace {

// C(n, k) guarded against overflow past the state-space limit.
double binom_estimate(std::int64_t n, std::int64_t k) {
    double r = 1.0;
    for (std::int64_t i = 1; i <= k; ++i) {
        r *= static_cast<double>(n - k + i) / static_cast<double>(i);
        if (r > 1e15) return r;
    }
    return r;
}

void enumerate_rec(std::int64_t m, std::int64_t pos, std::int64_t rem,
                   std::vector<std::int32_t>& cur, std::vector<std::int32_t>& out) {
    if (pos == m - 1) {
        cur[static_cast<std::size_t>(pos)] = static_cast<std::int32_t>(rem);
        out.insert(out.end(), cur.begin(), cur.end());
        cur[static_cast<std::size_t>(pos)] = 0;
        return;
    }
    for (std::int64_t v = 0; v <= rem; ++v) {
        cur[static_cast<std::size_t>(pos)] = static_cast<std::int32_t>(v);
        enumerate_rec(m, pos + 1, rem - v, cur, out);
    }
    cur[static_cast<std::size_t>(pos)] = 0;
}

} // namespace

std::int64_t ExactModel::binom(std::int64_t n, std::int64_t k) const {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);  // table columns only reach total_particles
    return binom_[static_cast<std::size_t>(n * (total_particles + 1) + k)];
}

std::int64_t ExactModel::index_of(std::span<const std::int32_t> occupancy) const {
    // lexicographic rank: a smaller state first deviates at some position i
    // with value v < sigma_i, leaving rem - v particles for m - i - 1 slots;
    // compositions of r into q slots number C(r + q - 1, q - 1).
    std::int64_t m = n_vertices;
    std::int64_t rem = total_particles;
    std::int64_t rank = 0;
    for (std::int64_t i = 0; i + 1 < m; ++i) {
        std::int64_t si = occupancy[static_cast<std::size_t>(i)];
        for (std::int64_t v = 0; v < si; ++v) {
            rank += binom(rem - v + m - i - 2, m - i - 2);
        }
        rem -= si;
    }
    return rank;
}

ExactModel build_exact_model(const env::Environment& e, const measures::JumpRate& g,
                             std::int64_t total_particles, std::int64_t max_states) {
    if (total_particles < 0) throw ValidationError("build_exact_model: K must be >= 0");
    env::OrientedEdgeSet edges = env::build_edges(e);
    std::int64_t m = edges.n_vertices;
    if (binom_estimate(total_particles + m - 1, total_particles) >
        static_cast<double>(max_states)) {
        throw ValidationError("build_exact_model: state space exceeds the guard of " +
                              std::to_string(max_states) + " states");
    }

    ExactModel model;
    model.n_vertices = m;
    model.total_particles = total_particles;

    std::int64_t kk = total_particles;
    std::int64_t nn = kk + m;
    model.binom_.assign(static_cast<std::size_t>((nn + 1) * (kk + 1)), 0);
    auto bref = [&model, kk](std::int64_t n, std::int64_t k) -> std::int64_t& {
        return model.binom_[static_cast<std::size_t>(n * (kk + 1) + k)];
    };
    for (std::int64_t n = 0; n <= nn; ++n) {
        std::int64_t ktop = std::min(n, kk);
        for (std::int64_t k = 0; k <= ktop; ++k) {
            if (k == 0 || k == n) {
                bref(n, k) = 1;
            } else {
                bref(n, k) = bref(n - 1, k - 1) + bref(n - 1, k);
            }
        }
    }

    std::vector<std::int32_t> cur(static_cast<std::size_t>(m), 0);
    enumerate_rec(m, 0, total_particles, cur, model.states);
    model.n_states = static_cast<std::int64_t>(model.states.size()) / m;

    model.row_ptr.reserve(static_cast<std::size_t>(model.n_states + 1));
    model.row_ptr.push_back(0);
    model.diag.assign(static_cast<std::size_t>(model.n_states), 0.0);
    std::vector<std::int32_t> scratch(static_cast<std::size_t>(m));
    for (std::int64_t i = 0; i < model.n_states; ++i) {
        auto sigma = model.state(i);
        double exit_rate = 0.0;
        for (std::size_t eidx = 0; eidx < edges.source.size(); ++eidx) {
            std::int32_t x = edges.source[eidx];
            std::int32_t y = edges.target[eidx];
            std::int32_t k = sigma[static_cast<std::size_t>(x)];
            if (k <= 0) continue;
            double rate = g(k);
            std::copy(sigma.begin(), sigma.end(), scratch.begin());
            --scratch[static_cast<std::size_t>(x)];
            ++scratch[static_cast<std::size_t>(y)];
            std::int64_t j = model.index_of(scratch);
            model.col.push_back(static_cast<std::int32_t>(j));
            model.val.push_back(rate);
            exit_rate += rate;
        }
        model.diag[static_cast<std::size_t>(i)] = -exit_rate;
        model.row_ptr.push_back(static_cast<std::int64_t>(model.col.size()));
    }
    return model;
}

std::vector<double> canonical_measure(const ExactModel& model, const measures::JumpRate& g) {
    // log g(k)! cached up to the particle total
    std::vector<double> log_gfact(static_cast<std::size_t>(model.total_particles + 1), 0.0);
    for (std::int64_t k = 1; k <= model.total_particles; ++k) {
        log_gfact[static_cast<std::size_t>(k)] =
            log_gfact[static_cast<std::size_t>(k - 1)] + std::log(g(k));
    }
    std::vector<double> logw(static_cast<std::size_t>(model.n_states));
    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < model.n_states; ++i) {
        auto sigma = model.state(i);
        double lw = 0.0;
        for (std::int32_t k : sigma) lw -= log_gfact[static_cast<std::size_t>(k)];
        logw[static_cast<std::size_t>(i)] = lw;
        max_logw = std::max(max_logw, lw);
    }
    double z = 0.0;
    std::vector<double> pi(static_cast<std::size_t>(model.n_states));
    for (std::size_t i = 0; i < pi.size(); ++i) {
        pi[i] = std::exp(logw[i] - max_logw);
        z += pi[i];
    }
    for (double& p : pi) p /= z;
    return pi;
}

double stationarity_residual(const ExactModel& model, std::span<const double> pi) {
    if (static_cast<std::int64_t>(pi.size()) != model.n_states) {
        throw ValidationError("stationarity_residual: pi has the wrong length");
    }
    double mass = 0.0;
    for (double p : pi) mass += p;
    if (std::abs(mass - 1.0) > 1e-9) {
        throw ValidationError("stationarity_residual: pi is not normalized");
    }
    std::vector<double> r(pi.size(), 0.0);
    for (std::int64_t i = 0; i < model.n_states; ++i) {
        double p = pi[static_cast<std::size_t>(i)];
        r[static_cast<std::size_t>(i)] += p * model.diag[static_cast<std::size_t>(i)];
        for (std::int64_t e = model.row_ptr[static_cast<std::size_t>(i)];
             e < model.row_ptr[static_cast<std::size_t>(i + 1)]; ++e) {
            r[static_cast<std::size_t>(model.col[static_cast<std::size_t>(e)])] +=
                p * model.val[static_cast<std::size_t>(e)];
        }
    }
    double worst = 0.0;
    for (double x : r) worst = std::max(worst, std::abs(x));
    return worst;
}

double relative_entropy(std::span<const double> mu, std::span<const double> pi) {
    if (mu.size() != pi.size()) throw ValidationError("relative_entropy: size mismatch");
    double h = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] <= 0.0) continue;
        if (pi[i] <= 0.0) return std::numeric_limits<double>::infinity();
        h += mu[i] * std::log(mu[i] / pi[i]);
    }
    return std::max(h, 0.0);
}

double dirichlet_form(const ExactModel& model, const measures::JumpRate& g,
                      std::span<const double> h) {
    if (static_cast<std::int64_t>(h.size()) != model.n_states) {
        throw ValidationError("dirichlet_form: h has the wrong length");
    }
    for (double v : h) {
        if (v < 0.0) throw ValidationError("dirichlet_form: h must be nonnegative");
    }
    std::vector<double> pi = canonical_measure(model, g);
    double d = 0.0;
    for (std::int64_t i = 0; i < model.n_states; ++i) {
        double sh = std::sqrt(h[static_cast<std::size_t>(i)]);
        double acc = 0.0;
        for (std::int64_t e = model.row_ptr[static_cast<std::size_t>(i)];
             e < model.row_ptr[static_cast<std::size_t>(i + 1)]; ++e) {
            double diff =
                std::sqrt(h[static_cast<std::size_t>(model.col[static_cast<std::size_t>(e)])]) -
                sh;
            acc += model.val[static_cast<std::size_t>(e)] * diff * diff;
        }
        d += 0.5 * pi[static_cast<std::size_t>(i)] * acc;
    }
    return d;
}

std::vector<double> transient_distribution(const ExactModel& model,
                                           std::span<const double> mu0, double t) {
    if (static_cast<std::int64_t>(mu0.size()) != model.n_states) {
        throw ValidationError("transient_distribution: mu0 has the wrong length");
    }
    if (t < 0.0) throw ValidationError("transient_distribution: t must be >= 0");
    double mass = 0.0;
    for (double p : mu0) mass += p;
    if (std::abs(mass - 1.0) > 1e-9) {
        throw ValidationError("transient_distribution: mu0 is not normalized");
    }
    double uni_rate = 0.0;
    for (double d : model.diag) uni_rate = std::max(uni_rate, -d);
    std::vector<double> out(mu0.size(), 0.0);
    if (uni_rate <= 0.0 || t == 0.0) {
        std::copy(mu0.begin(), mu0.end(), out.begin());
        return out;
    }
    double lt = uni_rate * t;
    std::vector<double> nu(mu0.begin(), mu0.end());
    std::vector<double> next(mu0.size(), 0.0);
    double cum = 0.0;
    std::int64_t cap = static_cast<std::int64_t>(lt + 20.0 * std::sqrt(lt) + 200.0);
    for (std::int64_t k = 0; k <= cap; ++k) {
        double logw = -lt + (k == 0 ? 0.0 : static_cast<double>(k) * std::log(lt)) -
                      std::lgamma(static_cast<double>(k) + 1.0);
        double w = std::exp(logw);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * nu[i];
        cum += w;
        if (cum > 1.0 - 1e-14) break;
        // nu <- nu^T (I + Q / uni_rate)
        std::fill(next.begin(), next.end(), 0.0);
        for (std::int64_t i = 0; i < model.n_states; ++i) {
            double p = nu[static_cast<std::size_t>(i)];
            if (p == 0.0) continue;
            next[static_cast<std::size_t>(i)] +=
                p * (1.0 + model.diag[static_cast<std::size_t>(i)] / uni_rate);
            for (std::int64_t e = model.row_ptr[static_cast<std::size_t>(i)];
                 e < model.row_ptr[static_cast<std::size_t>(i + 1)]; ++e) {
                next[static_cast<std::size_t>(model.col[static_cast<std::size_t>(e)])] +=
                    p * model.val[static_cast<std::size_t>(e)] / uni_rate;
            }
        }
        nu.swap(next);
    }
    // fold the truncated tail back in so the result stays a distribution
    for (double& p : out) p /= cum;
    return out;
}

} // namespace zrp::dyn
