// experiments.cpp — pipelines wiring the modules together, replica
// scheduling, and report serialization.

#include "zrp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "zrp/dynamics.hpp"
#include "zrp/exact.hpp"
#include "zrp/rng.hpp"

namespace zrp::cli {

namespace {

std::int64_t thread_cap() {
    if (const char* env_cap = std::getenv("ZRP_THREADS")) {
        char* end = nullptr;
        long parsed = std::strtol(env_cap, &end, 10);
        if (end != env_cap && parsed >= 1) return parsed;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<std::int64_t>(hw);
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// linear interpolation of a periodic grid profile at x in [0,1)
double eval_profile(const pde::DensityProfile& p, double x) {
    double m = static_cast<double>(p.size());
    double u = (x - std::floor(x)) * m;
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= p.size()) i = p.size() - 1;
    double f = u - static_cast<double>(i);
    return p.values[i] * (1.0 - f) + p.values[(i + 1) % p.size()] * f;
}

} // namespace

env::Environment EnvSpec::realize() const {
    if (!file.empty()) return env::load_environment(file);
    return env::generate_environment(n, p, seed);
}

Rho0Spec Rho0Spec::parse(const std::string& expr) {
    Rho0Spec spec;
    auto colon = expr.find(':');
    if (colon == std::string::npos) {
        spec.kind = "const";
        spec.value = std::stod(expr);
        return spec;
    }
    std::string kind = expr.substr(0, colon);
    std::string args = expr.substr(colon + 1);
    if (kind == "const") {
        spec.kind = "const";
        spec.value = std::stod(args);
        return spec;
    }
    if (kind == "sine") {
        auto comma = args.find(',');
        if (comma == std::string::npos) {
            throw ValidationError("rho0: sine needs mean,amplitude");
        }
        spec.kind = "sine";
        spec.mean = std::stod(args.substr(0, comma));
        spec.amplitude = std::stod(args.substr(comma + 1));
        return spec;
    }
    throw ValidationError("rho0: unknown profile kind '" + kind + "'");
}

double Rho0Spec::operator()(double x) const {
    if (kind == "const") return value;
    return mean + amplitude * std::sin(2.0 * std::numbers::pi * x);
}

double Rho0Spec::min_value() const {
    return kind == "const" ? value : mean - std::abs(amplitude);
}

double Rho0Spec::max_value() const {
    return kind == "const" ? value : mean + std::abs(amplitude);
}

std::string Rho0Spec::to_string() const {
    std::ostringstream os;
    os << std::setprecision(17);
    if (kind == "const") {
        os << "const:" << value;
    } else {
        os << "sine:" << mean << ',' << amplitude;
    }
    return os.str();
}

ExperimentConfig ExperimentConfig::from_json(const ordered_json& j) {
    ExperimentConfig c;
    c.experiment = j.value("experiment", c.experiment);
    if (j.contains("env")) {
        const auto& je = j.at("env");
        c.env.n = je.value("n", c.env.n);
        c.env.p = je.value("p", c.env.p);
        c.env.seed = je.value("seed", c.env.seed);
        c.env.file = je.value("file", c.env.file);
    }
    c.g_name = j.value("g", c.g_name);
    if (j.contains("rho0")) c.rho0 = Rho0Spec::parse(j.at("rho0").get<std::string>());
    c.t = j.value("t", c.t);
    if (j.contains("snapshot_times")) {
        c.snapshot_times = j.at("snapshot_times").get<std::vector<double>>();
    }
    c.replicas = j.value("replicas", c.replicas);
    c.block_size = j.value("block_size", c.block_size);
    if (j.contains("l_list")) c.l_list = j.at("l_list").get<std::vector<std::int64_t>>();
    c.out_dir = j.value("out_dir", c.out_dir);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.kappa_override = j.value("kappa_override", c.kappa_override);
    c.pde_grid = j.value("pde_grid", c.pde_grid);
    return c;
}

ordered_json ExperimentConfig::to_json() const {
    ordered_json j;
    j["experiment"] = experiment;
    j["env"] = {{"n", env.n}, {"p", env.p}, {"seed", env.seed}, {"file", env.file}};
    j["g"] = g_name;
    j["rho0"] = rho0.to_string();
    j["t"] = t;
    j["snapshot_times"] = snapshot_times;
    j["replicas"] = replicas;
    j["block_size"] = block_size;
    j["l_list"] = l_list;
    j["out_dir"] = out_dir;
    j["master_seed"] = master_seed;
    j["kappa_override"] = kappa_override;
    j["pde_grid"] = pde_grid;
    return j;
}

void ExperimentConfig::validate() const {
    if (replicas < 1) throw ValidationError("config: replicas must be >= 1");
    if (t < 0.0) throw ValidationError("config: t must be >= 0");
    const auto& table = measures::FugacityTable::shared(g_name);
    if (!(rho0.min_value() > 0.0)) {
        throw ValidationError("config: rho0 must be bounded away from zero (K1 > 0)");
    }
    if (!(rho0.max_value() <= table.rho_max())) {
        throw ValidationError("config: rho0 exceeds the tabulated density range");
    }
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        if (snapshot_times[i] < 0.0 || snapshot_times[i] > t) {
            throw ValidationError("config: snapshot times must lie in [0, t]");
        }
        if (i > 0 && snapshot_times[i] < snapshot_times[i - 1]) {
            throw ValidationError("config: snapshot times must be sorted");
        }
    }
}

void parallel_for_replicas(std::int64_t count,
                           const std::function<void(std::int64_t)>& fn) {
    std::int64_t workers = std::min(thread_cap(), count);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto body = [&] {
        while (true) {
            std::int64_t i = next.fetch_add(1);
            if (i >= count) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

HydroReport run_hydro(const ExperimentConfig& input) {
    ExperimentConfig config = input;
    if (config.snapshot_times.empty()) config.snapshot_times = {config.t};
    config.validate();

    env::Environment e = config.env.realize();
    auto validation = env::validate_environment(e);
    if (!validation.ok()) {
        throw ValidationError("hydro: " + validation.violations.front());
    }
    env::OrientedEdgeSet edges = env::build_edges(e);
    env::TileDecomposition decomp = env::decompose_tiles(e);
    double kappa = config.kappa_override > 0.0 ? config.kappa_override : decomp.kappa_n;
    const auto& table = measures::FugacityTable::shared(config.g_name);
    measures::JumpRate g = table.jump_rate();

    std::int64_t n = e.n;
    std::int64_t block = config.block_size > 0 ? config.block_size
                                               : std::max<std::int64_t>(4, n / 64);
    if (n % block != 0) {
        throw ValidationError("hydro: block size must divide the site count");
    }

    // initial product measure at rho0(j/N)
    std::vector<double> site_density(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        site_density[static_cast<std::size_t>(j)] =
            config.rho0(static_cast<double>(j) / static_cast<double>(n));
    }
    measures::ProfileSampler sampler(table, site_density);

    // reference profiles: exact Fourier decay for the linear family,
    // the validated nonlinear solver otherwise (quenched kappa)
    std::size_t n_snaps = config.snapshot_times.size();
    std::vector<pde::DensityProfile> reference(n_snaps);
    bool linear = config.g_name == "linear";
    if (linear) {
        std::vector<pde::FourierMode> modes;
        double mean = config.rho0.kind == "const" ? config.rho0.value : config.rho0.mean;
        if (config.rho0.kind == "sine" && config.rho0.amplitude != 0.0) {
            modes.push_back({1, 0.0, config.rho0.amplitude});
        }
        for (std::size_t k = 0; k < n_snaps; ++k) {
            reference[k] = pde::exact_linear_solution(table, mean, modes, kappa,
                                                      config.snapshot_times[k],
                                                      config.pde_grid);
        }
    } else {
        pde::PDEConfig pcfg;
        pcfg.kappa = kappa;
        pcfg.grid_size = config.pde_grid;
        pde::DensityProfile state = config.rho0.kind == "const"
            ? pde::constant_profile(config.rho0.value, config.pde_grid)
            : pde::sine_profile(config.rho0.mean, config.rho0.amplitude, config.pde_grid);
        for (std::size_t k = 0; k < n_snaps; ++k) {
            state = pde::solve_pde(state, table, pcfg, config.snapshot_times[k]);
            reference[k] = state;
        }
    }

    // replica sweep
    std::int64_t replicas = config.replicas;
    std::vector<std::vector<Configuration>> snaps(
        n_snaps, std::vector<Configuration>(static_cast<std::size_t>(replicas)));
    std::vector<std::uint8_t> conserved(static_cast<std::size_t>(replicas), 0);
    std::vector<std::uint64_t> events(static_cast<std::size_t>(replicas), 0);
    parallel_for_replicas(replicas, [&](std::int64_t r) {
        Rng rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(r)));
        Configuration init = sampler.sample(rng);
        std::int64_t total0 = init.total;
        auto on_snapshot = [&](std::size_t k, const Configuration& c) {
            snaps[k][static_cast<std::size_t>(r)] = c;
        };
        dyn::SimulateResult res = dyn::simulate(std::move(init), edges, g, config.t, rng,
                                                config.snapshot_times, on_snapshot);
        conserved[static_cast<std::size_t>(r)] =
            res.final_config.recount() == total0 && res.final_config.total == total0;
        events[static_cast<std::size_t>(r)] = res.clock.event_count;
    });

    HydroReport report;
    report.config = config;
    report.env_hash = e.content_hash();
    report.kappa_n = decomp.kappa_n;
    report.t_n = decomp.t_n;
    report.conservation_ok =
        std::all_of(conserved.begin(), conserved.end(), [](std::uint8_t c) { return c != 0; });
    for (std::uint64_t ec : events) report.total_events += ec;
    for (std::size_t k = 0; k < n_snaps; ++k) {
        SnapshotComparison cmp;
        cmp.time = config.snapshot_times[k];
        cmp.profile = analysis::empirical_profile(snaps[k], n, block);
        const pde::DensityProfile& ref = reference[k];
        cmp.l1_error = analysis::l1_distance(
            cmp.profile, [&ref](double x) { return eval_profile(ref, x); });
        double se_sum = 0.0;
        for (double se : cmp.profile.std_error) se_sum += se;
        cmp.half_width = se_sum / static_cast<double>(cmp.profile.std_error.size());
        cmp.reference.resize(cmp.profile.mean.size());
        for (std::size_t b = 0; b < cmp.reference.size(); ++b) {
            cmp.reference[b] = eval_profile(ref, cmp.profile.x(b));
        }
        report.snapshots.push_back(std::move(cmp));
    }
    return report;
}

ordered_json HydroReport::to_json() const {
    ordered_json j;
    j["experiment"] = "hydro";
    j["config"] = config.to_json();
    j["env_hash"] = hash_hex(env_hash);
    j["kappa_n"] = kappa_n;
    j["t_n"] = t_n;
    j["conservation_ok"] = conservation_ok;
    j["total_events"] = total_events;
    j["snapshots"] = ordered_json::array();
    for (const SnapshotComparison& s : snapshots) {
        ordered_json js;
        js["t"] = s.time;
        js["l1_error"] = s.l1_error;
        js["half_width"] = s.half_width;
        js["block_x"] = ordered_json::array();
        js["empirical"] = s.profile.mean;
        js["std_error"] = s.profile.std_error;
        js["reference"] = s.reference;
        for (std::size_t b = 0; b < s.profile.mean.size(); ++b) {
            js["block_x"].push_back(s.profile.x(b));
        }
        j["snapshots"].push_back(std::move(js));
    }
    return j;
}

StationarityReport run_stationarity() {
    StationarityReport report;
    const std::vector<std::string> figure_strings = {"11", "111", "1111", "123", "23"};
    for (const std::string& figs : figure_strings) {
        env::Environment e = env::environment_from_string(figs);
        for (std::int64_t k = 1; k <= 3; ++k) {
            for (const std::string& gname : {std::string("const1"), std::string("linear")}) {
                measures::JumpRate g = measures::jump_rate_by_name(gname);
                dyn::ExactModel model = dyn::build_exact_model(e, g, k);
                std::vector<double> pi = dyn::canonical_measure(model, g);
                double residual = dyn::stationarity_residual(model, pi);
                report.max_residual = std::max(report.max_residual, residual);
                ordered_json jc;
                jc["figures"] = figs;
                jc["K"] = k;
                jc["g"] = gname;
                jc["states"] = model.n_states;
                jc["residual"] = residual;
                report.cases.push_back(std::move(jc));
            }
        }
    }
    // negative control: the unweighted uniform law is not stationary for
    // g = linear once two particles can share a vertex
    {
        env::Environment e = env::environment_from_string("123");
        measures::JumpRate g = measures::linear_rate();
        dyn::ExactModel model = dyn::build_exact_model(e, g, 2);
        std::vector<double> uniform(static_cast<std::size_t>(model.n_states),
                                    1.0 / static_cast<double>(model.n_states));
        report.negative_control_residual = dyn::stationarity_residual(model, uniform);
    }
    return report;
}

ordered_json StationarityReport::to_json() const {
    ordered_json j;
    j["experiment"] = "stationarity";
    j["max_residual"] = max_residual;
    j["negative_control_residual"] = negative_control_residual;
    j["cases"] = cases;
    return j;
}

Prop4Report run_prop4(const ExperimentConfig& input) {
    ExperimentConfig config = input;
    if (config.t <= 0.0) config.t = 0.05;
    config.validate();
    env::Environment e = config.env.realize();
    env::TileDecomposition decomp = env::decompose_tiles(e);
    double kappa = config.kappa_override > 0.0 ? config.kappa_override : decomp.kappa_n;
    const auto& table = measures::FugacityTable::shared(config.g_name);

    // F bound and density range from the solved PDE instance
    pde::PDEConfig pcfg;
    pcfg.kappa = kappa;
    pcfg.grid_size = config.pde_grid;
    pde::DensityProfile state = config.rho0.kind == "const"
        ? pde::constant_profile(config.rho0.value, config.pde_grid)
        : pde::sine_profile(config.rho0.mean, config.rho0.amplitude, config.pde_grid);
    double f_bound = 0.0;
    double rho_lo = state.min_value(), rho_hi = state.max_value();
    const int slices = 4;
    for (int s = 0; s <= slices; ++s) {
        double target = config.t * static_cast<double>(s) / slices;
        if (s > 0) state = pde::solve_pde(state, table, pcfg, target);
        std::vector<double> f = analysis::eval_F(state, table, kappa);
        for (double v : f) f_bound = std::max(f_bound, std::abs(v));
        rho_lo = std::min(rho_lo, state.min_value());
        rho_hi = std::max(rho_hi, state.max_value());
    }

    std::vector<double> rho_grid;
    const int rho_points = 21;
    for (int i = 0; i < rho_points; ++i) {
        rho_grid.push_back(rho_lo + (rho_hi - rho_lo) * static_cast<double>(i) /
                                        (rho_points - 1));
    }
    auto make_lambda_grid = [&table, &rho_grid](std::size_t points) {
        std::vector<double> grid;
        double lo = 1e-2, hi = table.rho_max();
        for (std::size_t i = 0; i < points; ++i) {
            grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) /
                                                      static_cast<double>(points - 1)));
        }
        // include the rho values so the equality case lambda = rho is on the grid
        grid.insert(grid.end(), rho_grid.begin(), rho_grid.end());
        std::sort(grid.begin(), grid.end());
        return grid;
    };
    std::vector<double> lambda_grid = make_lambda_grid(400);

    auto check = [&](double gamma) {
        return measures::proposition4_check(table, kappa, f_bound, gamma, rho_grid,
                                            lambda_grid);
    };

    Prop4Report report;
    report.config = config;
    report.kappa = kappa;
    report.f_bound = f_bound;
    report.rho_lo = rho_lo;
    report.rho_hi = rho_hi;

    double gamma_ok = 0.0, value_ok = 0.0;
    if (double v = check(1.0); v <= 0.0) {
        gamma_ok = 1.0;
        value_ok = v;
    } else {
        double hi_fail = 1.0, lo = 0.5;
        while (lo >= 1e-6) {
            double v2 = check(lo);
            if (v2 <= 0.0) {
                gamma_ok = lo;
                value_ok = v2;
                break;
            }
            hi_fail = lo;
            lo *= 0.5;
        }
        if (gamma_ok > 0.0) {
            for (int it = 0; it < 40; ++it) {
                double mid = 0.5 * (gamma_ok + hi_fail);
                double v3 = check(mid);
                if (v3 <= 0.0) {
                    gamma_ok = mid;
                    value_ok = v3;
                } else {
                    hi_fail = mid;
                }
            }
        }
    }
    report.certified = gamma_ok > 0.0;
    report.gamma = gamma_ok;
    report.grid_max = value_ok;
    if (report.certified) {
        std::vector<double> refined = make_lambda_grid(800);
        double v = measures::proposition4_check(table, kappa, f_bound, gamma_ok, rho_grid,
                                                refined);
        report.refinement_stable = v <= 0.0;
    }
    return report;
}

ordered_json Prop4Report::to_json() const {
    ordered_json j;
    j["experiment"] = "prop4";
    j["config"] = config.to_json();
    j["kappa"] = kappa;
    j["F_bound"] = f_bound;
    j["rho_range"] = {rho_lo, rho_hi};
    j["certified"] = certified;
    j["gamma"] = gamma;
    j["grid_max"] = grid_max;
    j["refinement_stable"] = refinement_stable;
    return j;
}

OneBlockReport run_one_block(const ExperimentConfig& input, bool section5) {
    ExperimentConfig config = input;
    if (config.l_list.empty()) config.l_list = {1, 2, 4, 8, 16};
    config.validate();
    env::Environment e = config.env.realize();
    env::TileDecomposition decomp = env::decompose_tiles(e);
    const auto& table = measures::FugacityTable::shared(config.g_name);

    std::vector<double> site_density(static_cast<std::size_t>(e.n));
    for (std::int64_t j = 0; j < e.n; ++j) {
        site_density[static_cast<std::size_t>(j)] =
            config.rho0(static_cast<double>(j) / static_cast<double>(e.n));
    }
    measures::ProfileSampler sampler(table, site_density);

    std::size_t n_l = config.l_list.size();
    std::int64_t replicas = config.replicas;
    std::vector<std::vector<double>> stats(
        n_l, std::vector<double>(static_cast<std::size_t>(replicas), 0.0));
    parallel_for_replicas(replicas, [&](std::int64_t r) {
        Rng rng(derive_seed(config.master_seed, static_cast<std::uint64_t>(r)));
        Configuration c = sampler.sample(rng);
        for (std::size_t li = 0; li < n_l; ++li) {
            stats[li][static_cast<std::size_t>(r)] =
                section5 ? analysis::section5_statistic(c, decomp, table, config.l_list[li])
                         : analysis::one_block_statistic(c, decomp, table, config.l_list[li]);
        }
    });

    OneBlockReport report;
    report.config = config;
    report.env_hash = e.content_hash();
    report.l_values = config.l_list;
    for (std::size_t li = 0; li < n_l; ++li) {
        double sum = 0.0, sq = 0.0;
        for (double v : stats[li]) {
            sum += v;
            sq += v * v;
        }
        double rd = static_cast<double>(replicas);
        double mean = sum / rd;
        report.mean.push_back(mean);
        double se = 0.0;
        if (replicas > 1) {
            double var = (sq - rd * mean * mean) / (rd - 1.0);
            se = std::sqrt(std::max(var, 0.0) / rd);
        }
        report.std_error.push_back(se);
    }
    return report;
}

ordered_json OneBlockReport::to_json() const {
    ordered_json j;
    j["experiment"] = "one-block";
    j["config"] = config.to_json();
    j["env_hash"] = hash_hex(env_hash);
    j["l"] = l_values;
    j["statistic_mean"] = mean;
    j["statistic_std_error"] = std_error;
    return j;
}

CofLReport run_c_of_l(const ExperimentConfig& input) {
    ExperimentConfig config = input;
    if (config.l_list.empty()) config.l_list = {1, 2, 4, 8, 16, 32};
    env::Environment e = config.env.realize();
    env::TileDecomposition decomp = env::decompose_tiles(e);
    CofLReport report;
    report.config = config;
    report.env_hash = e.content_hash();
    report.kappa_n = decomp.kappa_n;
    report.l_values = config.l_list;
    for (std::int64_t l : config.l_list) {
        report.c_hat.push_back(analysis::c_of_l(decomp, l));
    }
    return report;
}

ordered_json CofLReport::to_json() const {
    ordered_json j;
    j["experiment"] = "c-of-l";
    j["config"] = config.to_json();
    j["env_hash"] = hash_hex(env_hash);
    j["kappa_n"] = kappa_n;
    j["l"] = l_values;
    j["c_hat"] = c_hat;
    return j;
}

ExactSmallReport run_exact_small(std::int64_t tv_replicas, std::uint64_t seed) {
    ExactSmallReport report;

    // transient law: uniformization vs Gillespie histogram on n=2, K=3,
    // g = linear (20 states), generator time t = 1
    {
        env::Environment e = env::environment_from_string("11");
        measures::JumpRate g = measures::linear_rate();
        dyn::ExactModel model = dyn::build_exact_model(e, g, 3);
        env::OrientedEdgeSet edges = env::build_edges(e);
        report.tv_states = model.n_states;
        report.tv_replicas = tv_replicas;
        std::vector<std::int32_t> start = {3, 0, 0, 0};
        std::int64_t start_index = model.index_of(start);
        std::vector<double> mu0(static_cast<std::size_t>(model.n_states), 0.0);
        mu0[static_cast<std::size_t>(start_index)] = 1.0;
        std::vector<double> exact = dyn::transient_distribution(model, mu0, 1.0);

        std::vector<std::int64_t> counts(static_cast<std::size_t>(model.n_states), 0);
        Configuration init = Configuration::zeros(4);
        init.occupancy[0] = 3;
        init.total = 3;
        Rng rng(seed);
        for (std::int64_t r = 0; r < tv_replicas; ++r) {
            dyn::SimulateResult res = dyn::simulate_micro(init, edges, g, 1.0, rng);
            ++counts[static_cast<std::size_t>(model.index_of(res.final_config.occupancy))];
        }
        double tv = 0.0;
        for (std::int64_t i = 0; i < model.n_states; ++i) {
            double empirical = static_cast<double>(counts[static_cast<std::size_t>(i)]) /
                               static_cast<double>(tv_replicas);
            tv += std::abs(empirical - exact[static_cast<std::size_t>(i)]);
        }
        report.tv_distance = 0.5 * tv;
    }

    // entropy decay: H(mu_t | canonical) on a time grid, n=3 ([F1,F2,F3]), K=2
    {
        env::Environment e = env::environment_from_string("123");
        measures::JumpRate g = measures::const1_rate();
        dyn::ExactModel model = dyn::build_exact_model(e, g, 2);
        std::vector<double> pi = dyn::canonical_measure(model, g);
        std::vector<double> mu0(static_cast<std::size_t>(model.n_states), 0.0);
        mu0[0] = 1.0;
        const int points = 20;
        double horizon = 2.0;
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i < points; ++i) {
            double t = horizon * static_cast<double>(i) / (points - 1);
            std::vector<double> mu = dyn::transient_distribution(model, mu0, t);
            double h = dyn::relative_entropy(mu, pi);
            report.entropy_path.push_back(h);
            if (h > prev + 1e-12) report.entropy_monotone = false;
            prev = h;
        }
    }
    return report;
}

ordered_json ExactSmallReport::to_json() const {
    ordered_json j;
    j["experiment"] = "exact-small";
    j["tv_distance"] = tv_distance;
    j["tv_states"] = tv_states;
    j["tv_replicas"] = tv_replicas;
    j["entropy_path"] = entropy_path;
    j["entropy_monotone"] = entropy_monotone;
    return j;
}

void write_json(const ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for write: " + path);
    out << j.dump(2) << '\n';
}

void write_profile_csv(const pde::DensityProfile& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for write: " + path);
    out << "x,rho\n" << std::setprecision(17);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << p.x(i) << ',' << p.values[i] << '\n';
    }
}

pde::DensityProfile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open profile csv: " + path);
    std::string line;
    std::getline(in, line);  // header
    pde::DensityProfile p;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ValidationError("profile csv: malformed line in " + path);
        }
        p.values.push_back(std::stod(line.substr(comma + 1)));
    }
    if (p.values.size() < 3) throw ValidationError("profile csv: too few rows in " + path);
    return p;
}

void write_snapshot_csv(const Configuration& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for write: " + path);
    out << "site,row,occupancy\n";
    std::int64_t n = static_cast<std::int64_t>(c.occupancy.size()) / 2;
    for (std::int64_t j = 0; j < n; ++j) {
        out << j << ",1," << c.occupancy[static_cast<std::size_t>(2 * j)] << '\n';
        out << j << ",-1," << c.occupancy[static_cast<std::size_t>(2 * j + 1)] << '\n';
    }
}

Configuration read_snapshot_csv(const std::string& path, std::int64_t* n_sites_out) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open snapshot csv: " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::int64_t> sites;
    std::vector<int> rows;
    std::vector<std::int64_t> occupancies;
    std::int64_t max_site = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        std::int64_t site = std::stoll(field);
        std::getline(ss, field, ',');
        int row = std::stoi(field);
        std::getline(ss, field, ',');
        std::int64_t occ = std::stoll(field);
        if (occ < 0 || (row != 1 && row != -1)) {
            throw ValidationError("snapshot csv: malformed row in " + path);
        }
        sites.push_back(site);
        rows.push_back(row);
        occupancies.push_back(occ);
        max_site = std::max(max_site, site);
    }
    std::int64_t n = max_site + 1;
    if (n < 2) throw ValidationError("snapshot csv: too few sites in " + path);
    Configuration c = Configuration::zeros(2 * n);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        std::int32_t v = env::vertex_index(sites[i], rows[i]);
        c.occupancy[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(occupancies[i]);
    }
    c.total = c.recount();
    if (n_sites_out) *n_sites_out = n;
    return c;
}

} // namespace zrp::cli
