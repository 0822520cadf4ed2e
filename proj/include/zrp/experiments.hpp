// experiments.hpp — experiment configuration and pipelines: hydrodynamic
// comparison runs, exact stationarity sweeps, the certified-gamma search,
// one-block and C(l) sweeps, and the small-system exact checks. Pipelines
// compose the module operations and write machine-readable reports.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "zrp/analysis.hpp"
#include "zrp/environment.hpp"
#include "zrp/measures.hpp"
#include "zrp/pde.hpp"

namespace zrp::cli {

using ordered_json = nlohmann::ordered_json;

struct EnvSpec {
    std::int64_t n = 64;
    double p = 0.0;
    std::uint64_t seed = 1;
    std::string file;  // when set, load instead of generating

    env::Environment realize() const;
};

struct Rho0Spec {
    std::string kind = "const";  // "const" or "sine"
    double value = 1.0;          // const level
    double mean = 1.0;           // sine parameters
    double amplitude = 0.0;

    static Rho0Spec parse(const std::string& expr);  // "const:c" | "sine:mean,amp"
    double operator()(double x) const;
    double min_value() const;
    double max_value() const;
    std::string to_string() const;
};

struct ExperimentConfig {
    std::string experiment = "hydro";
    EnvSpec env;
    std::string g_name = "const1";
    Rho0Spec rho0;
    double t = 0.0;
    std::vector<double> snapshot_times;  // defaults to {t}
    std::int64_t replicas = 1;
    std::int64_t block_size = 0;  // 0 -> max(4, n/64)
    std::vector<std::int64_t> l_list;
    std::string out_dir;
    std::uint64_t master_seed = 1;
    double kappa_override = 0.0;  // 0 -> realized kappa_N
    std::size_t pde_grid = 1024;

    static ExperimentConfig from_json(const ordered_json& j);
    ordered_json to_json() const;
    void validate() const;
};

// Runs fn(replica_index) for indices [0, count), spread over worker threads
// capped by ZRP_THREADS (default: hardware concurrency). Output slots are
// indexed by replica, so scheduling never changes results.
void parallel_for_replicas(std::int64_t count,
                           const std::function<void(std::int64_t)>& fn);

struct SnapshotComparison {
    double time = 0.0;
    double l1_error = 0.0;
    double half_width = 0.0;  // mean standard error across blocks
    analysis::EmpiricalProfile profile;
    std::vector<double> reference;  // at block midpoints
};

struct HydroReport {
    ExperimentConfig config;
    std::uint64_t env_hash = 0;
    double kappa_n = 0.0;
    std::int64_t t_n = 0;
    bool conservation_ok = true;
    std::uint64_t total_events = 0;
    std::vector<SnapshotComparison> snapshots;

    ordered_json to_json() const;
};

HydroReport run_hydro(const ExperimentConfig& config);

struct StationarityReport {
    double max_residual = 0.0;
    double negative_control_residual = 0.0;  // expected to be large
    std::vector<ordered_json> cases;

    ordered_json to_json() const;
};

StationarityReport run_stationarity();

struct Prop4Report {
    ExperimentConfig config;
    double kappa = 0.0;
    double f_bound = 0.0;
    double rho_lo = 0.0, rho_hi = 0.0;
    bool certified = false;
    double gamma = 0.0;     // largest grid-certified gamma (when certified)
    double grid_max = 0.0;  // at the certified gamma
    bool refinement_stable = false;

    ordered_json to_json() const;
};

Prop4Report run_prop4(const ExperimentConfig& config);

struct OneBlockReport {
    ExperimentConfig config;
    std::uint64_t env_hash = 0;
    std::vector<std::int64_t> l_values;
    std::vector<double> mean;       // statistic per l, replica mean
    std::vector<double> std_error;  // per l

    ordered_json to_json() const;
};

// statistic = one-block by default; section5 = true switches to the
// factor-2 variant.
OneBlockReport run_one_block(const ExperimentConfig& config, bool section5 = false);

struct CofLReport {
    ExperimentConfig config;
    std::uint64_t env_hash = 0;
    double kappa_n = 0.0;
    std::vector<std::int64_t> l_values;
    std::vector<double> c_hat;

    ordered_json to_json() const;
};

CofLReport run_c_of_l(const ExperimentConfig& config);

struct ExactSmallReport {
    double tv_distance = 0.0;          // uniformization vs Gillespie histogram
    std::int64_t tv_states = 0;
    std::int64_t tv_replicas = 0;
    std::vector<double> entropy_path;  // H(mu_t | canonical) on a time grid
    bool entropy_monotone = true;

    ordered_json to_json() const;
};

ExactSmallReport run_exact_small(std::int64_t tv_replicas = 1'000'000,
                                 std::uint64_t seed = 20240901);

void write_json(const ordered_json& j, const std::string& path);
void write_profile_csv(const pde::DensityProfile& p, const std::string& path);
pde::DensityProfile read_profile_csv(const std::string& path);
void write_snapshot_csv(const Configuration& c, const std::string& path);
Configuration read_snapshot_csv(const std::string& path, std::int64_t* n_sites_out);

} // namespace zrp::cli
