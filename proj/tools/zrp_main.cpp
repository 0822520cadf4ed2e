// zrp_main.cpp — command-line front end. Subcommands cover environment
// generation and decomposition, trajectory simulation, the PDE solver,
// profile comparison, and the experiment pipelines. Exit codes: 0 success,
// 2 validation error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "zrp/analysis.hpp"
#include "zrp/dynamics.hpp"
#include "zrp/environment.hpp"
#include "zrp/exact.hpp"
#include "zrp/experiments.hpp"
#include "zrp/kernels.hpp"
#include "zrp/measures.hpp"
#include "zrp/pde.hpp"

namespace fs = std::filesystem;
using zrp::cli::ordered_json;

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& csv) {
    std::vector<std::int64_t> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoll(item));
    }
    return out;
}

ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw zrp::ValidationError("cannot open config file: " + path);
    ordered_json j;
    in >> j;
    return j;
}

struct SimulateArgs {
    std::string env_path;
    std::string g_name = "const1";
    std::string rho0 = "const:1";
    double t = 0.0;
    std::string snapshots;
    std::int64_t replicas = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "simulate-out";
    bool reverse = false;
};

void run_simulate(const SimulateArgs& args) {
    zrp::env::Environment e = zrp::env::load_environment(args.env_path);
    zrp::env::OrientedEdgeSet edges = zrp::env::build_edges(e);
    if (args.reverse) edges = edges.reversed();
    const auto& table = zrp::measures::FugacityTable::shared(args.g_name);
    zrp::measures::JumpRate g = table.jump_rate();
    zrp::cli::Rho0Spec rho0 = zrp::cli::Rho0Spec::parse(args.rho0);

    std::vector<double> snapshot_times =
        args.snapshots.empty() ? std::vector<double>{args.t}
                               : parse_double_list(args.snapshots);
    std::sort(snapshot_times.begin(), snapshot_times.end());

    std::vector<double> site_density(static_cast<std::size_t>(e.n));
    for (std::int64_t j = 0; j < e.n; ++j) {
        site_density[static_cast<std::size_t>(j)] =
            rho0(static_cast<double>(j) / static_cast<double>(e.n));
    }
    zrp::measures::ProfileSampler sampler(table, site_density);

    fs::create_directories(args.out_dir);
    for (std::size_t k = 0; k < snapshot_times.size(); ++k) {
        std::ostringstream dir;
        dir << args.out_dir << "/t" << std::setw(2) << std::setfill('0') << k;
        fs::create_directories(dir.str());
    }

    std::vector<std::uint64_t> events(static_cast<std::size_t>(args.replicas), 0);
    std::vector<std::uint8_t> conserved(static_cast<std::size_t>(args.replicas), 0);
    zrp::cli::parallel_for_replicas(args.replicas, [&](std::int64_t r) {
        zrp::Rng rng(zrp::derive_seed(args.seed, static_cast<std::uint64_t>(r)));
        zrp::Configuration init = sampler.sample(rng);
        std::int64_t total0 = init.total;
        auto on_snapshot = [&](std::size_t k, const zrp::Configuration& c) {
            std::ostringstream path;
            path << args.out_dir << "/t" << std::setw(2) << std::setfill('0') << k
                 << "/r" << std::setw(4) << std::setfill('0') << r << ".csv";
            zrp::cli::write_snapshot_csv(c, path.str());
        };
        auto res = zrp::dyn::simulate(std::move(init), edges, g, args.t, rng,
                                      snapshot_times, on_snapshot);
        events[static_cast<std::size_t>(r)] = res.clock.event_count;
        conserved[static_cast<std::size_t>(r)] = res.final_config.recount() == total0;
    });

    ordered_json summary;
    summary["env"] = args.env_path;
    summary["env_hash"] = e.content_hash();
    summary["g"] = args.g_name;
    summary["rho0"] = rho0.to_string();
    summary["t"] = args.t;
    summary["snapshot_times"] = snapshot_times;
    summary["replicas"] = args.replicas;
    summary["seed"] = args.seed;
    summary["reverse"] = args.reverse;
    summary["conservation_ok"] =
        std::all_of(conserved.begin(), conserved.end(), [](std::uint8_t c) { return c != 0; });
    summary["event_counts"] = events;
    zrp::cli::write_json(summary, args.out_dir + "/summary.json");
    std::cout << "simulate: " << args.replicas << " replicas -> " << args.out_dir << '\n';
}

void run_compare(const std::string& snapshot_dir, const std::string& pde_csv,
                 std::int64_t block, const std::string& out_path) {
    std::vector<zrp::Configuration> snaps;
    std::int64_t n_sites = 0;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(snapshot_dir)) {
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
        std::int64_t n = 0;
        snaps.push_back(zrp::cli::read_snapshot_csv(f.string(), &n));
        if (n_sites == 0) n_sites = n;
        if (n != n_sites) throw zrp::ValidationError("compare: snapshot sizes differ");
    }
    if (snaps.empty()) throw zrp::ValidationError("compare: no snapshot csv files found");
    zrp::pde::DensityProfile ref = zrp::cli::read_profile_csv(pde_csv);
    auto profile = zrp::analysis::empirical_profile(snaps, n_sites, block);
    double l1 = zrp::analysis::l1_distance(profile, [&ref](double x) {
        double m = static_cast<double>(ref.size());
        double u = (x - std::floor(x)) * m;
        std::size_t i = static_cast<std::size_t>(u);
        if (i >= ref.size()) i = ref.size() - 1;
        double frac = u - static_cast<double>(i);
        return ref.values[i] * (1.0 - frac) + ref.values[(i + 1) % ref.size()] * frac;
    });
    ordered_json j;
    j["snapshots"] = snapshot_dir;
    j["pde"] = pde_csv;
    j["replicas"] = snaps.size();
    j["block_size"] = block;
    j["l1_error"] = l1;
    j["empirical"] = profile.mean;
    j["std_error"] = profile.std_error;
    zrp::cli::write_json(j, out_path);
    std::cout << "compare: l1_error = " << l1 << " -> " << out_path << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quenched zero range process simulator and verifier"};
    app.require_subcommand(1);

    // gen-env
    auto* gen = app.add_subcommand("gen-env", "generate a random environment file");
    std::int64_t gen_n = 64;
    double gen_p = 0.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "env.txt";
    gen->add_option("--n", gen_n, "site count");
    gen->add_option("--p", gen_p, "pair probability in [0,1)");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output path");

    // decompose
    auto* dec = app.add_subcommand("decompose", "tile decomposition of an environment");
    std::string dec_env, dec_out = "decomposition.json";
    dec->add_option("--env", dec_env, "environment file")->required();
    dec->add_option("--out", dec_out, "output json");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run trajectory replicas");
    SimulateArgs sim_args;
    sim->add_option("--env", sim_args.env_path, "environment file")->required();
    sim->add_option("--g", sim_args.g_name, "jump rate: const1 | linear");
    sim->add_option("--rho0", sim_args.rho0, "initial profile: const:c | sine:mean,amp");
    sim->add_option("--t", sim_args.t, "macroscopic horizon")->required();
    sim->add_option("--snapshots", sim_args.snapshots, "comma list of macro times");
    sim->add_option("--replicas", sim_args.replicas, "replica count");
    sim->add_option("--seed", sim_args.seed, "master seed");
    sim->add_option("--out", sim_args.out_dir, "output directory");
    sim->add_flag("--reverse", sim_args.reverse, "run the edge-reversed process");

    // solve-pde
    auto* spde = app.add_subcommand("solve-pde", "solve the hydrodynamic equation");
    std::string pde_g = "const1", pde_rho0 = "sine:1,0.5", pde_out = "pde.csv";
    std::string pde_scheme = "explicit";
    double pde_kappa = 1.0, pde_t = 0.05;
    std::size_t pde_m = 512;
    spde->add_option("--g", pde_g, "jump rate: const1 | linear");
    spde->add_option("--kappa", pde_kappa, "diffusion prefactor");
    spde->add_option("--rho0", pde_rho0, "initial profile");
    spde->add_option("--M", pde_m, "grid size");
    spde->add_option("--t", pde_t, "horizon")->required();
    spde->add_option("--scheme", pde_scheme, "explicit | implicit");
    spde->add_option("--out", pde_out, "output csv");

    // compare
    auto* cmp = app.add_subcommand("compare", "empirical profile vs PDE curve");
    std::string cmp_snaps, cmp_pde, cmp_out = "compare.json";
    std::int64_t cmp_block = 4;
    cmp->add_option("--snapshots", cmp_snaps, "directory of snapshot csv files")->required();
    cmp->add_option("--pde", cmp_pde, "pde profile csv")->required();
    cmp->add_option("--block", cmp_block, "block size in sites");
    cmp->add_option("--out", cmp_out, "output json");

    // one-block
    auto* ob = app.add_subcommand("one-block", "one-block statistic sweep");
    std::string ob_env, ob_llist = "1,2,4,8,16", ob_out = "one-block.json";
    std::int64_t ob_n = 10000, ob_replicas = 8;
    double ob_p = 0.4, ob_rho = 1.0;
    std::uint64_t ob_seed = 1, ob_env_seed = 1;
    ob->add_option("--env", ob_env, "environment file (otherwise generated)");
    ob->add_option("--n", ob_n, "site count when generating");
    ob->add_option("--p", ob_p, "pair probability when generating");
    ob->add_option("--env-seed", ob_env_seed, "environment seed when generating");
    ob->add_option("--rho", ob_rho, "stationary density");
    ob->add_option("--l-list", ob_llist, "comma list of half-windows");
    ob->add_option("--replicas", ob_replicas, "replica count");
    ob->add_option("--seed", ob_seed, "master seed");
    ob->add_option("--out", ob_out, "output json");

    // c-of-l
    auto* col = app.add_subcommand("c-of-l", "tile-size defect C(l) sweep");
    std::string col_env, col_llist = "1,2,4,8,16,32", col_out = "c-of-l.json";
    std::int64_t col_n = 100000;
    double col_p = 0.4;
    std::uint64_t col_seed = 1;
    col->add_option("--env", col_env, "environment file (otherwise generated)");
    col->add_option("--n", col_n, "site count when generating");
    col->add_option("--p", col_p, "pair probability when generating");
    col->add_option("--env-seed", col_seed, "environment seed when generating");
    col->add_option("--l-list", col_llist, "comma list of half-windows");
    col->add_option("--out", col_out, "output json");

    // stationarity
    auto* stat = app.add_subcommand("stationarity", "exact stationarity sweep");
    std::string stat_out = "stationarity.json";
    stat->add_option("--out", stat_out, "output json");

    // prop4
    auto* p4 = app.add_subcommand("prop4", "certified-gamma search");
    std::string p4_config, p4_out = "prop4.json";
    std::string p4_g = "const1", p4_rho0 = "sine:1,0.5";
    std::int64_t p4_n = 256;
    double p4_p = 0.4, p4_t = 0.05, p4_kappa = 0.0;
    std::uint64_t p4_env_seed = 1;
    p4->add_option("--config", p4_config, "json config file");
    p4->add_option("--g", p4_g, "jump rate");
    p4->add_option("--n", p4_n, "site count");
    p4->add_option("--p", p4_p, "pair probability");
    p4->add_option("--env-seed", p4_env_seed, "environment seed");
    p4->add_option("--rho0", p4_rho0, "initial profile");
    p4->add_option("--t", p4_t, "horizon");
    p4->add_option("--kappa", p4_kappa, "kappa override (0: realized)");
    p4->add_option("--out", p4_out, "output json");

    // hydro
    auto* hyd = app.add_subcommand("hydro", "hydrodynamic comparison pipeline");
    std::string hyd_config, hyd_out_dir = "hydro-out";
    std::string hyd_g, hyd_rho0, hyd_snapshots;
    std::int64_t hyd_n = -1, hyd_replicas = -1, hyd_block = -1;
    double hyd_p = -1.0, hyd_t = -1.0;
    std::uint64_t hyd_env_seed = 0, hyd_seed = 0;
    bool hyd_env_seed_set = false, hyd_seed_set = false;
    hyd->add_option("--config", hyd_config, "json config file");
    hyd->add_option("--n", hyd_n, "site count");
    hyd->add_option("--p", hyd_p, "pair probability");
    hyd->add_option("--env-seed", hyd_env_seed, "environment seed")
        ->each([&hyd_env_seed_set](const std::string&) { hyd_env_seed_set = true; });
    hyd->add_option("--g", hyd_g, "jump rate");
    hyd->add_option("--rho0", hyd_rho0, "initial profile");
    hyd->add_option("--t", hyd_t, "horizon");
    hyd->add_option("--snapshots", hyd_snapshots, "comma list of macro times");
    hyd->add_option("--replicas", hyd_replicas, "replica count");
    hyd->add_option("--block", hyd_block, "block size in sites");
    hyd->add_option("--seed", hyd_seed, "master seed")
        ->each([&hyd_seed_set](const std::string&) { hyd_seed_set = true; });
    hyd->add_option("--out", hyd_out_dir, "output directory");

    // exact-small
    auto* ex = app.add_subcommand("exact-small", "small-system exact checks");
    std::string ex_out = "exact-small.json";
    std::int64_t ex_replicas = 1000000;
    std::uint64_t ex_seed = 20240901;
    ex->add_option("--replicas", ex_replicas, "Gillespie replica count");
    ex->add_option("--seed", ex_seed, "RNG seed");
    ex->add_option("--out", ex_out, "output json");

    // fugacity
    auto* fug = app.add_subcommand("fugacity", "export the (phi, Z, R) table");
    std::string fug_g = "const1", fug_out = "fugacity.csv";
    fug->add_option("--g", fug_g, "jump rate");
    fug->add_option("--out", fug_out, "output csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            zrp::env::Environment e = zrp::env::generate_environment(gen_n, gen_p, gen_seed);
            zrp::env::save_environment(e, gen_out);
            std::cout << "gen-env: n=" << gen_n << " p=" << gen_p << " -> " << gen_out << '\n';
        } else if (dec->parsed()) {
            zrp::env::Environment e = zrp::env::load_environment(dec_env);
            zrp::env::TileDecomposition d = zrp::env::decompose_tiles(e);
            ordered_json j;
            j["env"] = dec_env;
            j["env_hash"] = e.content_hash();
            j["n"] = e.n;
            j["t_n"] = d.t_n;
            j["kappa_n"] = d.kappa_n;
            j["tiles"] = ordered_json::array();
            for (const auto& tile : d.tiles) {
                ordered_json jt;
                jt["centre_site"] = tile.centre_site;
                jt["size"] = tile.size();
                jt["vertices"] = ordered_json::array();
                for (std::int32_t v : tile.vertices) {
                    auto vid = zrp::env::vertex_of_index(v);
                    jt["vertices"].push_back({vid.site, vid.row});
                }
                j["tiles"].push_back(std::move(jt));
            }
            zrp::cli::write_json(j, dec_out);
            std::cout << "decompose: T_N=" << d.t_n << " kappa_N=" << d.kappa_n << " -> "
                      << dec_out << '\n';
        } else if (sim->parsed()) {
            run_simulate(sim_args);
        } else if (spde->parsed()) {
            const auto& table = zrp::measures::FugacityTable::shared(pde_g);
            zrp::cli::Rho0Spec rho0 = zrp::cli::Rho0Spec::parse(pde_rho0);
            zrp::pde::PDEConfig cfg;
            cfg.kappa = pde_kappa;
            cfg.grid_size = pde_m;
            if (pde_scheme == "implicit") {
                cfg.scheme = zrp::pde::Scheme::crank_nicolson;
            } else if (pde_scheme != "explicit") {
                throw zrp::ValidationError("solve-pde: scheme must be explicit or implicit");
            }
            zrp::pde::DensityProfile init =
                rho0.kind == "const" ? zrp::pde::constant_profile(rho0.value, pde_m)
                                     : zrp::pde::sine_profile(rho0.mean, rho0.amplitude, pde_m);
            zrp::pde::DensityProfile sol = zrp::pde::solve_pde(init, table, cfg, pde_t);
            zrp::cli::write_profile_csv(sol, pde_out);
            std::cout << "solve-pde: mass=" << sol.mass() << " -> " << pde_out << '\n';
        } else if (cmp->parsed()) {
            run_compare(cmp_snaps, cmp_pde, cmp_block, cmp_out);
        } else if (ob->parsed()) {
            zrp::cli::ExperimentConfig cfg;
            cfg.experiment = "one-block";
            cfg.env.n = ob_n;
            cfg.env.p = ob_p;
            cfg.env.seed = ob_env_seed;
            cfg.env.file = ob_env;
            cfg.g_name = "const1";
            cfg.rho0 = zrp::cli::Rho0Spec::parse("const:" + std::to_string(ob_rho));
            cfg.replicas = ob_replicas;
            cfg.l_list = parse_int_list(ob_llist);
            cfg.master_seed = ob_seed;
            auto report = zrp::cli::run_one_block(cfg);
            zrp::cli::write_json(report.to_json(), ob_out);
            std::cout << "one-block -> " << ob_out << '\n';
        } else if (col->parsed()) {
            zrp::cli::ExperimentConfig cfg;
            cfg.experiment = "c-of-l";
            cfg.env.n = col_n;
            cfg.env.p = col_p;
            cfg.env.seed = col_seed;
            cfg.env.file = col_env;
            cfg.l_list = parse_int_list(col_llist);
            auto report = zrp::cli::run_c_of_l(cfg);
            zrp::cli::write_json(report.to_json(), col_out);
            std::cout << "c-of-l -> " << col_out << '\n';
        } else if (stat->parsed()) {
            auto report = zrp::cli::run_stationarity();
            zrp::cli::write_json(report.to_json(), stat_out);
            std::cout << "stationarity: max residual = " << report.max_residual << " -> "
                      << stat_out << '\n';
        } else if (p4->parsed()) {
            zrp::cli::ExperimentConfig cfg;
            if (!p4_config.empty()) {
                cfg = zrp::cli::ExperimentConfig::from_json(load_json(p4_config));
            } else {
                cfg.experiment = "prop4";
                cfg.env.n = p4_n;
                cfg.env.p = p4_p;
                cfg.env.seed = p4_env_seed;
                cfg.g_name = p4_g;
                cfg.rho0 = zrp::cli::Rho0Spec::parse(p4_rho0);
                cfg.t = p4_t;
                cfg.kappa_override = p4_kappa;
            }
            auto report = zrp::cli::run_prop4(cfg);
            zrp::cli::write_json(report.to_json(), p4_out);
            std::cout << "prop4: certified=" << report.certified
                      << " gamma=" << report.gamma << " -> " << p4_out << '\n';
        } else if (hyd->parsed()) {
            zrp::cli::ExperimentConfig cfg;
            cfg.experiment = "hydro";
            if (!hyd_config.empty()) {
                cfg = zrp::cli::ExperimentConfig::from_json(load_json(hyd_config));
            }
            if (hyd_n > 0) cfg.env.n = hyd_n;
            if (hyd_p >= 0.0) cfg.env.p = hyd_p;
            if (hyd_env_seed_set) cfg.env.seed = hyd_env_seed;
            if (!hyd_g.empty()) cfg.g_name = hyd_g;
            if (!hyd_rho0.empty()) cfg.rho0 = zrp::cli::Rho0Spec::parse(hyd_rho0);
            if (hyd_t >= 0.0) cfg.t = hyd_t;
            if (!hyd_snapshots.empty()) cfg.snapshot_times = parse_double_list(hyd_snapshots);
            if (hyd_replicas > 0) cfg.replicas = hyd_replicas;
            if (hyd_block > 0) cfg.block_size = hyd_block;
            if (hyd_seed_set) cfg.master_seed = hyd_seed;
            cfg.out_dir = hyd_out_dir;
            auto report = zrp::cli::run_hydro(cfg);
            fs::create_directories(hyd_out_dir);
            zrp::cli::write_json(report.to_json(), hyd_out_dir + "/report.json");
            for (std::size_t k = 0; k < report.snapshots.size(); ++k) {
                std::ostringstream path;
                path << hyd_out_dir << "/profile_t" << std::setw(2) << std::setfill('0')
                     << k << ".csv";
                std::ofstream out(path.str());
                out << "x,empirical,std_error,reference\n" << std::setprecision(17);
                const auto& s = report.snapshots[k];
                for (std::size_t b = 0; b < s.profile.mean.size(); ++b) {
                    out << s.profile.x(b) << ',' << s.profile.mean[b] << ','
                        << s.profile.std_error[b] << ',' << s.reference[b] << '\n';
                }
            }
            std::cout << "hydro: l1_error(final)=" << report.snapshots.back().l1_error
                      << " -> " << hyd_out_dir << '\n';
        } else if (ex->parsed()) {
            auto report = zrp::cli::run_exact_small(ex_replicas, ex_seed);
            zrp::cli::write_json(report.to_json(), ex_out);
            std::cout << "exact-small: tv=" << report.tv_distance
                      << " entropy_monotone=" << report.entropy_monotone << " -> " << ex_out
                      << '\n';
        } else if (fug->parsed()) {
            const auto& table = zrp::measures::FugacityTable::shared(fug_g);
            std::ofstream out(fug_out);
            if (!out) throw zrp::ValidationError("cannot open for write: " + fug_out);
            table.write_csv(out);
            std::cout << "fugacity -> " << fug_out << '\n';
        }
    } catch (const zrp::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const zrp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
