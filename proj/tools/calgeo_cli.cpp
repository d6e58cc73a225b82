// Command-line entry point: verification suites, geodesics, distances,
// flows, and equivalence checks, with Report/CSV artifacts.
//
// Exit codes: 0 all checks pass, 1 check failure, 2 usage/config error,
// 3 numerical abort (positivity loss, blow-up).
#include <CLI11.hpp>

#include "calgeo/density.hpp"
#include "calgeo/ebin.hpp"
#include "calgeo/io.hpp"
#include "calgeo/kahler.hpp"
#include "calgeo/krf.hpp"
#include "calgeo/ops.hpp"
#include "calgeo/report.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace calgeo;
namespace fs = std::filesystem;

namespace {

struct Config {
    std::string command;
    std::string grid = "torus2d:32";
    long seed = 1;
    double tol = 1e-8;
    std::string out = "calgeo_out";
    std::string suite = "all";
    std::string pair = "random";
    int count = 20;
    std::string initial = "mode:2";
    double amplitude = 0.05;
    double t_end = 30.0;
    double dt0 = 1e-3;
    std::string config_file;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

GridPtr parse_grid(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw UsageError("grid must be <topology>:<resolution>: " + spec);
    const std::string name = spec.substr(0, colon);
    int res = 0;
    try {
        res = std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("bad grid resolution in: " + spec);
    }
    auto in_range = [&](int lo, int hi) {
        if (res < lo || res > hi)
            throw UsageError("resolution " + std::to_string(res) +
                             " outside supported range [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "] for " + name);
    };
    if (name == "torus2d") {
        in_range(16, 256);
        return GridSpec::torus2d(res);
    }
    if (name == "torus4d") {
        in_range(8, 16);
        return GridSpec::torus4d(res);
    }
    if (name == "sphere") {
        in_range(64, 1024);
        return GridSpec::sphere_axisym(res);
    }
    throw UsageError("unknown grid topology: " + name);
}

ScalarField random_potential(const GridPtr& grid, std::mt19937_64& rng,
                             double strength = 0.4) {
    ScalarField f = random_smooth_field(grid, rng, 1.0);
    SymTensorField h = nabla11(f);
    double worst = 0.0;
    for (std::size_t p = 0; p < grid->nodes; ++p) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            Eigen::MatrixXd(h.node(p)), Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    const double scale = (worst > 0.0) ? strength / worst : 1.0;
    return kahler::normalize_potential(scale * f);
}

// flat key = value configuration; flags that were set on the command line win
void apply_config_file(Config& cfg, const CLI::App* sub) {
    if (cfg.config_file.empty()) return;
    std::ifstream in(cfg.config_file);
    if (!in.good())
        throw UsageError("cannot read config file: " + cfg.config_file);

    auto flag_given = [&](const std::string& flag) {
        const CLI::Option* o = sub->get_option_no_throw(flag);
        return o != nullptr && o->count() > 0;
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = line;
        const auto hash = stripped.find('#');
        if (hash != std::string::npos) stripped.erase(hash);
        if (stripped.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) +
                             " is not key = value: " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string()
                                            : s.substr(a, b - a + 1);
        };
        const std::string key = trim(stripped.substr(0, eq));
        const std::string val = trim(stripped.substr(eq + 1));
        try {
            if (key == "grid") {
                if (!flag_given("--grid")) cfg.grid = val;
            } else if (key == "seed") {
                if (!flag_given("--seed")) cfg.seed = std::stol(val);
            } else if (key == "tol") {
                if (!flag_given("--tol")) cfg.tol = std::stod(val);
            } else if (key == "out") {
                if (!flag_given("--out")) cfg.out = val;
            } else if (key == "suite") {
                if (!flag_given("--suite")) cfg.suite = val;
            } else if (key == "pair") {
                if (!flag_given("--pair")) cfg.pair = val;
            } else if (key == "count") {
                if (!flag_given("--count")) cfg.count = std::stoi(val);
            } else if (key == "initial") {
                if (!flag_given("--initial")) cfg.initial = val;
            } else if (key == "amplitude") {
                if (!flag_given("--amplitude")) cfg.amplitude = std::stod(val);
            } else if (key == "t_end") {
                if (!flag_given("--t-end")) cfg.t_end = std::stod(val);
            } else if (key == "dt0") {
                if (!flag_given("--dt0")) cfg.dt0 = std::stod(val);
            } else {
                throw UsageError("unknown config key at line " +
                                 std::to_string(lineno) + ": " + line);
            }
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("bad value at config line " +
                             std::to_string(lineno) + ": " + line);
        }
    }
}

void write_artifacts(const Config& cfg, const std::vector<Report>& reports) {
    fs::create_directories(cfg.out);
    std::ofstream js(fs::path(cfg.out) / "summary.json");
    if (!js.good()) throw UsageError("output_dir not writable: " + cfg.out);
    js << reports_to_json(reports).dump(2) << "\n";
    std::ofstream txt(fs::path(cfg.out) / "summary.txt");
    txt << format_reports(reports);
    std::fputs(format_reports(reports).c_str(), stdout);
}

// ---- verify ---------------------------------------------------------------

void suite_kahler(const GridPtr& grid, std::mt19937_64& rng, double tol,
                  std::vector<Report>& reports) {
    for (int trial = 0; trial < 5; ++trial) {
        ScalarField phi = random_potential(grid, rng);
        ScalarField nu = random_smooth_field(grid, rng, 1.0);
        ScalarField eta = random_smooth_field(grid, rng, 1.0);
        reports.push_back(kahler::check_isometric_embedding(phi, nu, eta, tol));
        reports.push_back(
            kahler::trace_pairing_identity(phi, nabla11(nu), nabla11(eta), tol));
        reports.push_back(
            kahler::angle_check(kahler::potential_to_metric(phi), nabla11(nu), tol));
        const double a = kahler::calabi_inner(phi, nu, eta);
        const double b = kahler::calabi_inner_ddbar(phi, nu, eta);
        reports.push_back(
            Report::relative("kahler: Laplacian vs ddbar route", a, b, 1e-10, 1.0));
    }
}

void suite_ebin(const GridPtr& grid, std::mt19937_64& rng, double tol,
                std::vector<Report>& reports) {
    SymTensorField g0 = reference_metric(grid);
    for (int trial = 0; trial < 3; ++trial) {
        SymTensorField h = random_sym_tensor(grid, rng, 0.3);
        ebin::TangentSplit s = ebin::tangent_split(g0, h);
        reports.push_back(Report::relative(
            "ebin: orthogonal split", ebin::inner(g0, h, h),
            ebin::inner(g0, s.vertical, s.vertical) +
                ebin::inner(g0, s.horizontal, s.horizontal),
            tol));
        ebin::GeodesicResult res = ebin::geodesic(g0, h, 0.2, 100);
        reports.push_back(Report::boolean("ebin: geodesic nondegenerate",
                                          !res.degenerate));
        reports.push_back(Report::relative(
            "ebin: constant geodesic speed", ebin::path_length(res.path),
            ebin::norm(g0, h) * res.path.times.back(), 1e-4));
    }
}

void suite_density(const GridPtr& grid, std::mt19937_64& rng, double,
                   std::vector<Report>& reports) {
    for (int trial = 0; trial < 5; ++trial) {
        Density mu1 = dens::random_density(grid, rng, 0.4);
        Density mu2 = dens::random_density(grid, rng, 0.4);
        for (auto& r : dens::equivalence_check(mu1, mu2))
            reports.push_back(std::move(r));
    }
}

int cmd_verify(const Config& cfg) {
    GridPtr grid = parse_grid(cfg.grid);
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    std::vector<Report> reports;
    bool known = false;
    const bool all = cfg.suite == "all";
    if ((all || cfg.suite == "kahler") && grid->is_torus()) {
        suite_kahler(grid, rng, cfg.tol, reports);
        known = true;
    }
    if (all || cfg.suite == "ebin") {
        suite_ebin(grid, rng, cfg.tol, reports);
        known = true;
    }
    if (all || cfg.suite == "density") {
        suite_density(grid, rng, cfg.tol, reports);
        known = true;
    }
    if (!known) throw UsageError("unknown or inapplicable suite: " + cfg.suite);
    write_artifacts(cfg, reports);
    return all_pass(reports) ? 0 : 1;
}

// ---- geodesic -------------------------------------------------------------

int cmd_geodesic(const Config& cfg) {
    GridPtr grid = parse_grid(cfg.grid);
    if (!grid->is_torus()) throw UsageError("geodesic runs on torus grids");
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    SymTensorField g0 =
        kahler::potential_to_metric(random_potential(grid, rng, 0.3));
    SymTensorField h = cfg.amplitude * random_sym_tensor(grid, rng, 1.0);
    ebin::GeodesicResult res = ebin::geodesic(g0, h, cfg.t_end, 200);
    fs::create_directories(cfg.out);
    io::save_metric_path(res.path, fs::path(cfg.out) / "geodesic", "geodesic");

    std::vector<Report> reports;
    reports.push_back(
        Report::boolean("geodesic: completed without degeneration",
                        !res.degenerate));
    reports.push_back(Report::relative(
        "geodesic: constant speed", ebin::path_length(res.path),
        ebin::norm(g0, h) * res.path.times.back(), 1e-4));
    write_artifacts(cfg, reports);
    if (res.degenerate) return 3;
    return all_pass(reports) ? 0 : 1;
}

// ---- distance / equivalence ----------------------------------------------

int cmd_distance(const Config& cfg) {
    GridPtr grid = parse_grid(cfg.grid);
    if (cfg.pair != "random" && cfg.pair != "bump")
        throw UsageError("unknown pair family: " + cfg.pair);
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    std::vector<Report> reports;
    std::ofstream csv;
    fs::create_directories(cfg.out);
    csv.open(fs::path(cfg.out) / "distances.csv");
    csv << "trial,d_V,d_tilde_V,ratio\n";
    for (int trial = 0; trial < cfg.count; ++trial) {
        Density mu1, mu2;
        if (cfg.pair == "bump") {
            auto pair = dens::bump_pair(grid, 1e-4 * (trial + 1));
            mu1 = pair.first;
            mu2 = pair.second;
        } else {
            mu1 = dens::random_density(grid, rng, 0.5);
            mu2 = dens::random_density(grid, rng, 0.5);
        }
        const double dv = dens::dV_distance(mu1, mu2);
        const double dt = dens::dtildeV_distance(mu1, mu2);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", trial, dv, dt,
                      dt > 0 ? dv / dt : 1.0);
        csv << buf;
        for (auto& r : dens::equivalence_check(mu1, mu2))
            reports.push_back(std::move(r));
    }
    write_artifacts(cfg, reports);
    return all_pass(reports) ? 0 : 1;
}

int cmd_equivalence(const Config& cfg) {
    GridPtr grid = parse_grid(cfg.grid);
    if (!grid->is_torus()) throw UsageError("equivalence runs on torus grids");
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    std::vector<Report> reports;
    for (int trial = 0; trial < cfg.count; ++trial) {
        ScalarField phi1 = random_potential(grid, rng);
        ScalarField phi2 = random_potential(grid, rng);
        for (auto& r : kahler::equivalence_chain_check(phi1, phi2, 33))
            reports.push_back(std::move(r));
    }
    write_artifacts(cfg, reports);
    return all_pass(reports) ? 0 : 1;
}

// ---- flow -----------------------------------------------------------------

int cmd_flow(const Config& cfg) {
    GridPtr grid = parse_grid(cfg.grid);
    if (grid->is_torus()) throw UsageError("flow runs on the sphere grid");
    int mode = 2;
    if (cfg.initial.rfind("mode:", 0) == 0) {
        try {
            mode = std::stoi(cfg.initial.substr(5));
        } catch (const std::exception&) {
            throw UsageError("bad --initial: " + cfg.initial);
        }
    } else {
        throw UsageError("unknown initial family: " + cfg.initial);
    }
    krf::FlowControls controls;
    controls.t_end = cfg.t_end;
    controls.dt0 = cfg.dt0;
    krf::FlowTrajectory traj =
        krf::krf_integrate(krf::legendre_mode(grid, mode, cfg.amplitude),
                           controls);

    fs::create_directories(cfg.out);
    {
        std::ofstream csv(fs::path(cfg.out) / "trajectory.csv");
        csv << "t,s_minus_n_l2,sup_phidot,phi_c0,cum_dC_length\n";
        for (std::size_t j = 0; j < traj.times.size(); ++j) {
            char buf[192];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          traj.times[j], traj.s_l2[j], traj.sup_phidot[j],
                          traj.phi_c0[j], traj.cum_dC[j]);
            csv << buf;
        }
    }
    krf::ConvergenceReport rep = krf::convergence_report(traj);
    std::vector<Report> reports = rep.checks;
    reports.push_back(Report::boolean("krf: status converged",
                                      rep.status == "converged"));
    write_artifacts(cfg, reports);
    if (traj.aborted) return 3;
    return all_pass(reports) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometry of spaces of Kahler metrics and volume forms: "
                 "verification and experiment driver"};
    app.require_subcommand(1);

    Config cfg;
    std::map<std::string, CLI::App*> subs;
    for (const char* name :
         {"verify", "geodesic", "distance", "flow", "equivalence"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--grid", cfg.grid, "topology:resolution");
        sub->add_option("--seed", cfg.seed, "deterministic seed");
        sub->add_option("--tol", cfg.tol, "tolerance override");
        sub->add_option("--out", cfg.out, "output directory");
        sub->add_option("--suite", cfg.suite, "verify suite");
        sub->add_option("--pair", cfg.pair, "distance pair family");
        sub->add_option("--count", cfg.count, "number of trials");
        sub->add_option("--initial", cfg.initial, "flow initial data");
        sub->add_option("--amplitude", cfg.amplitude, "initial amplitude");
        sub->add_option("--t-end", cfg.t_end, "final time");
        sub->add_option("--dt0", cfg.dt0, "initial step size");
        sub->add_option("--config", cfg.config_file, "key = value file");
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        for (const auto& [name, sub] : subs)
            if (sub->parsed()) {
                cfg.command = name;
                apply_config_file(cfg, sub);
            }
        if (cfg.command == "verify") return cmd_verify(cfg);
        if (cfg.command == "geodesic") return cmd_geodesic(cfg);
        if (cfg.command == "distance") return cmd_distance(cfg);
        if (cfg.command == "flow") return cmd_flow(cfg);
        if (cfg.command == "equivalence") return cmd_equivalence(cfg);
        std::fprintf(stderr, "no command given\n");
        return 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
