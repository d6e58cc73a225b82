#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "calgeo/ebin.hpp"
#include "calgeo/io.hpp"
#include "calgeo/ops.hpp"

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

using namespace calgeo;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir() {
    fs::path dir = fs::temp_directory_path() / "calgeo_io_test";
    fs::create_directories(dir);
    return dir;
}
}

TEST_CASE("scalar field round trip is bit exact") {
    for (auto grid : {GridSpec::torus2d(16), GridSpec::torus4d(8),
                      GridSpec::sphere_axisym(64)}) {
        std::mt19937_64 rng(163);
        ScalarField f = random_smooth_field(grid, rng, 1.0);
        fs::path p = temp_dir() / "scalar.csv";
        io::save_scalar(f, p);
        ScalarField g = io::load_scalar(p);
        CHECK(g.grid->topology == grid->topology);
        CHECK(g.grid->resolution == grid->resolution);
        CHECK(g.v == f.v);
    }
}

TEST_CASE("density and tensor round trips are bit exact") {
    auto grid = GridSpec::torus2d(16);
    std::mt19937_64 rng(167);
    Density mu(grid);
    for (auto& r : mu.ratio) r = std::exp(0.3 * (rng() % 100) / 100.0);
    mu.recompute_total();
    fs::path dp = temp_dir() / "density.csv";
    io::save_density(mu, dp);
    Density nu = io::load_density(dp);
    CHECK(nu.ratio == mu.ratio);
    CHECK(nu.total == mu.total);

    SymTensorField h = random_sym_tensor(grid, rng, 1.0);
    fs::path tp = temp_dir() / "tensor.csv";
    io::save_tensor(h, tp);
    SymTensorField k = io::load_tensor(tp);
    CHECK(k.v == h.v);
}

TEST_CASE("sidecar metadata") {
    auto grid = GridSpec::torus2d(16);
    ScalarField f(grid, 0.5);
    fs::path p = temp_dir() / "meta.csv";
    io::save_scalar(f, p);
    std::ifstream in(p.string() + ".json");
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    CHECK(j.at("topology") == "torus2d");
    CHECK(j.at("resolution") == 16);
    CHECK(j.at("convention_version") == io::convention_version);
}

TEST_CASE("metric path round trip") {
    auto grid = GridSpec::torus2d(16);
    std::mt19937_64 rng(173);
    SymTensorField g0 = reference_metric(grid) + random_sym_tensor(grid, rng, 0.05);
    SymTensorField h = random_sym_tensor(grid, rng, 0.3);
    ebin::GeodesicResult res = ebin::geodesic(g0, h, 0.2, 8);
    fs::path dir = temp_dir() / "path";
    io::save_metric_path(res.path, dir, "geodesic");
    MetricPath back = io::load_metric_path(dir);
    REQUIRE(back.times.size() == res.path.times.size());
    CHECK(back.times == res.path.times);
    for (std::size_t j = 0; j < back.metrics.size(); ++j)
        CHECK(back.metrics[j].v == res.path.metrics[j].v);
}
