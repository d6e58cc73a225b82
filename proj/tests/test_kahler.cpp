#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "calgeo/ebin.hpp"
#include "calgeo/kahler.hpp"
#include "calgeo/ops.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace calgeo;
using namespace calgeo::kahler;
namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

ScalarField sin_mode(const GridPtr& grid, int axis = 0) {
    ScalarField f(grid);
    for (std::size_t p = 0; p < grid->nodes; ++p)
        f.v[p] = std::sin(two_pi * grid->coord(p, axis));
    return f;
}

// Random potential scaled so the metric stays safely positive:
// smallest eigenvalue of g_phi at least 1 - strength.
ScalarField random_potential(const GridPtr& grid, std::mt19937_64& rng,
                             double strength = 0.5) {
    ScalarField f = random_smooth_field(grid, rng, 1.0);
    SymTensorField h = nabla11(f);
    double worst = 0.0;
    for (std::size_t p = 0; p < grid->nodes; ++p) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            Eigen::MatrixXd(h.node(p)), Eigen::EigenvaluesOnly);
        worst = std::max(worst, -es.eigenvalues().minCoeff());
    }
    const double scale = (worst > 0.0) ? strength / worst : 1.0;
    return normalize_potential(scale * f);
}
}

TEST_CASE("potential to metric: reference, affinity, positivity error") {
    auto grid = GridSpec::torus2d(64);
    ScalarField zero(grid);
    CHECK(max_abs_tensor(potential_to_metric(zero) - reference_metric(grid)) == 0.0);

    std::mt19937_64 rng(103);
    ScalarField phi = random_potential(grid, rng, 0.2);
    ScalarField f = random_potential(grid, rng, 0.2);
    ScalarField phif(grid);
    for (std::size_t p = 0; p < grid->nodes; ++p)
        phif.v[p] = phi.v[p] + f.v[p];
    SymTensorField d1 = potential_to_metric(phif) - potential_to_metric(phi);
    SymTensorField d2 = potential_to_metric(f) - potential_to_metric(zero);
    CHECK(max_abs_tensor(d1 - d2) < 1e-13);

    // critical amplitude for phi = eps sin(2 pi x1) at n = 1: eps* = 1/(2 pi^2)
    const double crit = 1.0 / (2.0 * pi * pi);
    CHECK_NOTHROW(potential_to_metric(0.99 * crit * sin_mode(grid)));
    CHECK_THROWS_AS(potential_to_metric(1.01 * crit * sin_mode(grid)),
                    std::domain_error);
    PositivityError err = check_positivity(1.01 * crit * sin_mode(grid));
    CHECK(!err.positive);
    CHECK(err.min_eigenvalue < 0.0);
    // worst node sits where sin is maximal: x1 = 1/4
    CHECK(grid->coord(err.worst_node, 0) == doctest::Approx(0.25));
}

TEST_CASE("frozen Calabi inner product value") {
    auto grid = GridSpec::torus2d(64);
    ScalarField zero(grid);
    ScalarField nu = sin_mode(grid);
    CHECK(calabi_inner(zero, nu, nu) ==
          doctest::Approx(2.0 * std::pow(pi, 4)).epsilon(1e-12));
    CHECK(calabi_inner(zero, zero, nu) == doctest::Approx(0.0));
}

TEST_CASE("Laplacian and ddbar routes agree") {
    for (auto grid : {GridSpec::torus2d(32), GridSpec::torus4d(8)}) {
        std::mt19937_64 rng(107);
        ScalarField phi =
            random_potential(grid, rng, 0.4);
        ScalarField nu = random_smooth_field(grid, rng, 1.0);
        ScalarField eta = random_smooth_field(grid, rng, 1.0);
        const double a = calabi_inner(phi, nu, eta);
        const double b = calabi_inner_ddbar(phi, nu, eta);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("isometric embedding identity, flat and curved") {
    for (auto grid : {GridSpec::torus2d(32), GridSpec::torus4d(8)}) {
        ScalarField zero(grid);
        ScalarField nu = sin_mode(grid);
        CHECK(check_isometric_embedding(zero, nu, nu, 1e-10).pass);

        std::mt19937_64 rng(109);
        ScalarField phi =
            random_potential(grid, rng, 0.4);
        for (int trial = 0; trial < 5; ++trial) {
            ScalarField a = random_smooth_field(grid, rng, 1.0);
            ScalarField b = random_smooth_field(grid, rng, 1.0);
            CHECK(check_isometric_embedding(phi, a, b, 1e-8).pass);
        }
    }
}

TEST_CASE("trace pairing identity and the trace-part norm ratio") {
    for (auto grid : {GridSpec::torus2d(32), GridSpec::torus4d(8)}) {
        std::mt19937_64 rng(113);
        ScalarField phi =
            random_potential(grid, rng, 0.4);
        SymTensorField g = potential_to_metric(phi);
        const double n = grid->complex_dim;
        for (int trial = 0; trial < 5; ++trial) {
            ScalarField nu = random_smooth_field(grid, rng, 1.0);
            SymTensorField h = nabla11(nu);
            CHECK(trace_pairing_identity(phi, h, h, 1e-8).pass);
            ebin::TangentSplit s = ebin::tangent_split(g, h);
            CHECK(ebin::norm(g, s.horizontal) ==
                  doctest::Approx(ebin::norm(g, h) / std::sqrt(n)).epsilon(1e-8));
        }
        CHECK_THROWS(trace_pairing_identity(
            phi, random_sym_tensor(grid, rng, 1.0), nabla11(phi), 1e-8));
    }
}

TEST_CASE("conformal angle") {
    CHECK(conformal_angle(1) == doctest::Approx(0.0));
    CHECK(conformal_angle(2) == doctest::Approx(pi / 4.0).epsilon(1e-14));
    for (auto grid : {GridSpec::torus2d(32), GridSpec::torus4d(8)}) {
        std::mt19937_64 rng(127);
        ScalarField phi =
            random_potential(grid, rng, 0.4);
        SymTensorField g = potential_to_metric(phi);
        const double n = grid->complex_dim;
        ScalarField nu = random_smooth_field(grid, rng, 1.0);
        SymTensorField h = nabla11(nu);
        CHECK(angle_check(g, h, 1e-8).pass);

        // brute-force Rayleigh scan over random conformal factors
        Density mu = riemannian_volume(g);
        ScalarField tau = pointwise_trace(g, h);
        const double hn = ebin::norm(g, h);
        double best = 0.0;
        for (int trial = 0; trial < 30; ++trial) {
            ScalarField rho = random_smooth_field(grid, rng, 1.0);
            ScalarField num(grid), den(grid);
            for (std::size_t p = 0; p < grid->nodes; ++p) {
                num.v[p] = rho.v[p] * tau.v[p];
                den.v[p] = rho.v[p] * rho.v[p];
            }
            const double cosine = integrate(num, mu) /
                                  (std::sqrt(2.0 * n * integrate(den, mu)) * hn);
            best = std::max(best, std::abs(cosine));
        }
        CHECK(best <= 1.0 / std::sqrt(n) + 1e-8);
    }
}

TEST_CASE("Calabi connection: frozen flat value") {
    auto grid = GridSpec::torus2d(64);
    ScalarField zero(grid);
    ScalarField nu = sin_mode(grid);
    ScalarField w = calabi_connection(zero, nu, nu);
    // closed form at the flat reference: -(pi^2 / 8) cos(4 pi x1)
    for (std::size_t p = 0; p < grid->nodes; ++p)
        CHECK(w.v[p] ==
              doctest::Approx(-pi * pi / 8.0 *
                              std::cos(2.0 * two_pi * grid->coord(p, 0)))
                  .epsilon(1e-8));
}

TEST_CASE("Calabi connection matches the Koszul finite-difference oracle") {
    auto grid = GridSpec::torus2d(32);
    std::mt19937_64 rng(131);
    ScalarField phi =
        random_potential(grid, rng, 0.5);
    ScalarField nu = random_smooth_field(grid, rng, 1.0);
    ScalarField eta = random_smooth_field(grid, rng, 1.0);
    ScalarField w = calabi_connection(phi, nu, eta);

    auto perturb = [&](const ScalarField& dir, double eps) {
        ScalarField out(grid);
        for (std::size_t p = 0; p < grid->nodes; ++p)
            out.v[p] = phi.v[p] + eps * dir.v[p];
        return out;
    };
    const double eps = 1e-5;
    for (int trial = 0; trial < 3; ++trial) {
        ScalarField zeta = random_smooth_field(grid, rng, 1.0);
        auto D = [&](const ScalarField& dir, const ScalarField& a,
                     const ScalarField& b) {
            return (calabi_inner(perturb(dir, eps), a, b) -
                    calabi_inner(perturb(dir, -eps), a, b)) / (2.0 * eps);
        };
        const double koszul = D(nu, eta, zeta) + D(eta, nu, zeta) - D(zeta, nu, eta);
        const double lhs = 2.0 * calabi_inner(phi, w, zeta);
        CHECK(lhs == doctest::Approx(koszul).epsilon(1e-4));
    }
}

TEST_CASE("second fundamental form trace") {
    for (auto grid : {GridSpec::torus2d(32), GridSpec::torus4d(8)}) {
        std::mt19937_64 rng(137);
        ScalarField phi =
            random_potential(grid, rng, 0.4);
        SymTensorField g = potential_to_metric(phi);
        Density mu = riemannian_volume(g);
        const double n = grid->complex_dim;
        ScalarField nu = random_smooth_field(grid, rng, 1.0);
        SymTensorField h = nabla11(nu);

        ScalarField ii = second_fundamental_trace(phi, nu, nu);
        const double pairing = integrate(ii, mu);
        const double expect = -0.5 * n * ebin::inner(g, h, h);
        CHECK(pairing == doctest::Approx(expect).epsilon(1e-8));
        CHECK(pairing < 0.0);  // no g_C-geodesic is a g_E-geodesic
    }
}

TEST_CASE("II trace agrees with the difference of the two connections") {
    auto grid = GridSpec::torus2d(32);
    std::mt19937_64 rng(139);
    ScalarField phi =
        random_potential(grid, rng, 0.4);
    SymTensorField g = potential_to_metric(phi);
    ScalarField nu = random_smooth_field(grid, rng, 1.0);
    ScalarField eta = random_smooth_field(grid, rng, 1.0);
    SymTensorField h = nabla11(nu), k = nabla11(eta);

    ScalarField ii = second_fundamental_trace(phi, nu, eta);
    SymTensorField amb = ebin::connection(g, h, k);
    ScalarField tr_amb = pointwise_trace(g, amb);
    ScalarField conn = calabi_connection(phi, nu, eta);
    ScalarField lap_conn = laplacian_at(g, conn);
    for (std::size_t p = 0; p < grid->nodes; ++p)
        CHECK(ii.v[p] == doctest::Approx(tr_amb.v[p] - 2.0 * lap_conn.v[p])
                             .epsilon(1e-6));
}

TEST_CASE("d_C distance and the n = 1 volume-form inversion") {
    auto grid = GridSpec::torus2d(32);
    std::mt19937_64 rng(149);
    ScalarField phi1 =
        random_potential(grid, rng, 0.4);
    ScalarField phi2 =
        random_potential(grid, rng, 0.4);
    CHECK(dC_distance(phi1, phi1) == doctest::Approx(0.0));
    // constants do not change the metric
    ScalarField shifted = phi1;
    for (auto& x : shifted.v) x += 0.37;
    CHECK(dC_distance(phi1, shifted) < 1e-10);
    CHECK(dC_distance(phi1, phi2) > 0.0);

    ScalarField back = potential_from_volume(volume_form(phi1));
    CHECK(max_abs(back - normalize_potential(phi1)) < 1e-10);
}

TEST_CASE("equivalence chain") {
    for (auto grid : {GridSpec::torus2d(32), GridSpec::torus4d(8)}) {
        std::mt19937_64 rng(151);
        for (int trial = 0; trial < 5; ++trial) {
            ScalarField phi1 =
                random_potential(grid, rng, 0.4);
            ScalarField phi2 =
                random_potential(grid, rng, 0.4);
            for (const auto& r : equivalence_chain_check(phi1, phi2, 65)) {
                INFO(r.check_name, " lhs=", r.lhs, " rhs=", r.rhs);
                CHECK(r.pass);
            }
        }
    }
}
