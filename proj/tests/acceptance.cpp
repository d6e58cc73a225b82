// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include "calgeo/density.hpp"
#include "calgeo/ebin.hpp"
#include "calgeo/kahler.hpp"
#include "calgeo/krf.hpp"
#include "calgeo/ops.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace calgeo;
namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-30});
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

std::vector<GridPtr> both_tori() {
    return {GridSpec::torus2d(64), GridSpec::torus4d(12)};
}

// ---- criterion 1: isometric embedding ------------------------------------
Outcome criterion_embedding() {
    Outcome out;
    for (auto grid : both_tori()) {
        std::mt19937_64 rng(1001);
        for (int trial = 0; trial < 20; ++trial) {
            ScalarField phi = random_potential(grid, rng);
            ScalarField nu = random_smooth_field(grid, rng, 1.0);
            ScalarField eta = random_smooth_field(grid, rng, 1.0);
            SymTensorField g = kahler::potential_to_metric(phi);
            const double lhs = ebin::inner(g, nabla11(nu), nabla11(eta));
            const double rhs = 2.0 * kahler::calabi_inner(phi, nu, eta);
            out.require(rel_close(lhs, rhs, 1e-8),
                        "embedding identity off at trial " + std::to_string(trial));
        }
    }
    return out;
}

// ---- criterion 2: trace pairing ------------------------------------------
Outcome criterion_trace_pairing() {
    Outcome out;
    for (auto grid : both_tori()) {
        std::mt19937_64 rng(1002);
        const double n = grid->complex_dim;
        for (int trial = 0; trial < 20; ++trial) {
            ScalarField phi = random_potential(grid, rng);
            ScalarField nu = random_smooth_field(grid, rng, 1.0);
            SymTensorField g = kahler::potential_to_metric(phi);
            SymTensorField h = nabla11(nu);
            out.require(kahler::trace_pairing_identity(phi, h, h, 1e-8).pass,
                        "trace pairing off at trial " + std::to_string(trial));
            ebin::TangentSplit s = ebin::tangent_split(g, h);
            out.require(rel_close(ebin::norm(g, s.horizontal),
                                  ebin::norm(g, h) / std::sqrt(n), 1e-8),
                        "trace-part norm ratio off at trial " +
                            std::to_string(trial));
        }
    }
    return out;
}

// ---- criterion 3: conformal angle ----------------------------------------
Outcome criterion_angle() {
    Outcome out;
    for (auto grid : both_tori()) {
        std::mt19937_64 rng(1003);
        const int n = grid->complex_dim;
        ScalarField phi = random_potential(grid, rng);
        SymTensorField g = kahler::potential_to_metric(phi);
        Density mu = riemannian_volume(g);
        for (int trial = 0; trial < 5; ++trial) {
            ScalarField nu = random_smooth_field(grid, rng, 1.0);
            SymTensorField h = nabla11(nu);
            ScalarField tau = pointwise_trace(g, h);
            ScalarField tau2(grid);
            for (std::size_t p = 0; p < grid->nodes; ++p)
                tau2.v[p] = tau.v[p] * tau.v[p];
            const double cosine = std::sqrt(integrate(tau2, mu)) /
                                  (std::sqrt(2.0 * n) * ebin::norm(g, h));
            const double angle = std::acos(std::min(1.0, cosine));
            const double expect = (n == 1) ? 0.0 : pi / 4.0;
            out.require(std::abs(angle - expect) <= 1e-6,
                        "angle off at n = " + std::to_string(n));
        }
    }
    return out;
}

// ---- criterion 4: II trace pairing ---------------------------------------
Outcome criterion_second_fundamental() {
    Outcome out;
    for (auto grid : both_tori()) {
        std::mt19937_64 rng(1004);
        const double n = grid->complex_dim;
        for (int trial = 0; trial < 20; ++trial) {
            ScalarField phi = random_potential(grid, rng);
            ScalarField nu = random_smooth_field(grid, rng, 1.0);
            SymTensorField g = kahler::potential_to_metric(phi);
            SymTensorField h = nabla11(nu);
            ScalarField ii = kahler::second_fundamental_trace(phi, nu, nu);
            const double pairing = integrate(ii, riemannian_volume(g));
            const double expect = -0.5 * n * ebin::inner(g, h, h);
            out.require(rel_close(pairing, expect, 1e-6),
                        "II pairing off at trial " + std::to_string(trial));
            out.require(pairing < 0.0, "II pairing not strictly negative");
        }
    }
    return out;
}

// ---- criterion 5: Calabi geodesics ---------------------------------------
Outcome criterion_calabi_geodesics() {
    Outcome out;
    auto grid = GridSpec::torus2d(64);
    std::mt19937_64 rng(1005);
    const double V = grid->total_volume;
    const double sV = std::sqrt(V);
    for (int trial = 0; trial < 5; ++trial) {
        Density mu1 = dens::random_density(grid, rng, 0.4);
        Density mu2 = dens::random_density(grid, rng, 0.4);
        const double T = dens::geodesic_length(mu1, mu2);
        const double den = std::sin(0.5 * T / sV);

        double worst_res = 0.0, worst_speed = 0.0;
        for (double frac : {0.15, 0.5, 0.85}) {
            const double t = frac * T;
            Density mid = dens::calabi_geodesic(mu1, mu2, t);
            std::vector<double> Ft(grid->nodes);
            for (std::size_t p = 0; p < grid->nodes; ++p) {
                const double s1 = std::sqrt(mu1.ratio[p]);
                const double s2 = std::sqrt(mu2.ratio[p]);
                const double w = (std::sin(0.5 * (T - t) / sV) * s1 +
                                  std::sin(0.5 * t / sV) * s2) / den;
                const double wt = (-std::cos(0.5 * (T - t) / sV) * s1 +
                                   std::cos(0.5 * t / sV) * s2) /
                                  (2.0 * sV * den);
                const double F = mid.ratio[p];
                const double F_t = 2.0 * w * wt;
                const double F_tt = 2.0 * wt * wt - w * w / (2.0 * V);
                worst_res = std::max(
                    worst_res,
                    std::abs(F_t * F_t - 2.0 * F_tt * F - F * F / V));
                Ft[p] = F_t;
            }
            ScalarField sq(grid);
            for (std::size_t p = 0; p < grid->nodes; ++p)
                sq.v[p] = Ft[p] * Ft[p] / mid.ratio[p];
            worst_speed = std::max(worst_speed,
                                   std::abs(integrate_ref(sq) - 1.0));
        }
        out.require(worst_res <= 1e-8, "geodesic equation residual too large");
        out.require(worst_speed <= 1e-8, "speed not constant");

        // length consistency through the endpoint samples
        Density start = dens::calabi_geodesic(mu1, mu2, 0.0);
        Density end = dens::calabi_geodesic(mu1, mu2, T);
        const double T2 = dens::geodesic_length(start, end);
        out.require(std::abs(T - T2) <= 1e-10, "length formula inconsistent");

        // terminal velocity display vs one-sided finite difference
        const double eps = 1e-6 * T;
        Density near_end = dens::calabi_geodesic(mu1, mu2, T - eps);
        double worst_vel = 0.0;
        for (std::size_t p = 0; p < grid->nodes; ++p) {
            const double F = mu1.ratio[p], G = mu2.ratio[p];
            const double formula =
                G / sV / std::tan(0.5 * T / sV) -
                std::sqrt(F * G) / (sV * std::sin(0.5 * T / sV));
            const double fd = (end.ratio[p] - near_end.ratio[p]) / eps;
            worst_vel = std::max(worst_vel, std::abs(formula - fd));
        }
        out.require(worst_vel <= 1e-6, "initial-velocity display off");
    }
    return out;
}

// ---- criterion 6: equivalence bounds -------------------------------------
Outcome criterion_equivalence_bounds() {
    Outcome out;
    auto grid = GridSpec::torus2d(32);
    std::mt19937_64 rng(1006);
    const double bound = pi / (2.0 * std::sqrt(2.0));
    for (int trial = 0; trial < 100; ++trial) {
        Density mu1 = dens::random_density(grid, rng, 0.5);
        Density mu2 = dens::random_density(grid, rng, 0.5);
        const double dv = dens::dV_distance(mu1, mu2);
        const double dt = dens::dtildeV_distance(mu1, mu2);
        out.require(dt <= dv, "weak inequality violated");
        out.require(dv < bound * dt, "strict inequality violated");
    }
    auto [b1, b2] = dens::bump_pair(GridSpec::torus2d(64), 1e-4);
    const double ratio =
        dens::dV_distance(b1, b2) / dens::dtildeV_distance(b1, b2);
    out.require(ratio >= 1.10 && ratio < bound,
                "bump-family ratio " + std::to_string(ratio));
    return out;
}

// ---- criterion 7: theorem chain ------------------------------------------
Outcome criterion_theorem_chain() {
    Outcome out;
    for (auto grid : {GridSpec::torus2d(32), GridSpec::torus4d(8)}) {
        std::mt19937_64 rng(1007);
        const int pairs = (grid->complex_dim == 1) ? 10 : 10;
        for (int trial = 0; trial < pairs; ++trial) {
            ScalarField phi1 = random_potential(grid, rng);
            ScalarField phi2 = random_potential(grid, rng);
            Density mu1 = kahler::volume_form(phi1);
            Density mu2 = kahler::volume_form(phi2);
            const double dv = dens::dV_distance(mu1, mu2);
            const double dt = dens::dtildeV_distance(mu1, mu2);
            out.require(dv < pi / (2.0 * std::sqrt(2.0)) * dt,
                        "chain (a) violated");
            for (const auto& r :
                 kahler::equivalence_chain_check(phi1, phi2, 65))
                out.require(r.pass, "chain report failed: " + r.check_name);

            if (grid->complex_dim == 1) {
                // constant-speed check of the lifted path at sampled times:
                // the Ebin speed of the lift equals sqrt(2) exactly, hence
                // L_E(lift) = sqrt(2) L_C to quadrature precision.
                const double V = grid->total_volume;
                const double sV = std::sqrt(V);
                const double T = dens::geodesic_length(mu1, mu2);
                const double den = std::sin(0.5 * T / sV);
                double worst = 0.0;
                for (double frac : {0.1, 0.5, 0.9}) {
                    const double t = frac * T;
                    Density mid = dens::calabi_geodesic(mu1, mu2, t);
                    SymTensorField g = kahler::potential_to_metric(
                        kahler::potential_from_volume(mid));
                    SymTensorField gdot(grid);
                    for (std::size_t p = 0; p < grid->nodes; ++p) {
                        const double s1 = std::sqrt(mu1.ratio[p]);
                        const double s2 = std::sqrt(mu2.ratio[p]);
                        const double w =
                            (std::sin(0.5 * (T - t) / sV) * s1 +
                             std::sin(0.5 * t / sV) * s2) / den;
                        const double wt =
                            (-std::cos(0.5 * (T - t) / sV) * s1 +
                             std::cos(0.5 * t / sV) * s2) / (2.0 * sV * den);
                        const double F_t = 2.0 * w * wt;
                        gdot.node(p)(0, 0) = F_t;
                        gdot.node(p)(1, 1) = F_t;
                    }
                    const double speed =
                        std::sqrt(ebin::inner(g, gdot, gdot));
                    worst = std::max(worst, std::abs(speed - std::sqrt(2.0)));
                }
                out.require(worst <= 1e-8,
                            "lifted path speed deviates from sqrt(2)");
            }
        }
    }
    return out;
}

// ---- criterion 8: geodesics leave the constraint sets --------------------
Outcome criterion_leaving() {
    Outcome out;
    auto grid = GridSpec::torus2d(32);
    std::mt19937_64 rng(1008);

    // ambient density geodesics from the leaf: double root of the mass level
    Density mu(grid);
    ScalarField a = random_smooth_field(grid, rng, 0.4);
    {
        const double m = mean_ref(a);
        for (auto& x : a.v) x -= m;
    }
    ScalarField a2(grid);
    for (std::size_t p = 0; p < grid->nodes; ++p) a2.v[p] = a.v[p] * a.v[p];
    const double n2 = integrate_ref(a2);
    for (double t : {0.2, 0.5, 1.0}) {
        Density mt = dens::ambient_geodesic(mu, a, t);
        out.require(rel_close(mt.total - grid->total_volume,
                              0.25 * t * t * n2, 1e-10),
                    "mass along the ray is not the expected quadratic");
    }

    // Ebin geodesics from a Kahler point
    ScalarField nu = random_smooth_field(grid, rng, 0.5);
    SymTensorField g0 = reference_metric(grid);
    ebin::IntersectionResult res =
        ebin::kahler_intersections(g0, nabla11(nu), 0.2);
    out.require(res.quadratic_fit_residual <= 1e-10,
                "volume not quadratic along the geodesic");
    out.require(res.times.size() == 2, "intersection count wrong");
    out.require(res.times.size() == 2 && res.times[0] == 0.0 &&
                    std::abs(res.times[1]) <= 1e-8,
                "intersections not a double root at t = 0");
    return out;
}

// ---- criterion 9: completion criteria ------------------------------------
Outcome criterion_completion() {
    Outcome out;
    auto grid = GridSpec::torus2d(32);
    std::mt19937_64 rng(1009);
    Density limit(grid);
    ScalarField dir = random_smooth_field(grid, rng, 0.5);
    {
        const double m = mean_ref(dir);
        for (auto& x : dir.v) x -= m;
    }

    std::vector<Density> convergent, divergent;
    for (int k = 0; k < 8; ++k) {
        Density muc(grid), mud(grid);
        const double eps = std::pow(10.0, -k - 3);
        const double s = (k % 2 == 0) ? 0.5 : -0.5;
        for (std::size_t p = 0; p < grid->nodes; ++p) {
            muc.ratio[p] = 1.0 + eps * dir.v[p];
            mud.ratio[p] = 1.0 + s * dir.v[p];
        }
        muc.recompute_total();
        mud.recompute_total();
        convergent.push_back(muc);
        divergent.push_back(mud);
    }
    for (const auto& r : dens::l1_convergence_check(convergent, limit, 1e-6))
        out.require(r.pass, "convergent-sequence check failed");
    out.require(dens::l1_convergence_check(divergent, limit, 1e-6)[0].pass,
                "divergent-sequence verdicts disagree");

    std::vector<ScalarField> fk;
    ScalarField f(grid, 1.0);
    for (int k = 0; k < 8; ++k) {
        ScalarField h(grid);
        const double eps = std::pow(10.0, -k - 3);
        for (std::size_t p = 0; p < grid->nodes; ++p)
            h.v[p] = 1.0 + eps * dir.v[p];
        fk.push_back(h);
    }
    for (const auto& r : dens::l1_l2_equivalence(fk, f, 1e-6))
        out.require(r.pass, "L1/L2 lemma suite failed");

    // boundary ray
    ScalarField G = dir;
    ScalarField G2(grid);
    for (std::size_t p = 0; p < grid->nodes; ++p) G2.v[p] = G.v[p] * G.v[p];
    const double nrm = std::sqrt(integrate_ref(G2));
    for (auto& x : G.v) x /= nrm;
    dens::BoundaryRay ray = dens::boundary_ray(Density(grid), G, 17);
    const double V = grid->total_volume;
    out.require(ray.t_max > 0.0 && ray.t_max < pi * std::sqrt(V),
                "T_max outside (0, pi sqrt V)");
    for (const auto& d : ray.densities)
        out.require(std::abs(d.total - V) <= 1e-10 * std::max(1.0, V),
                    "ray mass drifts from V");
    return out;
}

// ---- criterion 10: Kahler-Ricci flow -------------------------------------
Outcome criterion_krf() {
    Outcome out;
    auto grid = GridSpec::sphere_axisym(256);

    krf::FlowControls quick;
    quick.t_end = 1.0;
    krf::FlowTrajectory still = krf::krf_integrate(ScalarField(grid), quick);
    double c0 = 0.0;
    for (double x : still.phi_c0) c0 = std::max(c0, x);
    out.require(c0 <= 1e-10, "round metric not stationary");

    krf::FlowControls c;
    c.t_end = 30.0;
    bool coherent = true;
    for (double amp : {0.02, 0.05}) {
        krf::FlowTrajectory traj =
            krf::krf_integrate(krf::legendre_mode(grid, 2, amp), c);
        out.require(!traj.aborted, "flow aborted");
        out.require(traj.s_inf.back() <= 1e-3, "terminal |s-1|_inf too large");
        const double rate = krf::exponential_rate(traj);
        out.require(rate > 0.0, "fitted rate not positive");
        krf::FlowLength len = krf::dC_length_of_flow(traj);
        out.require(rel_close(len.curvature_integral, len.chordal_sum, 1e-4),
                    "length formulas disagree");
        krf::ConvergenceReport rep = krf::convergence_report(traj);
        const bool finite = std::isfinite(len.curvature_integral);
        coherent = coherent && ((rep.status == "converged") == finite);
    }
    out.require(coherent, "converged/finite-length coherence broken");
    return out;
}

} // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {"isometric embedding identity", criterion_embedding},
        {"trace pairing identity", criterion_trace_pairing},
        {"conformal angle", criterion_angle},
        {"second fundamental form trace pairing", criterion_second_fundamental},
        {"Calabi geodesic family", criterion_calabi_geodesics},
        {"distance equivalence bounds", criterion_equivalence_bounds},
        {"intrinsic/extrinsic theorem chain", criterion_theorem_chain},
        {"geodesics leave the constraint sets", criterion_leaving},
        {"completion criteria", criterion_completion},
        {"Kahler-Ricci flow convergence", criterion_krf},
    };
    int failures = 0;
    int id = 0;
    for (const auto& e : entries) {
        ++id;
        Outcome out = e.fn();
        if (out.pass) {
            std::printf("PASS criterion %d: %s\n", id, e.name);
        } else {
            ++failures;
            std::printf("FAIL criterion %d: %s (%s)\n", id, e.name,
                        out.detail.c_str());
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
