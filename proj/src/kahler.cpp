#include "calgeo/kahler.hpp"
#include "calgeo/ebin.hpp"
#include "calgeo/reduce.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace calgeo::kahler {

namespace {
constexpr double pi = std::numbers::pi;
} // namespace

ScalarField normalize_potential(const ScalarField& phi) {
    ScalarField out = phi;
    const double m = mean_ref(phi);
    for (auto& x : out.v) x -= m;
    return out;
}

PositivityError check_positivity(const ScalarField& phi) {
    SymTensorField g = reference_metric(phi.grid) + nabla11(phi);
    PositivityError err;
    err.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < g.grid->nodes; ++p) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            Eigen::MatrixXd(g.node(p)), Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        if (lo < err.min_eigenvalue) {
            err.min_eigenvalue = lo;
            err.worst_node = p;
        }
    }
    err.positive = err.min_eigenvalue > 0.0;
    return err;
}

SymTensorField potential_to_metric(const ScalarField& phi) {
    PositivityError err = check_positivity(phi);
    if (!err.positive) {
        std::ostringstream os;
        os << "potential_to_metric: positivity fails at node " << err.worst_node
           << " (min eigenvalue " << err.min_eigenvalue << ")";
        throw std::domain_error(os.str());
    }
    return reference_metric(phi.grid) + nabla11(phi);
}

ScalarField laplacian_phi(const ScalarField& phi, const ScalarField& nu) {
    return laplacian_at(potential_to_metric(phi), nu);
}

double calabi_inner(const ScalarField& phi, const ScalarField& nu,
                    const ScalarField& eta) {
    SymTensorField g = potential_to_metric(phi);
    ScalarField ln = laplacian_at(g, nu);
    ScalarField le = laplacian_at(g, eta);
    Density mu = riemannian_volume(g);
    ScalarField prod(phi.grid);
    for (std::size_t i = 0; i < prod.size(); ++i) prod.v[i] = ln.v[i] * le.v[i];
    return integrate(prod, mu);
}

double calabi_inner_ddbar(const ScalarField& phi, const ScalarField& nu,
                          const ScalarField& eta) {
    if (!phi.grid->is_torus())
        throw std::invalid_argument("calabi_inner_ddbar: torus grids only");
    SymTensorField g = potential_to_metric(phi);
    HermitianField G = real_to_hermitian(g);
    HermitianField Hn = complex_hessian(nu);
    HermitianField He = complex_hessian(eta);
    Density mu = riemannian_volume(g);
    const int n = phi.grid->complex_dim;
    ScalarField prod(phi.grid);
    using CMat = Eigen::MatrixXcd;
    for (std::size_t p = 0; p < phi.grid->nodes; ++p) {
        CMat Gm(n, n), Nn(n, n), Ne(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Gm(i, j) = G.at(p, i, j);
                Nn(i, j) = Hn.at(p, i, j);
                Ne(i, j) = He.at(p, i, j);
            }
        const CMat Gi = Gm.inverse();
        prod.v[p] = ((Gi * Nn).trace() * (Gi * Ne).trace()).real();
    }
    return integrate(prod, mu);
}

ScalarField ddbar_pairing(const SymTensorField& g_phi, const ScalarField& nu,
                          const ScalarField& eta) {
    ScalarField tp = pointwise_trace_pair(g_phi, nabla11(nu), nabla11(eta));
    ScalarField out(nu.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] = 0.5 * tp.v[i];
    return out;
}

Report check_isometric_embedding(const ScalarField& phi, const ScalarField& nu,
                                 const ScalarField& eta, double tol) {
    SymTensorField g = potential_to_metric(phi);
    const double lhs = ebin::inner(g, nabla11(nu), nabla11(eta));
    const double rhs = 2.0 * calabi_inner(phi, nu, eta);
    return Report::relative("kahler: g_E(d iota nu, d iota eta) = 2 g_C(nu, eta)",
                            lhs, rhs, tol, 1e-12);
}

Report trace_pairing_identity(const ScalarField& phi, const SymTensorField& h,
                              const SymTensorField& k, double tol) {
    if (phi.grid->is_torus()) {
        const double hs = std::max(max_abs_tensor(h), max_abs_tensor(k));
        SymTensorField dh = h - j_invariant_projection(h);
        SymTensorField dk = k - j_invariant_projection(k);
        if (std::max(max_abs_tensor(dh), max_abs_tensor(dk)) > 1e-10 * std::max(1.0, hs))
            throw std::invalid_argument(
                "trace_pairing_identity: tangent is not J-invariant");
    }
    SymTensorField g = potential_to_metric(phi);
    const double lhs = ebin::inner(g, h, k);
    ScalarField th = pointwise_trace(g, h);
    ScalarField tk = pointwise_trace(g, k);
    ScalarField prod(phi.grid);
    for (std::size_t i = 0; i < prod.size(); ++i) prod.v[i] = th.v[i] * tk.v[i];
    const double rhs = 0.5 * integrate(prod, riemannian_volume(g));
    return Report::relative("kahler: g_E(h,k) = tr-pairing", lhs, rhs, tol, 1e-12);
}

namespace {

// Preconditioned CG for -F Lap_phi u = b on the mean-zero subspace,
// quadrature-weighted inner product, flat spectral preconditioner.
ScalarField solve_weighted_laplacian(const SymTensorField& g_phi,
                                     const Density& mu_phi,
                                     const ScalarField& b_in) {
    const GridPtr& grid = b_in.grid;
    auto wdot = [&](const ScalarField& a, const ScalarField& c) {
        std::vector<double> terms(grid->nodes);
        for (std::size_t i = 0; i < terms.size(); ++i)
            terms[i] = grid->weights[i] * a.v[i] * c.v[i];
        return pairwise_sum(terms);
    };
    auto project = [&](ScalarField& f) {
        const double m = mean_ref(f);
        for (auto& x : f.v) x -= m;
    };
    auto apply = [&](const ScalarField& u) {
        ScalarField lap = laplacian_at(g_phi, u);
        ScalarField out(grid);
        for (std::size_t i = 0; i < out.size(); ++i)
            out.v[i] = -mu_phi.ratio[i] * lap.v[i];
        project(out);
        return out;
    };
    auto precond = [&](const ScalarField& r) {
        ScalarField neg(grid);
        for (std::size_t i = 0; i < neg.size(); ++i) neg.v[i] = -r.v[i];
        return inv_laplacian_ref(neg);  // (-Lap_0)^{-1} r
    };

    ScalarField b = b_in;
    project(b);
    const double bnorm = std::sqrt(wdot(b, b));
    ScalarField x(grid, 0.0);
    if (bnorm == 0.0) return x;

    ScalarField r = b;
    ScalarField z = precond(r);
    ScalarField p = z;
    double rz = wdot(r, z);
    const int max_iter = 20000;
    for (int it = 0; it < max_iter; ++it) {
        ScalarField Ap = apply(p);
        const double alpha = rz / wdot(p, Ap);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x.v[i] += alpha * p.v[i];
            r.v[i] -= alpha * Ap.v[i];
        }
        if (std::sqrt(wdot(r, r)) <= 1e-10 * bnorm) return x;
        z = precond(r);
        const double rz_new = wdot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < p.size(); ++i)
            p.v[i] = z.v[i] + beta * p.v[i];
    }
    throw std::runtime_error("calabi_connection: PCG did not converge");
}

} // namespace

ScalarField calabi_connection(const ScalarField& phi, const ScalarField& nu,
                              const ScalarField& eta) {
    if (!phi.grid->is_torus())
        throw std::invalid_argument("calabi_connection: torus grids only");
    SymTensorField g = potential_to_metric(phi);
    Density mu = riemannian_volume(g);
    const double V = phi.grid->total_volume;

    ScalarField ln = laplacian_at(g, nu);
    ScalarField le = laplacian_at(g, eta);
    ScalarField pair = ddbar_pairing(g, nu, eta);
    ScalarField prod(phi.grid);
    for (std::size_t i = 0; i < prod.size(); ++i) prod.v[i] = ln.v[i] * le.v[i];
    const double mean_term = integrate(prod, mu) / (2.0 * V);

    ScalarField r(phi.grid);
    double rmax = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.v[i] = 0.5 * prod.v[i] + mean_term - pair.v[i];
        rmax = std::max(rmax, std::abs(r.v[i]));
    }
    if (std::abs(integrate(r, mu)) > 1e-9 * std::max(1.0, rmax * V))
        throw std::runtime_error(
            "calabi_connection: right-hand side is not mean-zero against "
            "omega_phi^n (quadrature inconsistency)");

    // Lap_phi w = r  <=>  (-F Lap_phi) w = -F r
    ScalarField b(phi.grid);
    for (std::size_t i = 0; i < b.size(); ++i) b.v[i] = -mu.ratio[i] * r.v[i];
    ScalarField w = solve_weighted_laplacian(g, mu, b);
    const double gauge = integrate(w, mu) / V;
    for (auto& x : w.v) x -= gauge;
    return w;
}

ScalarField second_fundamental_trace(const ScalarField& phi,
                                     const ScalarField& nu,
                                     const ScalarField& eta) {
    SymTensorField g = potential_to_metric(phi);
    SymTensorField h = nabla11(nu);
    SymTensorField k = nabla11(eta);
    const double n = phi.grid->complex_dim;
    const double V = phi.grid->total_volume;
    const double gE = ebin::inner(g, h, k);
    ScalarField tp = pointwise_trace_pair(g, h, k);
    ScalarField th = pointwise_trace(g, h);
    ScalarField tk = pointwise_trace(g, k);
    ScalarField out(phi.grid);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.v[i] = -0.5 * n * tp.v[i] + 0.25 * th.v[i] * tk.v[i] -
                   gE / (2.0 * V);
    return out;
}

double conformal_angle(int n) { return std::acos(1.0 / std::sqrt(double(n))); }

Report angle_check(const SymTensorField& g_phi, const SymTensorField& h,
                   double tol) {
    if (max_abs_tensor(h) == 0.0)
        throw std::invalid_argument("angle_check: h = 0");
    const int n = g_phi.grid->complex_dim;
    Density mu = riemannian_volume(g_phi);
    ScalarField tau = pointwise_trace(g_phi, h);
    ScalarField tau2(g_phi.grid);
    for (std::size_t i = 0; i < tau2.size(); ++i)
        tau2.v[i] = tau.v[i] * tau.v[i];
    const double tau_norm = std::sqrt(integrate(tau2, mu));
    const double h_norm = ebin::norm(g_phi, h);
    const double cosine = tau_norm / (std::sqrt(2.0 * n) * h_norm);
    return Report::relative("kahler: max conformal cosine = n^{-1/2}", cosine,
                            1.0 / std::sqrt(double(n)), tol);
}

Density volume_form(const ScalarField& phi) {
    return riemannian_volume(potential_to_metric(phi));
}

double dC_distance(const ScalarField& phi1, const ScalarField& phi2) {
    return dens::dV_distance(volume_form(phi1), volume_form(phi2));
}

ScalarField potential_from_volume(const Density& mu) {
    if (mu.grid->topology != Topology::Torus2D)
        throw std::invalid_argument(
            "potential_from_volume: linear inversion exists only on the "
            "2-torus (n = 1)");
    ScalarField rhs(mu.grid);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs.v[i] = mu.ratio[i] - 1.0;
    return inv_laplacian_ref(rhs);
}

MetricPath lift_calabi_geodesic(const ScalarField& phi1, const ScalarField& phi2,
                                int samples) {
    Density mu1 = volume_form(phi1);
    Density mu2 = volume_form(phi2);
    const double T = dens::geodesic_length(mu1, mu2);
    MetricPath path;
    path.grid = phi1.grid;
    for (int j = 0; j < samples; ++j) {
        const double t = T * j / (samples - 1);
        Density mu = dens::calabi_geodesic(mu1, mu2, t);
        ScalarField phi = potential_from_volume(mu);
        path.times.push_back(t);
        path.metrics.push_back(potential_to_metric(phi));
    }
    return path;
}

std::vector<Report> equivalence_chain_check(const ScalarField& phi1,
                                            const ScalarField& phi2,
                                            int samples) {
    const int n = phi1.grid->complex_dim;
    Density mu1 = volume_form(phi1);
    Density mu2 = volume_form(phi2);
    const double dC = dens::dV_distance(mu1, mu2);
    const double dtilde = dens::dtildeV_distance(mu1, mu2);

    std::vector<Report> reports;
    {
        const double cap = pi / (2.0 * std::sqrt(2.0)) * dtilde;
        Report a = Report::leq("chain (a): d_C < pi/(2 sqrt2) dtilde_V", dC, cap);
        a.pass = (dtilde == 0.0) ? (dC <= 0.0) : (dC < cap);
        reports.push_back(a);
    }

    // trial path 1: the affine segment (stays in H by affinity of phi -> g_phi)
    MetricPath affine;
    affine.grid = phi1.grid;
    for (int j = 0; j < samples; ++j) {
        const double t = double(j) / (samples - 1);
        ScalarField phi(phi1.grid);
        for (std::size_t i = 0; i < phi.size(); ++i)
            phi.v[i] = (1.0 - t) * phi1.v[i] + t * phi2.v[i];
        affine.times.push_back(t);
        affine.metrics.push_back(potential_to_metric(phi));
    }
    const double LE_affine = ebin::path_length(affine);
    reports.push_back(Report::leq("chain (b): dtilde_V <= sqrt(n/2) L_E(affine)",
                                  dtilde, std::sqrt(0.5 * n) * LE_affine,
                                  1e-10 * std::max(1.0, LE_affine)));

    if (phi1.grid->topology == Topology::Torus2D) {
        MetricPath lifted = lift_calabi_geodesic(phi1, phi2, samples);
        const double LE_lift = ebin::path_length(lifted);
        reports.push_back(
            Report::leq("chain (b): dtilde_V <= sqrt(n/2) L_E(lifted geodesic)",
                        dtilde, std::sqrt(0.5 * n) * LE_lift,
                        1e-10 * std::max(1.0, LE_lift)));
        // discretization of the path dominates the error budget here
        reports.push_back(Report::relative(
            "chain (c): L_E(lifted geodesic) = sqrt(2) d_C", LE_lift,
            std::sqrt(2.0) * dC, 5e-3, 1e-12));
    }
    return reports;
}

} // namespace calgeo::kahler
