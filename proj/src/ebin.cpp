#include "calgeo/ebin.hpp"
#include "calgeo/reduce.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace calgeo::ebin {

double inner(const SymTensorField& g, const SymTensorField& h,
             const SymTensorField& k) {
    ScalarField tp = pointwise_trace_pair(g, h, k);
    return integrate(tp, riemannian_volume(g));
}

double norm(const SymTensorField& g, const SymTensorField& h) {
    return std::sqrt(inner(g, h, h));
}

Density submersion_pi(const SymTensorField& g) { return riemannian_volume(g); }

TangentSplit tangent_split(const SymTensorField& g, const SymTensorField& h) {
    const int d = g.d;
    ScalarField tr = pointwise_trace(g, h);
    TangentSplit s{SymTensorField(g.grid), SymTensorField(g.grid)};
    for (std::size_t p = 0; p < g.grid->nodes; ++p) {
        const double c = tr.v[p] / double(d);
        s.horizontal.node(p) = c * RowMat(g.node(p));
        s.vertical.node(p) = RowMat(h.node(p)) - RowMat(s.horizontal.node(p));
    }
    return s;
}

ScalarField submersion_differential(const SymTensorField& g,
                                    const SymTensorField& h) {
    ScalarField tr = pointwise_trace(g, h);
    Density mu = riemannian_volume(g);
    ScalarField alpha(g.grid);
    for (std::size_t p = 0; p < g.grid->nodes; ++p)
        alpha.v[p] = 0.5 * tr.v[p] * mu.ratio[p];
    return alpha;
}

SymTensorField connection(const SymTensorField& g, const SymTensorField& h,
                          const SymTensorField& k) {
    require_same_grid(g.grid, h.grid);
    require_same_grid(g.grid, k.grid);
    SymTensorField out(g.grid);
    const std::int64_t n = std::int64_t(g.grid->nodes);
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < n; ++p) {
        const Eigen::MatrixXd G = g.node(p);
        const Eigen::MatrixXd H = h.node(p);
        const Eigen::MatrixXd K = k.node(p);
        const Eigen::MatrixXd Gi = G.inverse();
        const Eigen::MatrixXd HGiK = H * Gi * K;
        const double trHK = (Gi * H * Gi * K).trace();
        const double trH = (Gi * H).trace();
        const double trK = (Gi * K).trace();
        out.node(p) = -0.5 * HGiK - 0.5 * (K * Gi * H) - 0.25 * trHK * G +
                      0.25 * trH * K + 0.25 * trK * H;
    }
    return out;
}

namespace {

// Right-hand side of the second-order geodesic system, per node.
inline void geodesic_accel(const Eigen::MatrixXd& G, const Eigen::MatrixXd& K,
                           Eigen::MatrixXd& accel) {
    const Eigen::MatrixXd Gi = G.inverse();
    const Eigen::MatrixXd A = Gi * K;
    const double trA = A.trace();
    const double trA2 = (A * A).trace();
    accel = K * A + 0.25 * trA2 * G - 0.5 * trA * K;
}

template <bool Parallel>
GeodesicResult geodesic_impl(const SymTensorField& g0, const SymTensorField& h,
                             double t_end, int steps) {
    require_same_grid(g0.grid, h.grid);
    if (steps < 1) throw std::invalid_argument("geodesic: steps must be >= 1");
    const double dt = t_end / steps;
    const std::int64_t nodes = std::int64_t(g0.grid->nodes);

    // minimum initial eigenvalue per node, for blow-up detection
    std::vector<double> eig0(g0.grid->nodes);
    for (std::int64_t p = 0; p < nodes; ++p) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            Eigen::MatrixXd(g0.node(p)), Eigen::EigenvaluesOnly);
        eig0[p] = es.eigenvalues().minCoeff();
        if (!(eig0[p] > 0.0))
            throw std::runtime_error("geodesic: initial metric not positive");
    }

    GeodesicResult res;
    res.path.grid = g0.grid;
    res.path.times.push_back(0.0);
    res.path.metrics.push_back(g0);

    SymTensorField g = g0, k = h;
    for (int step = 0; step < steps; ++step) {
        SymTensorField gn(g.grid), kn(g.grid);
        bool bad = false;
#pragma omp parallel for if (Parallel) schedule(static) shared(bad)
        for (std::int64_t p = 0; p < nodes; ++p) {
            Eigen::MatrixXd G = g.node(p), K = k.node(p);
            Eigen::MatrixXd a1, a2, a3, a4;
            const Eigen::MatrixXd k1g = K;
            geodesic_accel(G, K, a1);
            const Eigen::MatrixXd k2g = K + 0.5 * dt * a1;
            geodesic_accel(G + 0.5 * dt * k1g, k2g, a2);
            const Eigen::MatrixXd k3g = K + 0.5 * dt * a2;
            geodesic_accel(G + 0.5 * dt * k2g, k3g, a3);
            const Eigen::MatrixXd k4g = K + dt * a3;
            geodesic_accel(G + dt * k3g, k4g, a4);
            Eigen::MatrixXd Gn =
                G + dt / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
            Eigen::MatrixXd Kn = K + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            gn.node(p) = Gn;
            kn.node(p) = Kn;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                Gn, Eigen::EigenvaluesOnly);
            if (!(es.eigenvalues().minCoeff() > 1e-6 * eig0[p])) bad = true;
        }
        const double t = dt * (step + 1);
        if (bad) {
            res.degenerate = true;
            res.degeneration_time = t;
            break;
        }
        g = gn;
        k = kn;
        res.path.times.push_back(t);
        res.path.metrics.push_back(g);
    }
    return res;
}

} // namespace

GeodesicResult geodesic(const SymTensorField& g0, const SymTensorField& h,
                        double t_end, int steps) {
    return geodesic_impl<true>(g0, h, t_end, steps);
}

GeodesicResult geodesic_serial(const SymTensorField& g0, const SymTensorField& h,
                               double t_end, int steps) {
    return geodesic_impl<false>(g0, h, t_end, steps);
}

Density volume_along_geodesic(const SymTensorField& g0, const SymTensorField& h,
                              double t) {
    require_same_grid(g0.grid, h.grid);
    const int d = g0.d;
    const double n = d / 2.0;
    Density mu0 = riemannian_volume(g0);
    ScalarField tr = pointwise_trace(g0, h);
    TangentSplit split = tangent_split(g0, h);
    ScalarField tr02 = pointwise_trace_pair(g0, split.vertical, split.vertical);
    Density mu(g0.grid);
    for (std::size_t p = 0; p < g0.grid->nodes; ++p) {
        const double lin = 1.0 + 0.25 * t * tr.v[p];
        mu.ratio[p] = (lin * lin + n / 8.0 * tr02.v[p] * t * t) * mu0.ratio[p];
    }
    mu.recompute_total();
    return mu;
}

IntersectionResult kahler_intersections(const SymTensorField& g0,
                                        const SymTensorField& h,
                                        double t_span) {
    IntersectionResult res;
    Density mu0 = riemannian_volume(g0);
    ScalarField tr = pointwise_trace(g0, h);
    res.first_variation = integrate(tr, mu0);
    if (std::abs(res.first_variation) > 1e-8 * std::max(1.0, mu0.total))
        throw std::invalid_argument(
            "kahler_intersections: tangent has nonzero mean trace, not in T_g H");

    if (max_abs_tensor(h) == 0.0) {
        res.constant_volume = true;
        res.times = {0.0};
        return res;
    }

    // least-squares quadratic fit of Vol(t) over 5 evenly spaced samples
    constexpr int samples = 5;
    Eigen::MatrixXd A(samples, 3);
    Eigen::VectorXd b(samples);
    for (int j = 0; j < samples; ++j) {
        const double t = t_span * j / (samples - 1);
        A(j, 0) = 1.0;
        A(j, 1) = t;
        A(j, 2) = t * t;
        b(j) = volume_along_geodesic(g0, h, t).total;
    }
    Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
    res.quadratic_fit_residual = (A * c - b).norm();

    // Vol(t) = V + c1 t + c2 t^2; roots of Vol(t) = V counted with
    // multiplicity are {0, -c1/c2}. For tangents in T_g H the first
    // variation vanishes, so the second root coincides with 0 (the geodesic
    // touches the volume level tangentially and leaves it for good).
    const double V = mu0.total;
    const double c1 = c(1), c2 = c(2);
    const double scale = std::max({std::abs(c1), std::abs(c2), std::abs(V)});
    res.times.push_back(0.0);
    if (std::abs(c2) > 1e-12 * scale) res.times.push_back(-c1 / c2);
    return res;
}

double path_length(const MetricPath& path) {
    double len = 0.0;
    for (std::size_t j = 0; j + 1 < path.times.size(); ++j) {
        const double dt = path.times[j + 1] - path.times[j];
        SymTensorField mid = 0.5 * (path.metrics[j] + path.metrics[j + 1]);
        SymTensorField vel =
            (1.0 / dt) * (path.metrics[j + 1] - path.metrics[j]);
        len += std::sqrt(std::max(0.0, inner(mid, vel, vel))) * dt;
    }
    return len;
}

} // namespace calgeo::ebin
