#include "calgeo/ops.hpp"
#include "calgeo/reduce.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace calgeo {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

[[noreturn]] void singular_metric(std::size_t node, double det) {
    throw std::runtime_error("singular metric at node " + std::to_string(node) +
                             " (det = " + std::to_string(det) + ")");
}
} // namespace

SymTensorField hermitian_to_real(const HermitianField& H, double tol) {
    const int n = H.n;
    SymTensorField g(H.grid);
    for (std::size_t p = 0; p < H.grid->nodes; ++p) {
        double scale = 0.0, asym = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                scale = std::max(scale, std::abs(H.at(p, i, j)));
                asym = std::max(asym,
                                std::abs(H.at(p, i, j) - std::conj(H.at(p, j, i))));
            }
        if (asym > tol * std::max(scale, 1.0))
            throw std::invalid_argument("hermitian_to_real: matrix at node " +
                                        std::to_string(p) + " is not Hermitian");
        auto m = g.node(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double re = 2.0 * H.at(p, i, j).real();
                const double im = 2.0 * H.at(p, i, j).imag();
                m(i, j) = re;
                m(n + i, n + j) = re;
                m(i, n + j) = im;
                m(n + i, j) = -im;
            }
    }
    return g;
}

HermitianField real_to_hermitian(const SymTensorField& h) {
    const int n = h.d / 2;
    HermitianField H(h.grid);
    for (std::size_t p = 0; p < h.grid->nodes; ++p) {
        auto m = h.node(p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double re = 0.25 * (m(i, j) + m(n + i, n + j));
                const double im = 0.25 * (m(i, n + j) - m(n + i, j));
                H.at(p, i, j) = {re, im};
            }
    }
    return H;
}

SymTensorField real_hessian(const ScalarField& f) {
    const auto& grid = *f.grid;
    if (!grid.is_torus())
        throw std::logic_error("real_hessian: torus grids only");
    const int d = grid.tensor_dim;
    SymTensorField H(f.grid);
    std::vector<double> da, dab;
    for (int a = 0; a < d; ++a) {
        grid.apply_axis_derivative(f.v, da, a, 1);
        for (int b = a; b < d; ++b) {
            if (b == a)
                grid.apply_axis_derivative(f.v, dab, a, 2);
            else
                grid.apply_axis_derivative(da, dab, b, 1);
            for (std::size_t p = 0; p < grid.nodes; ++p) {
                auto m = H.node(p);
                m(a, b) = dab[p];
                m(b, a) = dab[p];
            }
        }
    }
    return H;
}

HermitianField complex_hessian(const ScalarField& f) {
    SymTensorField H = real_hessian(f);
    const int n = f.grid->complex_dim;
    HermitianField C(f.grid);
    for (std::size_t p = 0; p < f.grid->nodes; ++p) {
        auto m = H.node(p);
        // blocks of the real Hessian: [[A, B^T], [B, C]]
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double re = 0.25 * (m(i, j) + m(n + i, n + j));
                const double im = 0.25 * (m(n + j, i) - m(n + i, j));
                C.at(p, i, j) = {re, im};
            }
    }
    return C;
}

SymTensorField j_invariant_projection(const SymTensorField& h) {
    if (!h.grid->is_torus())
        throw std::logic_error("j_invariant_projection: torus grids only");
    const int n = h.d / 2;
    SymTensorField r(h.grid);
    for (std::size_t p = 0; p < h.grid->nodes; ++p) {
        auto m = h.node(p);
        auto o = r.node(p);
        // (h + J.h)/2 with J.h = ((C, -B), (-B^T, A)) blockwise; the
        // off-diagonal block (B^T - B)/2 is skew, the full matrix symmetric
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double diag = 0.5 * (m(i, j) + m(n + i, n + j));
                const double off = 0.5 * (m(n + j, i) - m(n + i, j));
                o(i, j) = diag;
                o(n + i, n + j) = diag;
                o(i, n + j) = off;
                o(n + j, i) = off;
            }
    }
    return r;
}

SymTensorField nabla11(const ScalarField& f) {
    const auto& grid = *f.grid;
    if (grid.is_torus())
        return j_invariant_projection(real_hessian(f));
    // Sphere (n = 1): i ddbar f = (Lap_ref f / 2) * omega_round, and the
    // associated symmetric tensor is the same multiple of the round metric.
    auto lb = grid.laplace_beltrami(f.v);
    SymTensorField r(f.grid);
    for (std::size_t p = 0; p < grid.nodes; ++p) {
        const double c = 0.5 * lb[p];
        auto m = r.node(p);
        m(0, 0) = c;
        m(1, 1) = c * grid.sin_center[p] * grid.sin_center[p];
    }
    return r;
}

SymTensorField reference_metric(const GridPtr& grid) {
    SymTensorField g(grid);
    for (std::size_t p = 0; p < grid->nodes; ++p) {
        auto m = g.node(p);
        if (grid->is_torus()) {
            m.setIdentity();
        } else {
            m(0, 0) = 1.0;
            m(1, 1) = grid->sin_center[p] * grid->sin_center[p];
        }
    }
    return g;
}

double integrate(const ScalarField& f, const Density& mu) {
    require_same_grid(f.grid, mu.grid);
    const auto& g = *f.grid;
    std::vector<double> terms(g.nodes);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(g.nodes); ++i)
        terms[i] = g.weights[i] * mu.ratio[i] * f.v[i];
    return pairwise_sum(terms);
}

double integrate_ref(const ScalarField& f) {
    const auto& g = *f.grid;
    std::vector<double> terms(g.nodes);
    for (std::size_t i = 0; i < g.nodes; ++i) terms[i] = g.weights[i] * f.v[i];
    return pairwise_sum(terms);
}

namespace {

template <bool Parallel>
ScalarField trace_pair_impl(const SymTensorField& g, const SymTensorField& h,
                            const SymTensorField& k) {
    require_same_grid(g.grid, h.grid);
    require_same_grid(g.grid, k.grid);
    ScalarField r(g.grid);
    const std::int64_t n = std::int64_t(g.grid->nodes);
    // exceptions may not escape the parallel region: record and rethrow
    std::int64_t bad = -1;
    double bad_det = 0.0;
#pragma omp parallel for if (Parallel) schedule(static)
    for (std::int64_t p = 0; p < n; ++p) {
        Eigen::MatrixXd gi = g.node(p);
        const double det = gi.determinant();
        if (!(det > 0.0)) {
#pragma omp critical
            {
                bad = p;
                bad_det = det;
            }
            continue;
        }
        Eigen::MatrixXd inv = gi.inverse();
        r.v[p] = (inv * RowMat(h.node(p)) * inv * RowMat(k.node(p))).trace();
    }
    if (bad >= 0) singular_metric(std::size_t(bad), bad_det);
    return r;
}

} // namespace

ScalarField pointwise_trace_pair(const SymTensorField& g, const SymTensorField& h,
                                 const SymTensorField& k) {
    return trace_pair_impl<true>(g, h, k);
}

ScalarField pointwise_trace_pair_serial(const SymTensorField& g,
                                        const SymTensorField& h,
                                        const SymTensorField& k) {
    return trace_pair_impl<false>(g, h, k);
}

ScalarField pointwise_trace(const SymTensorField& g, const SymTensorField& h) {
    require_same_grid(g.grid, h.grid);
    ScalarField r(g.grid);
    const std::int64_t n = std::int64_t(g.grid->nodes);
    std::int64_t bad = -1;
    double bad_det = 0.0;
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < n; ++p) {
        Eigen::MatrixXd gi = g.node(p);
        const double det = gi.determinant();
        if (!(det > 0.0)) {
#pragma omp critical
            {
                bad = p;
                bad_det = det;
            }
            continue;
        }
        r.v[p] = (gi.inverse() * RowMat(h.node(p))).trace();
    }
    if (bad >= 0) singular_metric(std::size_t(bad), bad_det);
    return r;
}

Density riemannian_volume(const SymTensorField& g) {
    Density mu(g.grid);
    const auto& grid = *g.grid;
    for (std::size_t p = 0; p < grid.nodes; ++p) {
        const double det = Eigen::MatrixXd(g.node(p)).determinant();
        if (!(det > 0.0)) singular_metric(p, det);
        double ref_det = 1.0;
        if (!grid.is_torus()) {
            const double s = grid.sin_center[p];
            ref_det = s * s;
        }
        mu.ratio[p] = std::sqrt(det / ref_det);
    }
    mu.recompute_total();
    return mu;
}

Density reference_volume(const GridPtr& grid) { return Density(grid, 1.0); }

ScalarField laplacian_at(const SymTensorField& g, const ScalarField& nu) {
    ScalarField tr = pointwise_trace(g, nabla11(nu));
    return 0.5 * tr;
}

ScalarField laplacian_ref(const ScalarField& nu) {
    const auto& grid = *nu.grid;
    ScalarField r(nu.grid);
    if (grid.is_torus()) {
        std::vector<double> d2;
        for (int a = 0; a < grid.tensor_dim; ++a) {
            grid.apply_axis_derivative(nu.v, d2, a, 2);
            for (std::size_t p = 0; p < grid.nodes; ++p) r.v[p] += 0.5 * d2[p];
        }
    } else {
        auto lb = grid.laplace_beltrami(nu.v);
        for (std::size_t p = 0; p < grid.nodes; ++p) r.v[p] = 0.5 * lb[p];
    }
    return r;
}

double mean_ref(const ScalarField& f) {
    return integrate_ref(f) / f.grid->total_volume;
}

namespace {

// Full DFT transform of a complex field along every torus axis.
void dft_all_axes(const GridSpec& grid, std::vector<std::complex<double>>& data,
                  bool forward) {
    const int N = grid.resolution;
    const int d = grid.coord_dim;
    const Eigen::MatrixXcd& M = forward ? grid.dft : grid.idft;
    std::vector<std::complex<double>> tmp(data.size());
    for (int axis = 0; axis < d; ++axis) {
        std::size_t stride = 1;
        for (int a = axis + 1; a < d; ++a) stride *= std::size_t(N);
        const std::size_t outer = data.size() / (std::size_t(N) * stride);
        const std::int64_t lines = std::int64_t(outer * stride);
#pragma omp parallel for schedule(static)
        for (std::int64_t l = 0; l < lines; ++l) {
            const std::size_t o = std::size_t(l) / stride;
            const std::size_t s = std::size_t(l) % stride;
            const std::size_t base = o * std::size_t(N) * stride + s;
            Eigen::VectorXcd line(N);
            for (int j = 0; j < N; ++j) line(j) = data[base + std::size_t(j) * stride];
            Eigen::VectorXcd res = M * line;
            for (int j = 0; j < N; ++j) tmp[base + std::size_t(j) * stride] = res(j);
        }
        data.swap(tmp);
    }
}

} // namespace

ScalarField inv_laplacian_ref(const ScalarField& w) {
    const auto& grid = *w.grid;
    if (!grid.is_torus())
        throw std::logic_error("inv_laplacian_ref: torus grids only");
    const int N = grid.resolution;
    const int d = grid.coord_dim;

    std::vector<std::complex<double>> data(w.v.begin(), w.v.end());
    dft_all_axes(grid, data, true);

    // divide by the symbol of (1/2) * coordinate Laplacian; kill the mean
    for (std::size_t idx = 0; idx < data.size(); ++idx) {
        std::size_t rem = idx;
        double m2 = 0.0;
        for (int a = d - 1; a >= 0; --a) {
            const int k = int(rem % std::size_t(N));
            rem /= std::size_t(N);
            const double m = grid.freqs[k];
            m2 += m * m;
        }
        if (m2 == 0.0)
            data[idx] = 0.0;
        else
            data[idx] /= -2.0 * std::numbers::pi * std::numbers::pi * m2;
    }

    dft_all_axes(grid, data, false);
    ScalarField u(w.grid);
    for (std::size_t p = 0; p < grid.nodes; ++p) u.v[p] = data[p].real();
    return u;
}

ScalarField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng,
                                double amplitude, int max_mode) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    ScalarField f(grid);
    if (grid->is_torus()) {
        const int d = grid->tensor_dim;
        std::vector<int> m(d, -max_mode);
        while (true) {
            double m2 = 0.0;
            for (int a = 0; a < d; ++a) m2 += double(m[a]) * m[a];
            if (m2 > 0.0) {
                const double decay = 1.0 / (1.0 + m2);
                const double c = gauss(rng) * decay, s = gauss(rng) * decay;
                for (std::size_t p = 0; p < grid->nodes; ++p) {
                    double phase = 0.0;
                    for (int a = 0; a < d; ++a)
                        phase += two_pi * m[a] * grid->coord(p, a);
                    f.v[p] += c * std::cos(phase) + s * std::sin(phase);
                }
            }
            int a = d - 1;
            while (a >= 0 && ++m[a] > max_mode) m[a--] = -max_mode;
            if (a < 0) break;
        }
    } else {
        for (int l = 1; l <= max_mode + 1; ++l) {
            const double c = gauss(rng) / (1.0 + double(l) * l);
            for (std::size_t p = 0; p < grid->nodes; ++p)
                f.v[p] += c * std::legendre(unsigned(l), std::cos(grid->coords[p]));
        }
    }
    const double mean = mean_ref(f);
    for (auto& x : f.v) x -= mean;
    const double m = max_abs(f);
    if (m > 0.0)
        for (auto& x : f.v) x *= amplitude / m;
    return f;
}

SymTensorField random_sym_tensor(const GridPtr& grid, std::mt19937_64& rng,
                                 double amplitude, int max_mode) {
    SymTensorField h(grid);
    const int d = grid->tensor_dim;
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            ScalarField c = random_smooth_field(grid, rng, amplitude, max_mode);
            // shift by a random constant so components are not mean-zero
            std::uniform_real_distribution<double> uni(-0.5, 0.5);
            const double c0 = amplitude * uni(rng);
            for (std::size_t p = 0; p < grid->nodes; ++p) {
                h.node(p)(a, b) += c.v[p] + c0;
                if (a != b) h.node(p)(b, a) += c.v[p] + c0;
            }
        }
    return h;
}

} // namespace calgeo
