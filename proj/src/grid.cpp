#include "calgeo/grid.hpp"

#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace calgeo {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

std::string topology_name(Topology t) {
    switch (t) {
        case Topology::Torus2D: return "torus2d";
        case Topology::Torus4D: return "torus4d";
        case Topology::SphereAxisym: return "sphere";
    }
    return "?";
}

Topology topology_from_name(const std::string& name) {
    if (name == "torus2d") return Topology::Torus2D;
    if (name == "torus4d") return Topology::Torus4D;
    if (name == "sphere") return Topology::SphereAxisym;
    throw std::invalid_argument("unknown topology: " + name);
}

void GridSpec::build_torus(int dim) {
    const int N = resolution;
    tensor_dim = dim;
    complex_dim = dim / 2;
    coord_dim = dim;
    nodes = 1;
    for (int a = 0; a < dim; ++a) nodes *= std::size_t(N);

    coords.resize(nodes * coord_dim);
    weights.assign(nodes, 1.0 / double(nodes));
    total_volume = 1.0;

    for (std::size_t i = 0; i < nodes; ++i) {
        std::size_t rem = i;
        for (int a = dim - 1; a >= 0; --a) {
            coords[i * coord_dim + a] = double(rem % N) / N;
            rem /= N;
        }
    }

    // DFT matrices and spectral derivative matrices for period-1 grids.
    dft.resize(N, N);
    idft.resize(N, N);
    freqs.resize(N);
    for (int k = 0; k < N; ++k)
        freqs[k] = (k <= N / 2) ? k : k - N;
    for (int k = 0; k < N; ++k)
        for (int j = 0; j < N; ++j) {
            const double ang = -two_pi * double(k) * double(j) / N;
            dft(k, j) = std::complex<double>(std::cos(ang), std::sin(ang));
            idft(j, k) = std::conj(dft(k, j)) / double(N);
        }

    Eigen::VectorXcd sym1(N), sym2(N);
    for (int k = 0; k < N; ++k) {
        double m = freqs[k];
        // Nyquist mode has no well-defined first derivative on a real grid.
        double m1 = (N % 2 == 0 && k == N / 2) ? 0.0 : m;
        sym1(k) = std::complex<double>(0.0, two_pi * m1);
        sym2(k) = std::complex<double>(-two_pi * two_pi * m * m, 0.0);
    }
    d1 = (idft * sym1.asDiagonal() * dft).real();
    d2 = (idft * sym2.asDiagonal() * dft).real();
}

void GridSpec::build_sphere() {
    const int N = resolution;
    tensor_dim = 2;
    complex_dim = 1;
    coord_dim = 1;
    nodes = std::size_t(N);

    h_theta = std::numbers::pi / N;
    coords.resize(nodes);
    weights.resize(nodes);
    sin_center.resize(nodes);
    sin_edge.resize(nodes + 1);
    for (int i = 0; i <= N; ++i) sin_edge[i] = std::sin(i * h_theta);
    total_volume = 0.0;
    for (int i = 0; i < N; ++i) {
        const double th = (i + 0.5) * h_theta;
        coords[i] = th;
        sin_center[i] = std::sin(th);
        weights[i] = two_pi * h_theta * sin_center[i];
        total_volume += weights[i];
    }
}

std::shared_ptr<const GridSpec> GridSpec::torus2d(int n_per_axis) {
    if (n_per_axis < 4 || n_per_axis % 2 != 0)
        throw std::invalid_argument("torus2d resolution must be even, >= 4");
    auto g = std::make_shared<GridSpec>();
    g->topology = Topology::Torus2D;
    g->resolution = n_per_axis;
    g->build_torus(2);
    return g;
}

std::shared_ptr<const GridSpec> GridSpec::torus4d(int n_per_axis) {
    if (n_per_axis < 4 || n_per_axis % 2 != 0)
        throw std::invalid_argument("torus4d resolution must be even, >= 4");
    auto g = std::make_shared<GridSpec>();
    g->topology = Topology::Torus4D;
    g->resolution = n_per_axis;
    g->build_torus(4);
    return g;
}

std::shared_ptr<const GridSpec> GridSpec::sphere_axisym(int n_theta) {
    if (n_theta < 8)
        throw std::invalid_argument("sphere resolution must be >= 8");
    auto g = std::make_shared<GridSpec>();
    g->topology = Topology::SphereAxisym;
    g->resolution = n_theta;
    g->build_sphere();
    return g;
}

std::shared_ptr<const GridSpec> GridSpec::make(Topology t, int resolution) {
    switch (t) {
        case Topology::Torus2D: return torus2d(resolution);
        case Topology::Torus4D: return torus4d(resolution);
        case Topology::SphereAxisym: return sphere_axisym(resolution);
    }
    throw std::invalid_argument("bad topology");
}

namespace {

// One pass of matrix M applied along `axis` of a row-major N^d array.
template <bool Parallel>
void apply_axis_impl(const GridSpec& g, const std::vector<double>& in,
                     std::vector<double>& out, int axis,
                     const Eigen::MatrixXd& M) {
    const int N = g.resolution;
    const int d = g.coord_dim;
    std::size_t stride = 1;
    for (int a = axis + 1; a < d; ++a) stride *= std::size_t(N);
    std::size_t outer = 1;
    for (int a = 0; a < axis; ++a) outer *= std::size_t(N);

    out.resize(in.size());
    const std::int64_t lines = std::int64_t(outer) * std::int64_t(stride);

#pragma omp parallel for if (Parallel) schedule(static)
    for (std::int64_t l = 0; l < lines; ++l) {
        const std::size_t o = std::size_t(l) / stride;
        const std::size_t s = std::size_t(l) % stride;
        const std::size_t base = o * std::size_t(N) * stride + s;
        Eigen::VectorXd line(N), res(N);
        for (int j = 0; j < N; ++j) line(j) = in[base + std::size_t(j) * stride];
        res.noalias() = M * line;
        for (int j = 0; j < N; ++j) out[base + std::size_t(j) * stride] = res(j);
    }
}

} // namespace

void GridSpec::apply_axis_derivative(const std::vector<double>& in,
                                     std::vector<double>& out, int axis,
                                     int order) const {
    if (!is_torus())
        throw std::logic_error("spectral derivative is torus-only");
    apply_axis_impl<true>(*this, in, out, axis, order == 1 ? d1 : d2);
}

void GridSpec::apply_axis_derivative_serial(const std::vector<double>& in,
                                            std::vector<double>& out, int axis,
                                            int order) const {
    if (!is_torus())
        throw std::logic_error("spectral derivative is torus-only");
    apply_axis_impl<false>(*this, in, out, axis, order == 1 ? d1 : d2);
}

std::vector<double> GridSpec::laplace_beltrami(const std::vector<double>& f) const {
    if (is_torus())
        throw std::logic_error("laplace_beltrami is sphere-only");
    const int N = resolution;
    std::vector<double> out(nodes);
    const double h2 = h_theta * h_theta;
    for (int i = 0; i < N; ++i) {
        // Even ghost extension: zero flux through the poles (sin vanishes
        // at the edge anyway, which keeps the scheme conservative).
        const double fl = (i == 0) ? 0.0 : sin_edge[i] * (f[i] - f[i - 1]);
        const double fr = (i == N - 1) ? 0.0 : sin_edge[i + 1] * (f[i + 1] - f[i]);
        out[i] = (fr - fl) / (h2 * sin_center[i]);
    }
    return out;
}

} // namespace calgeo
