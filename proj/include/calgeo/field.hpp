#pragma once

#include "calgeo/grid.hpp"

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace calgeo {

/// Sampled real function on a grid.
struct ScalarField {
    GridPtr grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(GridPtr g, double fill = 0.0)
        : grid(std::move(g)), v(grid->nodes, fill) {}

    std::size_t size() const { return v.size(); }
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
};

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

/// Sampled symmetric (0,2)-tensor: one dxd symmetric matrix per node
/// (d = 2n; the sphere stores the 2x2 axisymmetric representative).
struct SymTensorField {
    GridPtr grid;
    int d = 0;
    std::vector<double> v;  // nodes * d * d, row-major per node

    SymTensorField() = default;
    explicit SymTensorField(GridPtr g)
        : grid(std::move(g)), d(grid->tensor_dim),
          v(grid->nodes * std::size_t(d) * d, 0.0) {}

    MatMap node(std::size_t i) {
        return MatMap(v.data() + i * std::size_t(d) * d, d, d);
    }
    ConstMatMap node(std::size_t i) const {
        return ConstMatMap(v.data() + i * std::size_t(d) * d, d, d);
    }
};

/// Sampled Hermitian n x n matrix field [g_{i jbar}] (torus only).
struct HermitianField {
    GridPtr grid;
    int n = 0;
    std::vector<std::complex<double>> v;  // nodes * n * n, row-major

    HermitianField() = default;
    explicit HermitianField(GridPtr g)
        : grid(std::move(g)), n(grid->complex_dim),
          v(grid->nodes * std::size_t(n) * n, 0.0) {}

    std::complex<double>& at(std::size_t node, int i, int j) {
        return v[node * std::size_t(n) * n + std::size_t(i) * n + j];
    }
    std::complex<double> at(std::size_t node, int i, int j) const {
        return v[node * std::size_t(n) * n + std::size_t(i) * n + j];
    }
};

/// Nonnegative 2n-form relative to the fixed reference density mu_0 of the
/// grid: mu = ratio * mu_0. Zeros are allowed (boundary of the completion);
/// operations that need strict positivity say so.
struct Density {
    GridPtr grid;
    std::vector<double> ratio;
    double total = 0.0;  // cached integral of mu

    Density() = default;
    explicit Density(GridPtr g, double fill = 1.0)
        : grid(std::move(g)), ratio(grid->nodes, fill) {
        recompute_total();
    }
    void recompute_total();
    double min_ratio() const;
};

/// Time-sampled path of metrics.
struct MetricPath {
    GridPtr grid;
    std::vector<double> times;
    std::vector<SymTensorField> metrics;
};

// ---- field arithmetic helpers (pointwise) --------------------------------

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);
SymTensorField operator+(const SymTensorField& a, const SymTensorField& b);
SymTensorField operator-(const SymTensorField& a, const SymTensorField& b);
SymTensorField operator*(double c, const SymTensorField& a);

double max_abs(const ScalarField& f);
double max_abs_tensor(const SymTensorField& h);

} // namespace calgeo
