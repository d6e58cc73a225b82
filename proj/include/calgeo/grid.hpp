#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace calgeo {

enum class Topology { Torus2D, Torus4D, SphereAxisym };

std::string topology_name(Topology t);
Topology topology_from_name(const std::string& name);

/// Discretization backbone. Nodes, coordinates, quadrature weights and the
/// differentiation machinery for one of the model manifolds:
///   - flat torus R^{2n}/Z^{2n} with unit cell [0,1)^{2n}, n in {1,2},
///     trigonometric (spectral) differentiation, equal-weight quadrature;
///   - rotationally symmetric 2-sphere reduced to a colatitude grid,
///     cell-centered interior nodes, conservative finite differences.
///
/// Reference conventions: on tori the reference Kahler metric is the standard
/// flat metric (g_{i jbar} = delta/2), coordinate volume V = 1. On the sphere
/// the reference is the unit round metric, V = quadrature mass of sin(theta)
/// (approx 4*pi, Fano-normalized class).
class GridSpec {
public:
    Topology topology;
    int resolution;              // nodes per axis (torus) / colatitude nodes
    int tensor_dim;              // 2n: per-node symmetric matrices are dxd
    int complex_dim;             // n
    int coord_dim;               // stored coordinates per node (sphere: 1)
    std::size_t nodes;

    std::vector<double> coords;  // nodes * coord_dim
    std::vector<double> weights; // coordinate quadrature, includes reference
                                 // volume density (sin(theta) on the sphere)
    double total_volume;         // V = sum of weights

    static std::shared_ptr<const GridSpec> torus2d(int n_per_axis);
    static std::shared_ptr<const GridSpec> torus4d(int n_per_axis);
    static std::shared_ptr<const GridSpec> sphere_axisym(int n_theta);
    static std::shared_ptr<const GridSpec> make(Topology t, int resolution);

    bool is_torus() const { return topology != Topology::SphereAxisym; }

    double coord(std::size_t node, int axis) const {
        return coords[node * coord_dim + axis];
    }

    // -- torus spectral machinery (empty on the sphere) --------------------
    Eigen::MatrixXd d1;          // NxN first-derivative matrix, period 1
    Eigen::MatrixXd d2;          // NxN second-derivative matrix
    Eigen::MatrixXcd dft;        // forward DFT matrix
    Eigen::MatrixXcd idft;       // inverse DFT matrix
    std::vector<int> freqs;      // integer frequencies per DFT index

    // -- sphere finite-difference machinery --------------------------------
    double h_theta = 0.0;
    std::vector<double> sin_center;  // sin(theta_i) at nodes
    std::vector<double> sin_edge;    // sin at cell edges, size resolution+1

    // Derivative of a sampled line along one torus axis (spectral).
    // order is 1 or 2. Works on any field laid out row-major over N^d nodes.
    void apply_axis_derivative(const std::vector<double>& in,
                               std::vector<double>& out, int axis,
                               int order) const;
    void apply_axis_derivative_serial(const std::vector<double>& in,
                                      std::vector<double>& out, int axis,
                                      int order) const;

    // Laplace-Beltrami of an axisymmetric function on the sphere
    // (flux form, even ghost extension at the poles).
    std::vector<double> laplace_beltrami(const std::vector<double>& f) const;

private:
    void build_torus(int dim);
    void build_sphere();
};

using GridPtr = std::shared_ptr<const GridSpec>;

inline void require_same_grid(const GridPtr& a, const GridPtr& b) {
    if (a.get() != b.get())
        throw std::invalid_argument("fields live on different grids");
}

} // namespace calgeo
