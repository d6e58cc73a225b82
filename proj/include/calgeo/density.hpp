#pragma once

#include "calgeo/field.hpp"
#include "calgeo/report.hpp"

#include <random>
#include <vector>

namespace calgeo::dens {

/// Tangent densities are stored as coefficients against mu_0:
/// alpha = a * mu_0 with a the ScalarField.

/// gtilde(alpha, beta)|_mu = integral (alpha/mu)(beta/mu) mu.
/// Requires mu > 0 at every node.
double gtilde_inner(const Density& mu, const ScalarField& a, const ScalarField& b);

/// Same formula restricted to the fixed-mass leaf; tangents must have zero
/// total mass (checked to quadrature tolerance).
double gV_inner(const Density& mu, const ScalarField& a, const ScalarField& b);

/// Phi(mu) = 2 sqrt(mu/mu_0); sends the fixed-mass leaf onto the sphere of
/// radius 2 sqrt(V) in L^2(mu_0).
ScalarField phi_map(const Density& mu);
Density phi_inverse(const ScalarField& w);

/// Differential of Phi at mu applied to alpha = a mu_0.
ScalarField phi_differential(const Density& mu, const ScalarField& a);

/// Explicit ambient geodesic mu(t) = (1 + t a / (2 F))^2 mu with mu = F mu_0.
/// Degeneration (zeros of the parenthesis) is allowed.
Density ambient_geodesic(const Density& mu, const ScalarField& a, double t);

/// Length of the intrinsic (constant-mass) geodesic between mu1, mu2:
/// T = 2 sqrt(V) acos((1/V) integral sqrt(F G) mu_0).
double geodesic_length(const Density& mu1, const Density& mu2);

/// Point at time t in [0, T] on the unit-speed intrinsic geodesic,
/// via the sine interpolation of sqrt-ratios.
Density calabi_geodesic(const Density& mu1, const Density& mu2, double t);

/// d_V: intrinsic distance on the fixed-mass leaf (same closed form as
/// geodesic_length). d_tilde_V: chordal L^2 distance of Phi images.
double dV_distance(const Density& mu1, const Density& mu2);
double dtildeV_distance(const Density& mu1, const Density& mu2);

/// d_tilde_V <= d_V < (pi / (2 sqrt 2)) d_tilde_V, plus the convexity
/// inequality x - (pi/2) sin x <= 0 at x = d_V / (2 sqrt V).
std::vector<Report> equivalence_check(const Density& mu1, const Density& mu2);

/// Projection of the ambient chord onto the fixed-mass leaf:
/// sqrt(V / v(t)) * Phi(mu(t)) pulled back through Phi^{-1}.
Density chord_projection(const Density& mu1, const Density& mu2, double t);

struct BoundaryRay {
    std::vector<double> times;
    std::vector<Density> densities;
    double t_max = 0.0;  // earliest per-node vanishing time
};

/// Unit-speed geodesic ray from mu with direction field G
/// (normalized: integral G mu = 0, integral G^2 mu = 1):
///   mu(t) = mu (G sqrt(V) sin(t/(2 sqrt V)) + cos(t/(2 sqrt V)))^2,
/// followed until the parenthesis first vanishes at some node.
BoundaryRay boundary_ray(const Density& mu, const ScalarField& G,
                         int samples = 33);

/// L1 distance integral |mu - nu|.
double l1_distance(const Density& mu, const Density& nu);

/// Convergence equivalences of the completion: d_V -> 0 iff L1 -> 0 on the
/// fixed-mass leaf, and f_k -> f in L2 iff f_k^2 -> f^2 in L1.
/// "Converged" = three successive terms below tol with a monotone trend.
std::vector<Report> l1_convergence_check(const std::vector<Density>& seq,
                                         const Density& limit,
                                         double tol = 1e-6);
std::vector<Report> l1_l2_equivalence(const std::vector<ScalarField>& fk,
                                      const ScalarField& f, double tol = 1e-6);

/// One-parameter family of near-disjoint normalized bumps used to approach
/// the optimal ratio pi/(2 sqrt 2) of the equivalence bound.
std::pair<Density, Density> bump_pair(const GridPtr& grid, double eps);

/// Random strictly positive smooth density of total mass V.
Density random_density(const GridPtr& grid, std::mt19937_64& rng,
                       double roughness = 0.5);

} // namespace calgeo::dens
