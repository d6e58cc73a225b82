#pragma once

#include "calgeo/field.hpp"
#include "calgeo/ops.hpp"

#include <optional>
#include <vector>

namespace calgeo::ebin {

/// g_E(h,k)|_g = integral of tr(g^{-1} h g^{-1} k) dV_g.
double inner(const SymTensorField& g, const SymTensorField& h,
             const SymTensorField& k);
double norm(const SymTensorField& g, const SymTensorField& h);

/// pi(g) = dV_g.
Density submersion_pi(const SymTensorField& g);

struct TangentSplit {
    SymTensorField vertical;    // traceless part
    SymTensorField horizontal;  // (1/2n) tr(g^{-1}h) g
};
TangentSplit tangent_split(const SymTensorField& g, const SymTensorField& h);

/// dpi|_g h = (1/2) tr(g^{-1} h) dV_g, returned as a tangent density
/// (coefficient against mu_0).
ScalarField submersion_differential(const SymTensorField& g,
                                    const SymTensorField& h);

/// Levi-Civita connection of the ambient metric for constant vector fields:
///   -h g^{-1}k/2 - k g^{-1}h/2 - tr(g^{-1}h g^{-1}k) g/4
///   + tr(g^{-1}h) k/4 + tr(g^{-1}k) h/4.
SymTensorField connection(const SymTensorField& g, const SymTensorField& h,
                          const SymTensorField& k);

struct GeodesicResult {
    MetricPath path;
    bool degenerate = false;          // det collapsed along the way
    double degeneration_time = 0.0;   // earliest detection time if degenerate
};

/// Numerical geodesic of the ambient metric: RK4 on the per-node system
///   g_tt = g_t g^{-1} g_t + tr((g^{-1}g_t)^2) g/4 - tr(g^{-1}g_t) g_t/2
/// with blow-up detection when the smallest per-node eigenvalue of g(t)
/// falls below 1e-8 times its initial value.
GeodesicResult geodesic(const SymTensorField& g0, const SymTensorField& h,
                        double t_end, int steps);

GeodesicResult geodesic_serial(const SymTensorField& g0, const SymTensorField& h,
                               double t_end, int steps);

/// Closed-form volume density along the geodesic with initial data (g0, h):
///   mu(t) = ((1 + t tr(g^{-1}h)/4)^2 + n tr((g^{-1}h_0)^2) t^2 / 8) mu(0),
/// h_0 the traceless part. Exactly quadratic in t per node.
Density volume_along_geodesic(const SymTensorField& g0, const SymTensorField& h,
                              double t);

struct IntersectionResult {
    bool constant_volume = false;      // h = 0 style degenerate case
    std::vector<double> times;         // {0, t1} generically
    double first_variation = 0.0;      // integral of tr(g^{-1}h) dV_g
    double quadratic_fit_residual = 0.0;
};

/// Times where the geodesic from a Kahler point with tangent in T_g H crosses
/// the volume level Vol = V, from a least-squares quadratic fit of the total
/// volume over 5 evenly spaced samples. Rejects h with nonzero mean trace.
IntersectionResult kahler_intersections(const SymTensorField& g0,
                                        const SymTensorField& h,
                                        double t_span = 1.0);

/// Composite quadrature of sqrt(g_E(g', g')) over the time samples
/// (midpoint metric, forward difference quotient).
double path_length(const MetricPath& path);

} // namespace calgeo::ebin
