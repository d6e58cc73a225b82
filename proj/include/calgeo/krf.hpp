#pragma once

#include "calgeo/field.hpp"
#include "calgeo/report.hpp"

#include <string>
#include <vector>

namespace calgeo::krf {

/// Rotationally symmetric geometry on the 2-sphere, reduced to the
/// colatitude grid. Potentials are phi(theta) against the unit round
/// reference (Einstein: Ric omega = omega, s = 1, V = on-grid mass of
/// sin(theta) ~ 4 pi). The Kahler form ratio is F = 1 + Lap phi with the
/// module-wide half-Laplacian convention Lap = Lap_LB / 2.

/// omega_phi / omega as a density; throws std::domain_error when the ratio
/// is not strictly positive.
Density form_ratio(const ScalarField& phi);

/// Exact inverse of the discrete Laplace-Beltrami operator on mean-zero
/// data (1-D flux integration); output mean-zero against mu_0.
ScalarField sphere_inv_laplace_beltrami(const ScalarField& q);

/// Ricci potential of the reference omega' = omega_psi:
/// i ddbar f = Ric omega' - omega', normalized by (1/V) int e^f omega' = 1.
/// psi = 0 gives f = 0 identically.
ScalarField ricci_potential(const ScalarField& psi);

/// s = tr_{omega_phi} Ric omega_phi = (1 - Lap log F) / F.
ScalarField scalar_curvature(const ScalarField& phi);

struct FlowControls {
    double t_end = 30.0;
    double dt0 = 1e-3;
    double dt_floor = 1e-8;  // abort threshold for positivity halving
    int record_every = 100;  // potential snapshots every k accepted steps
};

struct FlowTrajectory {
    GridPtr grid;
    // per accepted step
    std::vector<double> times;
    std::vector<double> s_l2;        // |s - 1|_{L^2(omega(t))}
    std::vector<double> s_inf;       // sup |s - 1|
    std::vector<double> sup_phidot;  // sup |phi_t|
    std::vector<double> phi_c0;      // |phi(t)|_{C^0}
    std::vector<double> l1_increment;  // L1 gap of consecutive volume forms
    std::vector<double> cum_dC;      // trapezoid of s_l2 over time
    std::vector<double> cum_dV;      // chordal sum of d_V between steps
    std::vector<double> volume;      // on-grid mass of omega_phi(t)
    // sparse potential snapshots
    std::vector<double> snapshot_times;
    std::vector<ScalarField> snapshots;
    ScalarField phi_final;
    bool aborted = false;
    std::string abort_reason;
};

/// Normalized Kahler-Ricci flow phi_t = log F + phi - a(t) in the
/// reference-mean-zero gauge, IMEX time stepping (implicit half-Laplacian,
/// tridiagonal solve), positivity-rejected steps halve dt.
FlowTrajectory krf_integrate(const ScalarField& phi0,
                             const FlowControls& controls = {});

struct FlowLength {
    double curvature_integral = 0.0;  // integral of |s-1|_{L2(omega(t))} dt
    double chordal_sum = 0.0;         // sum of d_V between consecutive forms
};
FlowLength dC_length_of_flow(const FlowTrajectory& traj);

/// Log-linear fit of the tail of |s - 1|_{L^2}; returns the decay rate
/// (positive = exponential decay).
double exponential_rate(const FlowTrajectory& traj);

struct ConvergenceReport {
    std::string status;  // "converged" | "inconclusive"
    double fitted_rate = 0.0;
    std::vector<Report> checks;
};
ConvergenceReport convergence_report(const FlowTrajectory& traj);

struct StabilityRun {
    std::string label;
    ConvergenceReport report;
    double dC_length = 0.0;
};
struct StabilityReport {
    bool all_converged = false;
    std::vector<StabilityRun> runs;
};
StabilityReport cr_stability_report(const std::vector<ScalarField>& initial_data,
                                    const FlowControls& controls = {});

/// P_l(cos theta) scaled to the given amplitude (Legendre initial data).
ScalarField legendre_mode(const GridPtr& grid, int l, double amplitude);

} // namespace calgeo::krf
