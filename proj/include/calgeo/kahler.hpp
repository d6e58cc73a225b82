#pragma once

#include "calgeo/density.hpp"
#include "calgeo/field.hpp"
#include "calgeo/ops.hpp"
#include "calgeo/report.hpp"

#include <vector>

namespace calgeo::kahler {

/// Potentials are plain scalar fields; the additive constant is fixed by the
/// reference-mean-zero gauge (int phi mu_0 = 0), applied by normalize.
ScalarField normalize_potential(const ScalarField& phi);

struct PositivityError {
    bool positive = true;
    std::size_t worst_node = 0;
    double min_eigenvalue = 0.0;
};

/// g_phi = g_0 + nabla11(phi); exactly affine in phi. Throws std::domain_error
/// carrying the worst node and eigenvalue when positivity fails.
SymTensorField potential_to_metric(const ScalarField& phi);

/// Positivity scan without throwing.
PositivityError check_positivity(const ScalarField& phi);

/// Laplacian of nu at g_phi (the module-wide convention tr(g^{-1}nabla11)/2).
ScalarField laplacian_phi(const ScalarField& phi, const ScalarField& nu);

/// g_C(nu, eta)|_phi = integral of Lap_phi(nu) Lap_phi(eta) dV_phi,
/// via the real route (trace of the real metric against nabla11).
double calabi_inner(const ScalarField& phi, const ScalarField& nu,
                    const ScalarField& eta);

/// Same quantity through the complex dictionary:
/// integral of tr(G^{-1} H_nu) tr(G^{-1} H_eta) dV with complex Hessians.
double calabi_inner_ddbar(const ScalarField& phi, const ScalarField& nu,
                          const ScalarField& eta);

/// Pointwise (i ddbar nu, i ddbar eta)_{omega_phi}
/// = tr(g^{-1} nabla11(nu) g^{-1} nabla11(eta)) / 2.
ScalarField ddbar_pairing(const SymTensorField& g_phi, const ScalarField& nu,
                          const ScalarField& eta);

/// Pullback identity of the embedding phi -> g_phi into (M, g_E):
/// g_E(nabla11 nu, nabla11 eta)|_{g_phi} = 2 g_C(nu, eta)|_phi.
Report check_isometric_embedding(const ScalarField& phi, const ScalarField& nu,
                                 const ScalarField& eta, double tol = 1e-8);

/// g_E(h, k) = (1/2) integral tr(g^{-1}h) tr(g^{-1}k) dV for J-invariant
/// tangents h, k to the potential space. Throws on non-J-invariant input.
Report trace_pairing_identity(const ScalarField& phi, const SymTensorField& h,
                              const SymTensorField& k, double tol = 1e-8);

/// Levi-Civita connection of g_C for constant fields nu, eta:
///   Lap_phi(result) = Lap nu Lap eta / 2
///                     + (1/2V) integral Lap nu Lap eta dV_phi
///                     - (i ddbar nu, i ddbar eta)_phi,
/// inverted by preconditioned CG (flat spectral preconditioner,
/// relative residual 1e-10); result mean-zero against omega_phi^n.
/// Torus grids only.
ScalarField calabi_connection(const ScalarField& phi, const ScalarField& nu,
                              const ScalarField& eta);

/// tr(g^{-1} II(h,k)) with h = nabla11 nu, k = nabla11 eta:
///   -(n/2) tr(g^{-1}h g^{-1}k) + tr(g^{-1}h) tr(g^{-1}k)/4
///   - g_E(h,k) / (2V).
ScalarField second_fundamental_trace(const ScalarField& phi,
                                     const ScalarField& nu,
                                     const ScalarField& eta);

/// arccos(n^{-1/2}): angle between tangents to the potential space and the
/// conformal directions rho * g.
double conformal_angle(int n);

/// Maximizes g_E(h, rho g)/(|h| |rho g|) over rho (closed form at
/// rho = tr(g^{-1}h)) and checks the value against n^{-1/2}.
Report angle_check(const SymTensorField& g_phi, const SymTensorField& h,
                   double tol = 1e-8);

/// d_C(phi1, phi2) = d_V between the volume forms of g_{phi1}, g_{phi2}.
double dC_distance(const ScalarField& phi1, const ScalarField& phi2);

/// Volume form of g_phi as a density against mu_0.
Density volume_form(const ScalarField& phi);

/// n = 1 only: recover the potential with volume form mu (linear inversion
/// F = 1 + Lap_0 phi, solved spectrally).
ScalarField potential_from_volume(const Density& mu);

/// Metric path obtained by lifting the intrinsic density geodesic between the
/// volume forms of phi1 and phi2 through the n = 1 inversion.
MetricPath lift_calabi_geodesic(const ScalarField& phi1, const ScalarField& phi2,
                                int samples = 33);

/// Inequality chain between the intrinsic and extrinsic distances:
///   (a) d_C < (pi / (2 sqrt 2)) dtilde_V of the volume forms;
///   (b) dtilde_V <= sqrt(n/2) L_E(path) for each trial path;
///   (c) at n = 1, L_E(lifted Calabi geodesic) = sqrt(2) L_C.
std::vector<Report> equivalence_chain_check(const ScalarField& phi1,
                                            const ScalarField& phi2,
                                            int samples = 33);

} // namespace calgeo::kahler
