#pragma once

#include "calgeo/field.hpp"

#include <cstdint>
#include <random>

namespace calgeo {

// ---- real/complex dictionary ---------------------------------------------

/// Block assembly [g_ij] = ((G+conj(G), (G-G^T)/i), ((G^T-G)/i, G+conj(G))).
/// Rejects non-Hermitian input.
SymTensorField hermitian_to_real(const HermitianField& H, double tol = 1e-12);

/// Inverse of hermitian_to_real on J-invariant tensors.
HermitianField real_to_hermitian(const SymTensorField& h);

/// Per-node matrix of second partials (spectral on tori).
SymTensorField real_hessian(const ScalarField& f);

/// [f_{i jbar}] = (A+C)/4 + i (B^T - B)/4 from the real Hessian blocks.
HermitianField complex_hessian(const ScalarField& f);

/// J-invariant part of the real Hessian: the differential of the
/// potential-to-metric embedding. On the sphere (n = 1) this is the
/// conformal representative (Lap_ref f / 2) * g_round.
SymTensorField nabla11(const ScalarField& f);

/// P^{1,1} h = (h + J.h)/2 on tori.
SymTensorField j_invariant_projection(const SymTensorField& h);

/// Reference flat/round metric of the grid as a tensor field.
SymTensorField reference_metric(const GridPtr& grid);

// ---- quadrature and pointwise algebra ------------------------------------

/// Integral of f against the density mu (deterministic pairwise reduction).
double integrate(const ScalarField& f, const Density& mu);

/// Integral of f against the reference density mu_0.
double integrate_ref(const ScalarField& f);

/// Per-node tr(g^{-1} h g^{-1} k). Throws on singular g.
ScalarField pointwise_trace_pair(const SymTensorField& g,
                                 const SymTensorField& h,
                                 const SymTensorField& k);
ScalarField pointwise_trace_pair_serial(const SymTensorField& g,
                                        const SymTensorField& h,
                                        const SymTensorField& k);

/// Per-node tr(g^{-1} h).
ScalarField pointwise_trace(const SymTensorField& g, const SymTensorField& h);

/// dV_g = sqrt(det[g_ij]) x coordinate density, as a ratio against mu_0.
Density riemannian_volume(const SymTensorField& g);

/// Reference volume form (ratio 1).
Density reference_volume(const GridPtr& grid);

// ---- Laplacians ----------------------------------------------------------

/// Convention used everywhere: Lap_g nu = tr(g^{-1} nabla11 nu) / 2.
/// At the flat torus reference this is half the coordinate Laplacian.
ScalarField laplacian_at(const SymTensorField& g, const ScalarField& nu);

/// Laplacian at the reference metric.
ScalarField laplacian_ref(const ScalarField& nu);

/// Spectral inverse of laplacian_ref on tori. Input is projected onto
/// mean-zero; output is mean-zero (both against mu_0).
ScalarField inv_laplacian_ref(const ScalarField& w);

double mean_ref(const ScalarField& f);

// ---- seeded smooth test data ---------------------------------------------

/// Random real trigonometric polynomial (torus) / even Legendre-style
/// polynomial in cos(theta) (sphere), mean-zero, sup-norm about `amplitude`.
ScalarField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng,
                                double amplitude, int max_mode = 2);

/// Random symmetric tensor field with smooth coefficients.
SymTensorField random_sym_tensor(const GridPtr& grid, std::mt19937_64& rng,
                                 double amplitude, int max_mode = 2);

} // namespace calgeo
