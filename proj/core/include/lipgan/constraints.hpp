#pragma once

#include "lipgan/mlp.hpp"
#include "lipgan/rng.hpp"
#include "lipgan/tensor.hpp"

namespace lipgan {

/// Björck orthonormalization.
///
/// The input is first scaled by 1/sqrt(|w|_1 |w|_inf), which bounds every
/// singular value by 1. Each step then applies A <- A (I + Q/2 + 3Q^2/8)
/// (order 2) or A <- A (I + Q/2) (order 1) with Q = I - A^T A. Wide matrices
/// use the equivalent left form with Q = I - A A^T so Q is always the
/// smaller Gram matrix. Singular values never exceed 1 after any step.
Tensor bjorck_orthonormalize(const Tensor& w, int steps, int order);

/// Per output unit (column j of a fan_in x fan_out weight), divide the unit's
/// incoming weights by max(1, l2 norm). Bounds the (2, inf) operator norm by 1.
void project_unit_l2(Tensor& w);
/// Per output unit, divide incoming weights by max(1, l1 norm). Bounds the
/// induced inf-norm by 1.
void project_unit_l1(Tensor& w);

/// First layer gets project_unit_l2, later layers project_unit_l1. Biases untouched.
void project_inf_norm(MlpParams& params);

/// Clamps every weight and bias entry to [-c, c]; c <= 0 is a ConfigError.
void clip_weights(MlpParams& params, double c);

/// Power iteration on w^T w from a random start; returns |w v| / |v| at the
/// last iterate, which never exceeds the true spectral norm. Zero matrix -> 0.
double spectral_norm_estimate(const Tensor& w, int iters, CounterRng& rng);

/// Scales each weight by min(1, m_bound / spectral norm estimate) and each
/// bias by min(1, m_bound / l2 norm).
void cap_generator_norm(MlpParams& params, double m_bound);

/// Projection selected by params.spec.constraint (no-op for mode none).
void apply_constraint(MlpParams& params);

/// True if every layer satisfies its constraint within `tol`:
/// bjorck -> spectral norm <= 1 + tol (estimated), inf_norm -> unit norms
/// <= 1 + tol, clip -> |entry| <= c.
bool satisfies_constraint(const MlpParams& params, double tol);

}  // namespace lipgan
