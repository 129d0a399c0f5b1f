#include "lipgan/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "lipgan/errors.hpp"

namespace lipgan {

namespace {

// I + Q/2 (+ 3Q^2/8), computed for a square Q.
Tensor bjorck_polynomial(const Tensor& q, int order) {
  const std::size_t n = q.rows();
  Tensor p = scale(q, 0.5);
  if (order == 2) {
    const Tensor q2 = matmul(q, q);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += 0.375 * q2[i];
  }
  for (std::size_t i = 0; i < n; ++i) p(i, i) += 1.0;
  return p;
}

Tensor identity_minus(const Tensor& gram) {
  Tensor q = scale(gram, -1.0);
  for (std::size_t i = 0; i < q.rows(); ++i) q(i, i) += 1.0;
  return q;
}

double column_norm(const Tensor& w, std::size_t j, bool l1) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.rows(); ++i) s += l1 ? std::abs(w(i, j)) : w(i, j) * w(i, j);
  return l1 ? s : std::sqrt(s);
}

void project_columns(Tensor& w, bool l1) {
  for (std::size_t j = 0; j < w.cols(); ++j) {
    const double norm = column_norm(w, j, l1);
    if (norm > 1.0) {
      for (std::size_t i = 0; i < w.rows(); ++i) w(i, j) /= norm;
    }
  }
}

double l2_norm(const Tensor& t) { return frobenius_norm(t); }

}  // namespace

Tensor bjorck_orthonormalize(const Tensor& w, int steps, int order) {
  if (steps < 1) throw ConfigError("bjorck_orthonormalize: steps must be >= 1");
  if (order != 1 && order != 2) throw ConfigError("bjorck_orthonormalize: order must be 1 or 2");
  if (!all_finite(w.values())) throw NumericError("bjorck_orthonormalize: non-finite input");

  const double bound = std::sqrt(norm_1(w) * norm_inf(w));
  if (bound == 0.0) return w.detached();
  Tensor a = scale(w, 1.0 / bound);

  const bool tall = a.rows() >= a.cols();
  for (int s = 0; s < steps; ++s) {
    if (tall) {
      const Tensor at = transpose(a);
      a = matmul(a, bjorck_polynomial(identity_minus(matmul(at, a)), order));
    } else {
      const Tensor at = transpose(a);
      a = matmul(bjorck_polynomial(identity_minus(matmul(a, at)), order), a);
    }
  }
  return a;
}

void project_unit_l2(Tensor& w) { project_columns(w, false); }

void project_unit_l1(Tensor& w) { project_columns(w, true); }

void project_inf_norm(MlpParams& params) {
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    if (i == 0) {
      project_unit_l2(params.weights[i]);
    } else {
      project_unit_l1(params.weights[i]);
    }
  }
}

void clip_weights(MlpParams& params, double c) {
  if (!(c > 0.0)) throw ConfigError("clip_weights: bound must be > 0");
  auto clamp_all = [c](Tensor& t) {
    for (double& v : t.values()) v = std::clamp(v, -c, c);
  };
  for (auto& w : params.weights) clamp_all(w);
  for (auto& b : params.biases) clamp_all(b);
}

double spectral_norm_estimate(const Tensor& w, int iters, CounterRng& rng) {
  if (iters < 1) throw ConfigError("spectral_norm_estimate: iters must be >= 1");
  if (max_abs(w) == 0.0) return 0.0;
  Tensor v(w.cols(), 1);
  for (double& x : v.values()) x = rng.normal();
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    const double vn = l2_norm(v);
    if (vn == 0.0) return 0.0;
    v = scale(v, 1.0 / vn);
    const Tensor wv = matmul(w, v);
    estimate = l2_norm(wv);
    if (estimate == 0.0) {
      // Start vector fell in the null space; restart.
      for (double& x : v.values()) x = rng.normal();
      continue;
    }
    v = matmul(transpose(w), wv);
  }
  return estimate;
}

void cap_generator_norm(MlpParams& params, double m_bound) {
  if (!(m_bound > 0.0)) throw ConfigError("cap_generator_norm: bound must be > 0");
  CounterRng rng = CounterRng::stream(0, "cap_generator_norm");
  for (auto& w : params.weights) {
    const double sigma = spectral_norm_estimate(w, 500, rng);
    if (sigma > m_bound) w = scale(w, m_bound / sigma);
  }
  for (auto& b : params.biases) {
    const double norm = l2_norm(b);
    if (norm > m_bound) b = scale(b, m_bound / norm);
  }
}

void apply_constraint(MlpParams& params) {
  const Constraint& c = params.spec.constraint;
  switch (c.mode) {
    case ConstraintMode::None:
      break;
    case ConstraintMode::Bjorck:
      for (auto& w : params.weights) w = bjorck_orthonormalize(w, c.bjorck_steps, c.bjorck_order);
      break;
    case ConstraintMode::InfNorm:
      project_inf_norm(params);
      break;
    case ConstraintMode::Clip:
      clip_weights(params, c.clip);
      break;
  }
}

bool satisfies_constraint(const MlpParams& params, double tol) {
  const Constraint& c = params.spec.constraint;
  switch (c.mode) {
    case ConstraintMode::None:
      return true;
    case ConstraintMode::Bjorck: {
      CounterRng rng = CounterRng::stream(0, "satisfies_constraint");
      return std::ranges::all_of(params.weights, [&](const Tensor& w) {
        return spectral_norm_estimate(w, 100, rng) <= 1.0 + tol;
      });
    }
    case ConstraintMode::InfNorm:
      for (std::size_t i = 0; i < params.weights.size(); ++i) {
        const Tensor& w = params.weights[i];
        for (std::size_t j = 0; j < w.cols(); ++j) {
          if (column_norm(w, j, i != 0) > 1.0 + tol) return false;
        }
      }
      return true;
    case ConstraintMode::Clip: {
      auto within = [&](const Tensor& t) { return max_abs(t) <= c.clip; };
      return std::ranges::all_of(params.weights, within) && std::ranges::all_of(params.biases, within);
    }
  }
  return false;
}

}  // namespace lipgan
