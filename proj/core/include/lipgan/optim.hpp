#pragma once

#include <string_view>
#include <vector>

#include "lipgan/mlp.hpp"
#include "lipgan/tensor.hpp"

namespace lipgan {

enum class OptimizerKind { Adam, RmsProp, Sgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 1e-4;
  double beta1 = 0.9;   // Adam
  double beta2 = 0.99;  // Adam
  double rho = 0.9;     // RMSProp
  double eps = 1e-8;

  void validate() const;
  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

/// First-order optimizer with per-parameter moment buffers.
///
/// Adam:    m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
///          theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
/// RMSProp: s <- rho s + (1-rho) g^2;  theta <- theta - lr g / (sqrt(s) + eps)   (uncentered)
/// SGD:     theta <- theta - lr g
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config);

  /// Buffers are shaped from the first call; later calls must match.
  /// Throws ShapeError on a missing/mis-shaped gradient and NumericError on
  /// a non-finite one.
  void step(MlpParams& params, const MlpGrads& grads);
  /// Same update on a flat list of tensors.
  void step(std::vector<Tensor*> params, const std::vector<const Tensor*>& grads);

  long steps_taken() const noexcept { return t_; }
  const OptimizerConfig& config() const noexcept { return config_; }
  const std::vector<Tensor>& first_moments() const noexcept { return m_; }
  const std::vector<Tensor>& second_moments() const noexcept { return v_; }

 private:
  OptimizerConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  long t_ = 0;
};

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer_kind(std::string_view s);

}  // namespace lipgan
