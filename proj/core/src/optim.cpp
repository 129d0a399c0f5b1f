#include "lipgan/optim.hpp"

#include <cmath>
#include <string>

#include "lipgan/errors.hpp"

namespace lipgan {

void OptimizerConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("optimizer: lr must be > 0");
  if (!(eps > 0.0)) throw ConfigError("optimizer: eps must be > 0");
  if (kind == OptimizerKind::Adam && !(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("optimizer: adam betas must lie in [0, 1)");
  }
  if (kind == OptimizerKind::RmsProp && !(rho >= 0.0 && rho < 1.0)) {
    throw ConfigError("optimizer: rmsprop rho must lie in [0, 1)");
  }
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) { config_.validate(); }

void Optimizer::step(MlpParams& params, const MlpGrads& grads) {
  if (grads.weights.size() != params.weights.size() || grads.biases.size() != params.biases.size()) {
    throw ShapeError("optimizer: gradient list does not cover every parameter");
  }
  std::vector<Tensor*> p;
  std::vector<const Tensor*> g;
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    p.push_back(&params.weights[i]);
    g.push_back(&grads.weights[i]);
  }
  for (std::size_t i = 0; i < params.biases.size(); ++i) {
    p.push_back(&params.biases[i]);
    g.push_back(&grads.biases[i]);
  }
  step(std::move(p), g);
}

void Optimizer::step(std::vector<Tensor*> params, const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("optimizer: gradient list does not cover every parameter");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i] == nullptr || !grads[i]->same_shape(*params[i])) {
      throw ShapeError("optimizer: missing or mis-shaped gradient for parameter " + std::to_string(i));
    }
    if (!all_finite(grads[i]->values())) {
      throw NumericError("optimizer: non-finite gradient for parameter " + std::to_string(i));
    }
  }
  if (m_.empty()) {
    for (const Tensor* p : params) {
      m_.emplace_back(p->rows(), p->cols(), 0.0);
      v_.emplace_back(p->rows(), p->cols(), 0.0);
    }
  } else if (m_.size() != params.size()) {
    throw ShapeError("optimizer: parameter count changed between steps");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!m_[i].same_shape(*params[i])) throw ShapeError("optimizer: parameter shape changed between steps");
  }

  ++t_;
  const OptimizerConfig& c = config_;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(t_));

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i]->values();
    const auto g = grads[i]->values();
    auto m = m_[i].values();
    auto v = v_[i].values();
    switch (c.kind) {
      case OptimizerKind::Adam:
        for (std::size_t k = 0; k < theta.size(); ++k) {
          m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g[k];
          v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g[k] * g[k];
          const double m_hat = m[k] / bias1;
          const double v_hat = v[k] / bias2;
          theta[k] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
        }
        break;
      case OptimizerKind::RmsProp:
        for (std::size_t k = 0; k < theta.size(); ++k) {
          v[k] = c.rho * v[k] + (1.0 - c.rho) * g[k] * g[k];
          theta[k] -= c.lr * g[k] / (std::sqrt(v[k]) + c.eps);
        }
        break;
      case OptimizerKind::Sgd:
        for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= c.lr * g[k];
        break;
    }
  }
}

std::string_view to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::RmsProp: return "rmsprop";
    case OptimizerKind::Sgd: return "sgd";
  }
  return "adam";
}

OptimizerKind parse_optimizer_kind(std::string_view s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "rmsprop") return OptimizerKind::RmsProp;
  if (s == "sgd") return OptimizerKind::Sgd;
  throw ConfigError("unknown optimizer '" + std::string(s) + "'");
}

}  // namespace lipgan
