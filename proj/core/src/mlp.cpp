#include "lipgan/mlp.hpp"

#include <cmath>

#include "lipgan/constraints.hpp"
#include "lipgan/errors.hpp"

namespace lipgan {

void MlpSpec::validate() const {
  if (input_dim == 0 || output_dim == 0 || width == 0) {
    throw ConfigError("MlpSpec: input_dim, output_dim and width must be positive");
  }
  if (depth < 2) throw ConfigError("MlpSpec: depth must be >= 2");
  if (hidden == HiddenActivation::GroupSort2 && width % 2 != 0) {
    throw ConfigError("MlpSpec: groupsort2 needs an even width, got " + std::to_string(width));
  }
  if (constraint.mode == ConstraintMode::Bjorck) {
    if (constraint.bjorck_steps < 1) throw ConfigError("MlpSpec: bjorck steps must be >= 1");
    if (constraint.bjorck_order != 1 && constraint.bjorck_order != 2) {
      throw ConfigError("MlpSpec: bjorck order must be 1 or 2");
    }
  }
  if (constraint.mode == ConstraintMode::Clip && !(constraint.clip > 0.0)) {
    throw ConfigError("MlpSpec: clip bound must be > 0");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> MlpSpec::layer_shapes() const {
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  shapes.reserve(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    const std::size_t fan_in = i == 0 ? input_dim : width;
    const std::size_t fan_out = i + 1 == depth ? output_dim : width;
    shapes.emplace_back(fan_in, fan_out);
  }
  return shapes;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

MlpParams init_params(const MlpSpec& spec, CounterRng& rng) {
  spec.validate();
  MlpParams params;
  params.spec = spec;
  for (const auto& [fan_in, fan_out] : spec.layer_shapes()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor w(fan_in, fan_out);
    for (double& v : w.values()) v = rng.uniform(-limit, limit);
    params.weights.push_back(std::move(w));
    params.biases.emplace_back(1, fan_out, 0.0);
  }
  apply_constraint(params);
  return params;
}

namespace {
void check_input(const MlpParams& params, const Tensor& x) {
  if (x.cols() != params.spec.input_dim) {
    throw ShapeError("forward: input has " + std::to_string(x.cols()) + " columns, network expects " +
                     std::to_string(params.spec.input_dim));
  }
  if (params.weights.size() != params.spec.depth || params.biases.size() != params.spec.depth) {
    throw ShapeError("forward: parameter list does not match spec depth");
  }
}
}  // namespace

Tensor forward(const MlpParams& params, const Tensor& x) {
  check_input(params, x);
  Tensor h = x.detached();
  const std::size_t depth = params.weights.size();
  for (std::size_t i = 0; i < depth; ++i) {
    h = affine(h, params.weights[i], params.biases[i]);
    if (i + 1 < depth) {
      h = params.spec.hidden == HiddenActivation::Relu ? relu(h) : groupsort2(h);
    }
  }
  if (params.spec.output == OutputActivation::Tanh) h = tanh_act(h);
  return h;
}

Tensor forward(Tape& tape, const MlpParams& params, const Tensor& x) {
  check_input(params, x);
  Tensor h = x;
  const std::size_t depth = params.weights.size();
  for (std::size_t i = 0; i < depth; ++i) {
    h = tape.affine(h, params.weights[i], params.biases[i]);
    if (i + 1 < depth) {
      h = params.spec.hidden == HiddenActivation::Relu ? tape.relu(h) : tape.groupsort2(h);
    }
  }
  if (params.spec.output == OutputActivation::Tanh) h = tape.tanh(h);
  return h;
}

MlpParams bind(Tape& tape, const MlpParams& params) {
  MlpParams bound;
  bound.spec = params.spec;
  for (const auto& w : params.weights) bound.weights.push_back(tape.variable(w));
  for (const auto& b : params.biases) bound.biases.push_back(tape.variable(b));
  return bound;
}

MlpGrads gradients_for(const Gradients& grads, const MlpParams& bound) {
  MlpGrads out;
  for (const auto& w : bound.weights) out.weights.push_back(grads.wrt(w));
  for (const auto& b : bound.biases) out.biases.push_back(grads.wrt(b));
  return out;
}

std::string_view to_string(HiddenActivation a) {
  return a == HiddenActivation::Relu ? "relu" : "groupsort2";
}

std::string_view to_string(OutputActivation a) {
  return a == OutputActivation::None ? "none" : "tanh";
}

std::string_view to_string(ConstraintMode m) {
  switch (m) {
    case ConstraintMode::None: return "none";
    case ConstraintMode::Bjorck: return "bjorck";
    case ConstraintMode::InfNorm: return "inf_norm";
    case ConstraintMode::Clip: return "clip";
  }
  return "none";
}

HiddenActivation parse_hidden_activation(std::string_view s) {
  if (s == "relu") return HiddenActivation::Relu;
  if (s == "groupsort2") return HiddenActivation::GroupSort2;
  throw ConfigError("unknown hidden activation '" + std::string(s) + "'");
}

OutputActivation parse_output_activation(std::string_view s) {
  if (s == "none") return OutputActivation::None;
  if (s == "tanh") return OutputActivation::Tanh;
  throw ConfigError("unknown output activation '" + std::string(s) + "'");
}

ConstraintMode parse_constraint_mode(std::string_view s) {
  if (s == "none") return ConstraintMode::None;
  if (s == "bjorck") return ConstraintMode::Bjorck;
  if (s == "inf_norm") return ConstraintMode::InfNorm;
  if (s == "clip") return ConstraintMode::Clip;
  throw ConfigError("unknown constraint mode '" + std::string(s) + "'");
}

}  // namespace lipgan
