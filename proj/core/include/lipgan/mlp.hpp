#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lipgan/rng.hpp"
#include "lipgan/tape.hpp"
#include "lipgan/tensor.hpp"

namespace lipgan {

enum class HiddenActivation { Relu, GroupSort2 };
enum class OutputActivation { None, Tanh };
enum class ConstraintMode { None, Bjorck, InfNorm, Clip };

/// Lipschitz-constraint regime applied by projection after each update.
struct Constraint {
  ConstraintMode mode = ConstraintMode::None;
  int bjorck_steps = 5;
  int bjorck_order = 2;
  double clip = 0.01;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Fully connected network description. `depth` counts weight matrices, so a
/// depth-2 net is input -> width -> output with one hidden activation.
struct MlpSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::size_t width = 0;
  std::size_t depth = 2;
  HiddenActivation hidden = HiddenActivation::Relu;
  OutputActivation output = OutputActivation::None;
  Constraint constraint;

  /// Throws ConfigError on zero dims, depth < 2, odd GroupSort width, or bad constraint values.
  void validate() const;
  /// (fan_in, fan_out) per layer.
  std::vector<std::pair<std::size_t, std::size_t>> layer_shapes() const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Layer i maps x (m x fan_in) to x * weights[i] + biases[i]; biases are 1 x fan_out.
struct MlpParams {
  MlpSpec spec;
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;

  std::size_t parameter_count() const;
};

/// Gradients with the same layout as MlpParams.
struct MlpGrads {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;
};

MlpParams init_params(const MlpSpec& spec, CounterRng& rng);

/// Plain evaluation; records nothing.
Tensor forward(const MlpParams& params, const Tensor& x);
/// Recording forward. Parameters bound with `bind` are differentiated; unbound
/// parameters act as constants.
Tensor forward(Tape& tape, const MlpParams& params, const Tensor& x);

/// Copy of `params` whose tensors are leaves on `tape`.
MlpParams bind(Tape& tape, const MlpParams& params);
/// Extracts gradients for parameters previously returned by `bind`.
MlpGrads gradients_for(const Gradients& grads, const MlpParams& bound);

std::string_view to_string(HiddenActivation a);
std::string_view to_string(OutputActivation a);
std::string_view to_string(ConstraintMode m);
HiddenActivation parse_hidden_activation(std::string_view s);
OutputActivation parse_output_activation(std::string_view s);
ConstraintMode parse_constraint_mode(std::string_view s);

}  // namespace lipgan
