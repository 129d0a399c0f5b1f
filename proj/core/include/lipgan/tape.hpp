#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lipgan/tensor.hpp"

namespace lipgan {

class Gradients;

/// Define-by-run reverse-mode tape.
///
/// Every op on tensors that carry a node of this tape appends a node holding
/// what its backward rule needs. Ops whose inputs are all constants (no node)
/// compute the plain value and record nothing. Node ids are append order, so
/// inputs always precede outputs.
///
/// Subgradient conventions: relu'(0) = 0; groupsort2 on a tied pair routes
/// the first output (max) to the first input and the second (min) to the second.
class Tape {
 public:
  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) noexcept = default;
  Tape& operator=(Tape&&) noexcept = default;

  /// Registers a leaf (trainable) tensor and returns it with a node attached.
  Tensor variable(Tensor value);

  Tensor matmul(const Tensor& a, const Tensor& b);
  Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);
  Tensor relu(const Tensor& x);
  Tensor tanh(const Tensor& x);
  Tensor groupsort2(const Tensor& x);
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor scale(const Tensor& x, double s);
  /// Elementwise product.
  Tensor mul(const Tensor& a, const Tensor& b);
  /// Mean of an m x 1 column; m = 0 is an error.
  Tensor reduce_mean(const Tensor& x);
  /// Sum of all entries.
  Tensor reduce_sum(const Tensor& x);

  /// Reverse sweep from a 1x1 loss recorded on this tape. Does not modify
  /// the tape, so repeated calls give identical results.
  Gradients backward(const Tensor& loss) const;

  std::size_t size() const noexcept { return nodes_.size(); }
  std::uint64_t id() const noexcept { return id_; }

 private:
  enum class Op { Leaf, MatMul, Affine, Relu, Tanh, GroupSort2, Add, Sub, Scale, Mul, Mean, Sum };

  static constexpr std::size_t kNoInput = static_cast<std::size_t>(-1);

  struct Node {
    Op op = Op::Leaf;
    std::size_t in[3] = {kNoInput, kNoInput, kNoInput};
    std::size_t rows = 0, cols = 0;
    // Values saved for the backward rule (operands, outputs or masks).
    Tensor saved0, saved1;
    double scalar = 0.0;
    std::vector<std::uint8_t> mask;
  };

  std::size_t input_id(const Tensor& t) const;
  bool tracked(const Tensor& t) const { return input_id(t) != kNoInput; }
  Tensor record(Node node, Tensor value);

  std::uint64_t id_;
  std::vector<Node> nodes_;
};

/// Per-node gradient accumulators produced by Tape::backward.
class Gradients {
 public:
  /// dLoss/dt for a tensor recorded on the originating tape. Nodes the loss
  /// does not depend on get an all-zero tensor of the right shape.
  Tensor wrt(const Tensor& t) const;

 private:
  friend class Tape;
  std::uint64_t tape_id_ = 0;
  std::vector<Tensor> grads_;
  std::vector<std::pair<std::size_t, std::size_t>> shapes_;
};

}  // namespace lipgan
