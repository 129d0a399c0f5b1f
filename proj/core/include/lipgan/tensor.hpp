#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace lipgan {

/// Reference to a node on a specific Tape.
struct NodeRef {
  std::uint64_t tape_id = 0;
  std::size_t index = 0;
};

/// Dense row-major matrix of doubles. A tensor produced by a recording Tape
/// op carries a NodeRef; plain tensors are constants to the tape.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);
  static Tensor scalar(double v) { return Tensor(1, 1, v); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  /// Value of a 1x1 tensor.
  double item() const;

  const std::optional<NodeRef>& node() const noexcept { return node_; }
  void set_node(NodeRef ref) noexcept { node_ = ref; }
  /// Copy of the values with no tape node.
  Tensor detached() const;

  bool same_shape(const Tensor& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::optional<NodeRef> node_;
};

/// Value equality (ignores tape nodes).
bool operator==(const Tensor& a, const Tensor& b) noexcept;

// Plain (non-recording) linear algebra. These never attach tape nodes.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
/// x * w + b, with the 1 x r bias broadcast over rows.
Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);
Tensor relu(const Tensor& x);
Tensor tanh_act(const Tensor& x);
/// Sorts each consecutive coordinate pair (2j, 2j+1) of every row into (max, min).
Tensor groupsort2(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double s);
/// Stacks rows of a on top of rows of b.
Tensor vstack(const Tensor& a, const Tensor& b);

double frobenius_norm(const Tensor& a);
/// Induced 1-norm: max column absolute sum.
double norm_1(const Tensor& a);
/// Induced infinity-norm: max row absolute sum.
double norm_inf(const Tensor& a);
double max_abs(const Tensor& a);

/// Throws NumericError naming `op` if any entry is NaN or Inf. Compiled to a
/// no-op unless LIPGAN_FINITE_CHECKS is defined.
void check_finite(const Tensor& t, const char* op);
/// Unconditional variant.
bool all_finite(std::span<const double> values) noexcept;

}  // namespace lipgan
