#include "lipgan/tape.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "lipgan/errors.hpp"

namespace lipgan {

namespace {
std::atomic<std::uint64_t> next_tape_id{1};

void accumulate(Tensor& into, const Tensor& g) {
  if (into.empty()) {
    into = g.detached();
    return;
  }
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += g[i];
}
}  // namespace

Tape::Tape() : id_(next_tape_id.fetch_add(1)) {}

std::size_t Tape::input_id(const Tensor& t) const {
  const auto& ref = t.node();
  if (!ref) return kNoInput;
  if (ref->tape_id != id_ || ref->index >= nodes_.size()) {
    throw std::logic_error("tensor is recorded on a different tape");
  }
  return ref->index;
}

Tensor Tape::record(Node node, Tensor value) {
  node.rows = value.rows();
  node.cols = value.cols();
  value.set_node(NodeRef{id_, nodes_.size()});
  nodes_.push_back(std::move(node));
  return value;
}

Tensor Tape::variable(Tensor value) {
  Node n;
  n.op = Op::Leaf;
  return record(std::move(n), value.detached());
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  Tensor out = lipgan::matmul(a, b);
  if (!tracked(a) && !tracked(b)) return out;
  Node n;
  n.op = Op::MatMul;
  n.in[0] = input_id(a);
  n.in[1] = input_id(b);
  if (tracked(b)) n.saved0 = a.detached();
  if (tracked(a)) n.saved1 = b.detached();
  return record(std::move(n), std::move(out));
}

Tensor Tape::affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  Tensor out = lipgan::affine(x, w, b);
  if (!tracked(x) && !tracked(w) && !tracked(b)) return out;
  Node n;
  n.op = Op::Affine;
  n.in[0] = input_id(x);
  n.in[1] = input_id(w);
  n.in[2] = input_id(b);
  if (tracked(w)) n.saved0 = x.detached();
  if (tracked(x)) n.saved1 = w.detached();
  return record(std::move(n), std::move(out));
}

Tensor Tape::relu(const Tensor& x) {
  Tensor out = lipgan::relu(x);
  if (!tracked(x)) return out;
  Node n;
  n.op = Op::Relu;
  n.in[0] = input_id(x);
  n.mask.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) n.mask[i] = x[i] > 0.0 ? 1 : 0;
  return record(std::move(n), std::move(out));
}

Tensor Tape::tanh(const Tensor& x) {
  Tensor out = lipgan::tanh_act(x);
  if (!tracked(x)) return out;
  Node n;
  n.op = Op::Tanh;
  n.in[0] = input_id(x);
  n.saved0 = out.detached();
  return record(std::move(n), std::move(out));
}

Tensor Tape::groupsort2(const Tensor& x) {
  Tensor out = lipgan::groupsort2(x);
  if (!tracked(x)) return out;
  Node n;
  n.op = Op::GroupSort2;
  n.in[0] = input_id(x);
  // mask[p] = 1 when pair p was swapped; ties are not swapped.
  n.mask.resize(x.size() / 2);
  for (std::size_t p = 0; p < n.mask.size(); ++p) {
    n.mask[p] = x[2 * p] < x[2 * p + 1] ? 1 : 0;
  }
  return record(std::move(n), std::move(out));
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  Tensor out = lipgan::add(a, b);
  if (!tracked(a) && !tracked(b)) return out;
  Node n;
  n.op = Op::Add;
  n.in[0] = input_id(a);
  n.in[1] = input_id(b);
  return record(std::move(n), std::move(out));
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  Tensor out = lipgan::sub(a, b);
  if (!tracked(a) && !tracked(b)) return out;
  Node n;
  n.op = Op::Sub;
  n.in[0] = input_id(a);
  n.in[1] = input_id(b);
  return record(std::move(n), std::move(out));
}

Tensor Tape::scale(const Tensor& x, double s) {
  Tensor out = lipgan::scale(x, s);
  if (!tracked(x)) return out;
  Node n;
  n.op = Op::Scale;
  n.in[0] = input_id(x);
  n.scalar = s;
  return record(std::move(n), std::move(out));
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw ShapeError("mul: shapes differ");
  Tensor out = a.detached();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  check_finite(out, "mul");
  if (!tracked(a) && !tracked(b)) return out;
  Node n;
  n.op = Op::Mul;
  n.in[0] = input_id(a);
  n.in[1] = input_id(b);
  n.saved0 = a.detached();
  n.saved1 = b.detached();
  return record(std::move(n), std::move(out));
}

Tensor Tape::reduce_mean(const Tensor& x) {
  if (x.cols() != 1) throw ShapeError("reduce_mean: expected a column vector");
  if (x.rows() == 0) throw ShapeError("reduce_mean: empty batch");
  double s = 0.0;
  for (double v : x.values()) s += v;
  Tensor out = Tensor::scalar(s / static_cast<double>(x.rows()));
  check_finite(out, "reduce_mean");
  if (!tracked(x)) return out;
  Node n;
  n.op = Op::Mean;
  n.in[0] = input_id(x);
  n.scalar = 1.0 / static_cast<double>(x.rows());
  return record(std::move(n), std::move(out));
}

Tensor Tape::reduce_sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.values()) s += v;
  Tensor out = Tensor::scalar(s);
  check_finite(out, "reduce_sum");
  if (!tracked(x)) return out;
  Node n;
  n.op = Op::Sum;
  n.in[0] = input_id(x);
  return record(std::move(n), std::move(out));
}

Gradients Tape::backward(const Tensor& loss) const {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1");
  }
  const std::size_t root = input_id(loss);
  if (root == kNoInput) throw std::logic_error("backward: loss is not recorded on this tape");

  Gradients out;
  out.tape_id_ = id_;
  out.grads_.resize(nodes_.size());
  out.shapes_.reserve(nodes_.size());
  for (const Node& n : nodes_) out.shapes_.emplace_back(n.rows, n.cols);
  auto& g = out.grads_;
  g[root] = Tensor::scalar(1.0);

  for (std::size_t id = root + 1; id-- > 0;) {
    if (g[id].empty()) continue;
    const Node& n = nodes_[id];
    const Tensor& up = g[id];
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul:
      case Op::Affine: {
        if (n.in[0] != kNoInput) accumulate(g[n.in[0]], lipgan::matmul(up, transpose(n.saved1)));
        if (n.in[1] != kNoInput) accumulate(g[n.in[1]], lipgan::matmul(transpose(n.saved0), up));
        if (n.op == Op::Affine && n.in[2] != kNoInput) {
          Tensor gb(1, up.cols());
          for (std::size_t i = 0; i < up.rows(); ++i)
            for (std::size_t j = 0; j < up.cols(); ++j) gb[j] += up(i, j);
          accumulate(g[n.in[2]], gb);
        }
        break;
      }
      case Op::Relu: {
        Tensor gx = up.detached();
        for (std::size_t i = 0; i < gx.size(); ++i)
          if (!n.mask[i]) gx[i] = 0.0;
        accumulate(g[n.in[0]], gx);
        break;
      }
      case Op::Tanh: {
        Tensor gx = up.detached();
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] *= 1.0 - n.saved0[i] * n.saved0[i];
        accumulate(g[n.in[0]], gx);
        break;
      }
      case Op::GroupSort2: {
        Tensor gx = up.detached();
        for (std::size_t p = 0; p < n.mask.size(); ++p)
          if (n.mask[p]) std::swap(gx[2 * p], gx[2 * p + 1]);
        accumulate(g[n.in[0]], gx);
        break;
      }
      case Op::Add:
        if (n.in[0] != kNoInput) accumulate(g[n.in[0]], up);
        if (n.in[1] != kNoInput) accumulate(g[n.in[1]], up);
        break;
      case Op::Sub:
        if (n.in[0] != kNoInput) accumulate(g[n.in[0]], up);
        if (n.in[1] != kNoInput) accumulate(g[n.in[1]], lipgan::scale(up, -1.0));
        break;
      case Op::Scale:
        accumulate(g[n.in[0]], lipgan::scale(up, n.scalar));
        break;
      case Op::Mul: {
        if (n.in[0] != kNoInput) {
          Tensor ga = up.detached();
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= n.saved1[i];
          accumulate(g[n.in[0]], ga);
        }
        if (n.in[1] != kNoInput) {
          Tensor gb = up.detached();
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] *= n.saved0[i];
          accumulate(g[n.in[1]], gb);
        }
        break;
      }
      case Op::Mean:
      case Op::Sum: {
        const Node& in = nodes_[n.in[0]];
        const double each = up[0] * (n.op == Op::Mean ? n.scalar : 1.0);
        accumulate(g[n.in[0]], Tensor(in.rows, in.cols, each));
        break;
      }
    }
  }
  return out;
}

Tensor Gradients::wrt(const Tensor& t) const {
  const auto& ref = t.node();
  if (!ref || ref->tape_id != tape_id_ || ref->index >= grads_.size()) {
    throw std::logic_error("Gradients::wrt: tensor is not recorded on this tape");
  }
  const Tensor& g = grads_[ref->index];
  if (!g.empty()) return g.detached();
  const auto [r, c] = shapes_[ref->index];
  return Tensor(r, c, 0.0);
}

}  // namespace lipgan
