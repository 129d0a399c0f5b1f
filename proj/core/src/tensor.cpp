#include "lipgan/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lipgan/errors.hpp"

namespace lipgan {

namespace {
std::string shape_str(const Tensor& t) {
  std::ostringstream os;
  os << t.rows() << "x" << t.cols();
  return os.str();
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                   shape_str(b));
}
}  // namespace

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Tensor: data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("Tensor::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

double Tensor::item() const {
  if (rows_ != 1 || cols_ != 1) throw ShapeError("item: tensor is " + shape_str(*this));
  return data_[0];
}

Tensor Tensor::detached() const {
  Tensor t = *this;
  t.node_.reset();
  return t;
}

bool operator==(const Tensor& a, const Tensor& b) noexcept {
  return a.same_shape(b) && std::ranges::equal(a.values(), b.values());
}

bool all_finite(std::span<const double> values) noexcept {
  return std::ranges::all_of(values, [](double v) { return std::isfinite(v); });
}

void check_finite([[maybe_unused]] const Tensor& t, [[maybe_unused]] const char* op) {
#ifdef LIPGAN_FINITE_CHECKS
  if (!all_finite(t.values())) {
    throw NumericError(std::string(op) + ": non-finite value in " + shape_str(t) + " tensor");
  }
#endif
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  const std::size_t p = a.rows(), q = a.cols(), r = b.cols();
  Tensor out(p, r);
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < p; ++i) {
    double* orow = out.row(i).data();
    for (std::size_t k = 0; k < q; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < r; ++j) orow[j] += aik * brow[j];
    }
  }
  check_finite(out, "matmul");
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.cols() != w.rows()) shape_error("affine", x, w);
  if (b.rows() != 1 || b.cols() != w.cols()) shape_error("affine(bias)", w, b);
  Tensor out = matmul(x, w);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += b[j];
  }
  check_finite(out, "affine");
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = x.detached();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor tanh_act(const Tensor& x) {
  Tensor out = x.detached();
  for (double& v : out.values()) v = std::tanh(v);
  check_finite(out, "tanh");
  return out;
}

Tensor groupsort2(const Tensor& x) {
  if (x.cols() % 2 != 0) {
    throw ConfigError("groupsort2: width " + std::to_string(x.cols()) + " is odd");
  }
  Tensor out = x.detached();
  auto v = out.values();
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) {
    if (v[i] < v[i + 1]) std::swap(v[i], v[i + 1]);
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("add", a, b);
  Tensor out = a.detached();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  check_finite(out, "add");
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("sub", a, b);
  Tensor out = a.detached();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  check_finite(out, "sub");
  return out;
}

Tensor scale(const Tensor& x, double s) {
  Tensor out = x.detached();
  for (double& v : out.values()) v *= s;
  check_finite(out, "scale");
  return out;
}

Tensor vstack(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) shape_error("vstack", a, b);
  std::vector<double> data;
  data.reserve(a.size() + b.size());
  data.insert(data.end(), a.values().begin(), a.values().end());
  data.insert(data.end(), b.values().begin(), b.values().end());
  return Tensor(a.rows() + b.rows(), a.cols(), std::move(data));
}

double frobenius_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

double norm_1(const Tensor& a) {
  std::vector<double> col(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) col[j] += std::abs(a(i, j));
  return col.empty() ? 0.0 : *std::ranges::max_element(col);
}

double norm_inf(const Tensor& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double max_abs(const Tensor& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace lipgan
