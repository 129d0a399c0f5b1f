#pragma once

// Reference implementations used only by the tests. None of them shares code
// with the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "lipgan/mlp.hpp"
#include "lipgan/rng.hpp"
#include "lipgan/tensor.hpp"

namespace oracle {

using lipgan::Tensor;

inline Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  Tensor out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

inline Tensor random_tensor(std::size_t r, std::size_t c, lipgan::CounterRng& rng, double lo = -2.0,
                            double hi = 2.0) {
  Tensor t(r, c);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

inline double rel_err(double a, double b, double floor = 1e-4) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Central differences of a scalar function of one tensor.
inline Tensor central_diff(const std::function<double(const Tensor&)>& f, const Tensor& x, double h = 1e-5) {
  Tensor g(x.rows(), x.cols());
  Tensor p = x.detached();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = p[i];
    p[i] = orig + h;
    const double up = f(p);
    p[i] = orig - h;
    const double down = f(p);
    p[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Scalar-loop MLP forward that also reports the smallest distance of any
/// pre-activation to a kink (ReLU at 0, GroupSort pair tie).
inline Tensor mlp_forward(const lipgan::MlpParams& p, const Tensor& x, double* kink_distance = nullptr) {
  double nearest = std::numeric_limits<double>::infinity();
  Tensor h = x.detached();
  const std::size_t layers = p.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const Tensor& w = p.weights[l];
    Tensor z(h.rows(), w.cols());
    for (std::size_t i = 0; i < h.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j) {
        double s = p.biases[l][j];
        for (std::size_t k = 0; k < h.cols(); ++k) s += h(i, k) * w(k, j);
        z(i, j) = s;
      }
    if (l + 1 < layers) {
      if (p.spec.hidden == lipgan::HiddenActivation::Relu) {
        for (std::size_t i = 0; i < z.size(); ++i) {
          nearest = std::min(nearest, std::abs(z[i]));
          z[i] = z[i] > 0.0 ? z[i] : 0.0;
        }
      } else {
        for (std::size_t i = 0; i < z.rows(); ++i)
          for (std::size_t j = 0; j + 1 < z.cols(); j += 2) {
            const double a = z(i, j), b = z(i, j + 1);
            nearest = std::min(nearest, std::abs(a - b));
            z(i, j) = std::max(a, b);
            z(i, j + 1) = std::min(a, b);
          }
      }
    } else if (p.spec.output == lipgan::OutputActivation::Tanh) {
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::tanh(z[i]);
    }
    h = z;
  }
  if (kink_distance) *kink_distance = nearest;
  return h;
}

/// Minimum over all n! assignments of sum_i c[i][perm[i]] / n.
inline double brute_force_assignment(const std::vector<double>& cost, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i * n + perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

/// Optimal cost of the 3 x 2 transportation problem by enumerating the
/// vertices of its polytope. With x_i = flow from i to column 0, the flow to
/// column 1 is a_i - x_i and the only coupling is sum x_i = b_0. At a vertex
/// at most one x_i lies strictly between its bounds 0 and a_i.
inline double transport_3x2_vertices(const double c[3][2], const double a[3], const double b[2]) {
  double best = std::numeric_limits<double>::infinity();
  for (int free_i = 0; free_i < 3; ++free_i)
    for (int mask = 0; mask < 4; ++mask) {
      double x[3];
      double fixed = 0.0;
      int bit = 0;
      for (int i = 0; i < 3; ++i) {
        if (i == free_i) continue;
        x[i] = (mask >> bit++) & 1 ? a[i] : 0.0;
        fixed += x[i];
      }
      x[free_i] = b[0] - fixed;
      if (x[free_i] < -1e-12 || x[free_i] > a[free_i] + 1e-12) continue;
      double cost = 0.0;
      for (int i = 0; i < 3; ++i) cost += c[i][0] * x[i] + c[i][1] * (a[i] - x[i]);
      best = std::min(best, cost);
    }
  return best;
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// eigenvalues (unsorted) and writes eigenvectors as columns of `vectors`.
inline std::vector<double> jacobi_eigen(Tensor s, Tensor* vectors = nullptr) {
  const std::size_t n = s.rows();
  Tensor v = Tensor::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(s(p, q)) < 1e-300) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
  if (vectors) *vectors = v;
  return eig;
}

inline Tensor naive_transpose(const Tensor& a) {
  Tensor t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

/// Singular values, descending, from the eigenvalues of the smaller Gram matrix.
inline std::vector<double> singular_values(const Tensor& a) {
  const Tensor gram = a.rows() >= a.cols() ? naive_matmul(naive_transpose(a), a) : naive_matmul(a, naive_transpose(a));
  std::vector<double> ev = jacobi_eigen(gram);
  for (double& e : ev) e = std::sqrt(std::max(e, 0.0));
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

/// Orthogonal polar factor A (A^T A)^{-1/2} of a square, nonsingular A.
inline Tensor polar_factor(const Tensor& a) {
  Tensor v;
  const std::vector<double> ev = jacobi_eigen(naive_matmul(naive_transpose(a), a), &v);
  const std::size_t n = a.cols();
  Tensor inv_sqrt(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += v(i, k) * v(j, k) / std::sqrt(ev[k]);
      inv_sqrt(i, j) = s;
    }
  return naive_matmul(a, inv_sqrt);
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace oracle
