#include "lipgan/ot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lipgan/errors.hpp"
#include "network_simplex.hpp"

namespace lipgan {

CostMatrix cost_matrix(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("cost_matrix: dimensions differ (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()) + ")");
  }
  CostMatrix c{a.rows(), b.rows(), std::vector<double>(a.rows() * b.rows())};
  const std::size_t d = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* x = a.row(i).data();
    double* out = c.entries.data() + i * b.rows();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* y = b.row(j).data();
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = x[k] - y[k];
        s += diff * diff;
      }
      out[j] = std::sqrt(s);
    }
  }
  return c;
}

namespace {

void check_weights(std::span<const double> w, const char* which) {
  if (w.empty()) throw ConfigError(std::string("emd_exact: ") + which + " weights are empty");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("emd_exact: ") + which + " weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (sum == 0.0) throw ConfigError(std::string("emd_exact: ") + which + " weights sum to 0");
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError(std::string("emd_exact: ") + which + " weights sum to " + std::to_string(sum) +
                      ", expected 1");
  }
}

bool uniform(std::span<const double> w) {
  const double expect = 1.0 / static_cast<double>(w.size());
  return std::ranges::all_of(w, [&](double v) { return std::abs(v - expect) <= 1e-15; });
}

long pivot_cap(std::size_t m, std::size_t n) {
  const double mn = static_cast<double>(m + n);
  return static_cast<long>(std::min(50.0 * mn * mn, 9.0e18));
}

}  // namespace

EmdResult emd_exact(const CostMatrix& cost, std::span<const double> weights_a,
                    std::span<const double> weights_b) {
  const std::size_t m = cost.rows, n = cost.cols;
  if (weights_a.size() != m || weights_b.size() != n) {
    throw ShapeError("emd_exact: weight lengths do not match the cost matrix");
  }
  check_weights(weights_a, "source");
  check_weights(weights_b, "target");
  if (!all_finite(cost.entries)) throw NumericError("emd_exact: non-finite cost");

  EmdResult result;
  const long lm = static_cast<long>(m), ln = static_cast<long>(n);

  if (uniform(weights_a) && uniform(weights_b)) {
    // Integer supplies n/g per source and m/g per sink carry the same plan scaled by mn/g.
    const std::int64_t g = std::gcd(static_cast<std::int64_t>(m), static_cast<std::int64_t>(n));
    const std::int64_t total = static_cast<std::int64_t>(m) * static_cast<std::int64_t>(n) / g;
    detail::TransportSimplex<std::int64_t> solver(cost.entries, lm, ln,
                                                  std::vector<std::int64_t>(m, static_cast<std::int64_t>(n) / g),
                                                  std::vector<std::int64_t>(n, static_cast<std::int64_t>(m) / g));
    result.pivots = solver.solve(pivot_cap(m, n));
    if (solver.artificial_residual() != 0) {
      throw NumericError("emd_exact: infeasible solution (artificial flow remains)");
    }
    const double scale = 1.0 / static_cast<double>(total);
    double value = 0.0;
    for (long i = 0; i < lm; ++i) {
      for (long j = 0; j < ln; ++j) {
        const std::int64_t f = solver.flow(i, j);
        if (f == 0) continue;
        const double mass = static_cast<double>(f) * scale;
        value += mass * cost(i, j);
        result.plan.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), mass});
      }
    }
    result.value = value;
    return result;
  }

  // Make the two totals agree exactly so the root carries no net supply.
  std::vector<double> a(weights_a.begin(), weights_a.end());
  std::vector<double> b(weights_b.begin(), weights_b.end());
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  auto biggest = std::ranges::max_element(b);
  *biggest += sa - sb;

  detail::TransportSimplex<double> solver(cost.entries, lm, ln, a, b);
  result.pivots = solver.solve(pivot_cap(m, n));
  if (solver.artificial_residual() > 1e-12) {
    throw NumericError("emd_exact: infeasible solution (artificial flow " +
                       std::to_string(solver.artificial_residual()) + ")");
  }
  double value = 0.0;
  for (long i = 0; i < lm; ++i) {
    for (long j = 0; j < ln; ++j) {
      const double f = solver.flow(i, j);
      if (f <= 0.0) continue;
      value += f * cost(i, j);
      result.plan.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), f});
    }
  }
  result.value = value;
  return result;
}

double exact_w1(const Tensor& a, const Tensor& b) {
  if (a.rows() == 0 || b.rows() == 0) throw ShapeError("exact_w1: empty sample set");
  const CostMatrix c = cost_matrix(a, b);
  const std::vector<double> wa(a.rows(), 1.0 / static_cast<double>(a.rows()));
  const std::vector<double> wb(b.rows(), 1.0 / static_cast<double>(b.rows()));
  return emd_exact(c, wa, wb).value;
}

double w1_1d_sorted(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("w1_1d_sorted: sample counts differ (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ShapeError("w1_1d_sorted: empty samples");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::ranges::sort(sa);
  std::ranges::sort(sb);
  double s = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) s += std::abs(sa[i] - sb[i]);
  return s / static_cast<double>(sa.size());
}

double sliced_w1(const Tensor& a, const Tensor& b, int projections, CounterRng& rng) {
  if (a.cols() != b.cols()) throw ShapeError("sliced_w1: dimensions differ");
  if (projections < 1) throw ConfigError("sliced_w1: projections must be >= 1");
  const std::size_t d = a.cols();
  std::vector<double> dir(d), pa(a.rows()), pb(b.rows());
  double total = 0.0;
  for (int p = 0; p < projections; ++p) {
    double norm = 0.0;
    while (norm == 0.0) {
      norm = 0.0;
      for (double& v : dir) {
        v = rng.normal();
        norm += v * v;
      }
      norm = std::sqrt(norm);
    }
    for (double& v : dir) v /= norm;
    for (std::size_t i = 0; i < a.rows(); ++i) pa[i] = std::inner_product(dir.begin(), dir.end(), a.row(i).begin(), 0.0);
    for (std::size_t i = 0; i < b.rows(); ++i) pb[i] = std::inner_product(dir.begin(), dir.end(), b.row(i).begin(), 0.0);
    total += w1_1d_sorted(pa, pb);
  }
  return total / projections;
}

double tail_prob_diagnostic(const Tensor& batch, double m_tilde) {
  if (!(m_tilde > 0.0)) throw ConfigError("tail_prob_diagnostic: threshold must be > 0");
  if (batch.rows() == 0) throw ShapeError("tail_prob_diagnostic: empty batch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    double s = 0.0;
    for (double v : batch.row(i)) s += v * v;
    if (std::sqrt(s) >= m_tilde) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.rows());
}

std::string w1_csv_header() { return "experiment_id,seed,repeat,m,n,w1,elapsed_s"; }

std::string to_csv_row(const W1Report& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.experiment_id << ',' << r.seed << ',' << r.repeat << ',' << r.m << ',' << r.n << ',' << r.w1
     << ',' << r.elapsed_s;
  return os.str();
}

}  // namespace lipgan
