#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lipgan/rng.hpp"
#include "lipgan/tensor.hpp"

namespace lipgan {

/// Pairwise Euclidean distances between the rows of two sample matrices.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major

  double operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

CostMatrix cost_matrix(const Tensor& a, const Tensor& b);

struct TransportEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

struct EmdResult {
  double value = 0.0;
  /// Nonzero entries of an optimal basic plan (at most m + n - 1).
  std::vector<TransportEntry> plan;
  long pivots = 0;
};

/// Exact discrete optimal transport by network simplex.
///
/// Weights must be nonnegative and each sum to 1 within 1e-9. Equal weights
/// are solved on exact integer flows; general weights use double flows. The
/// pivot cap is 50 (m + n)^2; exceeding it raises NumericError.
EmdResult emd_exact(const CostMatrix& cost, std::span<const double> weights_a,
                    std::span<const double> weights_b);

/// Exact W1 between the uniform empirical measures on the rows of a and b.
double exact_w1(const Tensor& a, const Tensor& b);

/// 1-d W1 for equal-size samples: mean |a_(i) - b_(i)| after sorting both.
double w1_1d_sorted(std::span<const double> a, std::span<const double> b);

/// Mean of w1_1d_sorted over `projections` random unit directions.
/// Batches must have equal dimension and equal row counts.
double sliced_w1(const Tensor& a, const Tensor& b, int projections, CounterRng& rng);

/// Fraction of rows whose l2 norm is >= m_tilde.
double tail_prob_diagnostic(const Tensor& batch, double m_tilde);

/// One exact-W1 evaluation.
struct W1Report {
  std::string experiment_id;
  std::uint64_t seed = 0;
  int repeat = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  double w1 = 0.0;
  double elapsed_s = 0.0;
};

/// "experiment_id,seed,repeat,m,n,w1,elapsed_s"
std::string w1_csv_header();
std::string to_csv_row(const W1Report& r);

}  // namespace lipgan
