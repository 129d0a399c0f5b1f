#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lipgan/checkpoint.hpp"
#include "lipgan/constraints.hpp"
#include "lipgan/errors.hpp"
#include "oracles.hpp"

using namespace lipgan;

namespace {

MlpSpec critic(std::size_t in, std::size_t width, std::size_t depth, ConstraintMode mode) {
  MlpSpec s;
  s.input_dim = in;
  s.output_dim = 1;
  s.width = width;
  s.depth = depth;
  s.hidden = HiddenActivation::GroupSort2;
  s.constraint.mode = mode;
  return s;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(MlpSpec, Validation) {
  MlpSpec s{2, 1, 0, 2};
  EXPECT_THROW(s.validate(), ConfigError);
  s.width = 4;
  s.depth = 1;
  EXPECT_THROW(s.validate(), ConfigError);
  s.depth = 2;
  s.width = 5;
  s.hidden = HiddenActivation::GroupSort2;
  EXPECT_THROW(s.validate(), ConfigError);
  s.width = 6;
  EXPECT_NO_THROW(s.validate());
}

TEST(InitParams, ZeroWidthIsConfigError) {
  CounterRng rng(1);
  EXPECT_THROW(init_params(MlpSpec{2, 1, 0, 2}, rng), ConfigError);
}

TEST(InitParams, ShapesChainAndBiasesAreZero) {
  CounterRng rng(2);
  const MlpParams p = init_params(MlpSpec{3, 2, 5, 4}, rng);
  ASSERT_EQ(p.weights.size(), 4u);
  EXPECT_EQ(p.weights[0].rows(), 3u);
  EXPECT_EQ(p.weights[0].cols(), 5u);
  EXPECT_EQ(p.weights[3].rows(), 5u);
  EXPECT_EQ(p.weights[3].cols(), 2u);
  for (const auto& b : p.biases) EXPECT_EQ(max_abs(b), 0.0);
}

TEST(InitParams, EntriesAreCenteredXavierUniform) {
  CounterRng rng(3);
  const MlpParams p = init_params(MlpSpec{100, 100, 100, 3}, rng);
  const double limit = std::sqrt(6.0 / 200.0);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& w : p.weights)
    for (double v : w.values()) {
      EXPECT_LE(std::abs(v), limit);
      sum += v;
      ++n;
    }
  ASSERT_GE(n, 10000u);
  const double sigma = limit / std::sqrt(3.0) / std::sqrt(static_cast<double>(n));
  EXPECT_LE(std::abs(sum / static_cast<double>(n)), 3.0 * sigma);
}

TEST(InitParams, BjorckConstraintHoldsImmediately) {
  CounterRng rng(4);
  const MlpParams p = init_params(critic(5, 16, 4, ConstraintMode::Bjorck), rng);
  for (const auto& w : p.weights) EXPECT_LE(oracle::singular_values(w).front(), 1.0 + 1e-3);
  EXPECT_TRUE(satisfies_constraint(p, 1e-3));
}

TEST(Forward, IdentityReluNetIsIdentityOnNonnegativeInput) {
  MlpParams p;
  p.spec = MlpSpec{3, 3, 3, 2};
  p.weights = {Tensor::identity(3), Tensor::identity(3)};
  p.biases = {Tensor(1, 3), Tensor(1, 3)};
  const Tensor x = Tensor::from_rows({{0.0, 1.5, 2.0}, {3.0, 0.25, 0.0}});
  EXPECT_EQ(forward(p, x), x);
}

TEST(Forward, HandComputedGroupSortNet) {
  // 2-2-1 net: hidden pre-activation (x1 + x2, x1 - x2) + (0, 1), sorted, then (1, -2) . h + 0.5.
  MlpParams p;
  p.spec = MlpSpec{2, 1, 2, 2, HiddenActivation::GroupSort2};
  p.weights = {Tensor::from_rows({{1, 1}, {1, -1}}), Tensor::from_rows({{1}, {-2}})};
  p.biases = {Tensor::from_rows({{0, 1}}), Tensor::from_rows({{0.5}})};
  // x = (1, 3): pre = (4, -1), sorted (4, -1), out = 4 + 2 + 0.5
  EXPECT_DOUBLE_EQ(forward(p, Tensor::from_rows({{1, 3}})).item(), 6.5);
  // x = (2, -1): pre = (1, 4), sorted (4, 1), out = 4 - 2 + 0.5
  EXPECT_DOUBLE_EQ(forward(p, Tensor::from_rows({{2, -1}})).item(), 2.5);
}

TEST(Forward, BatchEqualsStackedSingles) {
  CounterRng rng(5);
  MlpSpec s{3, 2, 6, 3, HiddenActivation::GroupSort2, OutputActivation::Tanh};
  const MlpParams p = init_params(s, rng);
  const Tensor x = oracle::random_tensor(5, 3, rng);
  const Tensor batch = forward(p, x);
  for (std::size_t i = 0; i < 5; ++i) {
    const Tensor one = forward(p, Tensor(1, 3, std::vector<double>(x.row(i).begin(), x.row(i).end())));
    EXPECT_EQ(one[0], batch(i, 0));
    EXPECT_EQ(one[1], batch(i, 1));
  }
}

TEST(Forward, MatchesScalarLoopOracle) {
  CounterRng rng(6);
  const MlpParams p = init_params(MlpSpec{4, 3, 8, 4, HiddenActivation::Relu}, rng);
  const Tensor x = oracle::random_tensor(7, 4, rng);
  EXPECT_LE(max_abs_diff(forward(p, x), oracle::mlp_forward(p, x)), 1e-12);
}

TEST(Forward, WrongInputWidthIsShapeError) {
  CounterRng rng(7);
  const MlpParams p = init_params(MlpSpec{4, 1, 8, 2}, rng);
  EXPECT_THROW(forward(p, Tensor(2, 3)), ShapeError);
}

TEST(Bjorck, IdentityIsFixedPoint) {
  EXPECT_LE(max_abs_diff(bjorck_orthonormalize(Tensor::identity(4), 5, 2), Tensor::identity(4)), 1e-15);
}

TEST(Bjorck, DiagonalConvergesToPolarFactor) {
  const Tensor w = Tensor::from_rows({{2.0, 0.0}, {0.0, 0.5}});
  const Tensor polar = oracle::polar_factor(w);
  EXPECT_LE(max_abs_diff(polar, Tensor::identity(2)), 1e-12);
  EXPECT_LE(max_abs_diff(bjorck_orthonormalize(w, 20, 2), polar), 1e-6);
}

TEST(Bjorck, GeneralSquareConvergesToPolarFactor) {
  CounterRng rng(8);
  const Tensor w = oracle::random_tensor(5, 5, rng, -1.0, 1.0);
  EXPECT_LE(max_abs_diff(bjorck_orthonormalize(w, 60, 2), oracle::polar_factor(w)), 1e-6);
}

TEST(Bjorck, FiveStepsOnNearOrthogonal8x8) {
  CounterRng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor w = oracle::random_tensor(8, 8, rng, -0.15, 0.15);
    for (std::size_t i = 0; i < 8; ++i) w(i, i) += 1.0;
    const auto sv = oracle::singular_values(bjorck_orthonormalize(w, 5, 2));
    EXPECT_GE(sv.back(), 0.9);
    EXPECT_LE(sv.front(), 1.0001);
  }
}

TEST(Bjorck, NeverExceedsUnitSpectralNormEvenUnconverged) {
  CounterRng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + rng.below(10), c = 1 + rng.below(10);
    const Tensor w = oracle::random_tensor(r, c, rng, -3.0, 3.0);
    for (int order : {1, 2}) {
      EXPECT_LE(oracle::singular_values(bjorck_orthonormalize(w, 1 + static_cast<int>(rng.below(5)), order)).front(),
                1.0 + 1e-9);
    }
  }
}

TEST(Bjorck, TallAndWideGiveOrthonormalColumnsOrRows) {
  CounterRng rng(11);
  const Tensor tall = bjorck_orthonormalize(oracle::random_tensor(12, 3, rng), 40, 2);
  const Tensor gram = oracle::naive_matmul(oracle::naive_transpose(tall), tall);
  EXPECT_LE(max_abs_diff(gram, Tensor::identity(3)), 1e-9);
  const Tensor wide = bjorck_orthonormalize(oracle::random_tensor(3, 12, rng), 40, 2);
  EXPECT_LE(max_abs_diff(oracle::naive_matmul(wide, oracle::naive_transpose(wide)), Tensor::identity(3)), 1e-9);
}

TEST(Bjorck, Errors) {
  Tensor bad = Tensor::identity(2);
  bad[1] = std::nan("");
  EXPECT_THROW(bjorck_orthonormalize(bad, 5, 2), NumericError);
  EXPECT_THROW(bjorck_orthonormalize(Tensor::identity(2), 0, 2), ConfigError);
  EXPECT_THROW(bjorck_orthonormalize(Tensor::identity(2), 5, 3), ConfigError);
}

TEST(Bjorck, ProjectionIsIdempotentOnceConverged) {
  // Five steps only converge from well-conditioned input, so idempotency is
  // checked where the first projection has converged.
  CounterRng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t r = 2 + rng.below(15), c = 2 + rng.below(15);
    Tensor w = oracle::random_tensor(r, c, rng, -0.15, 0.15);
    for (std::size_t i = 0; i < std::min(r, c); ++i) w(i, i) += 1.0;
    const Tensor once = bjorck_orthonormalize(w, 5, 2);
    EXPECT_LE(max_abs_diff(bjorck_orthonormalize(once, 5, 2), once), 1e-6);
  }
  const MlpParams p = init_params(critic(4, 16, 4, ConstraintMode::Bjorck), rng);
  for (const Tensor& w : p.weights) {
    const Tensor once = bjorck_orthonormalize(w, 100, 2);
    EXPECT_LE(max_abs_diff(bjorck_orthonormalize(once, 5, 2), once), 1e-6);
  }
}

TEST(InfNorm, FeasibleMatrixUnchanged) {
  Tensor w = Tensor::from_rows({{0.5, 0.1}, {-0.25, 0.3}});
  const Tensor before = w;
  project_unit_l1(w);
  EXPECT_EQ(w, before);
  project_unit_l2(w);
  EXPECT_EQ(w, before);
}

TEST(InfNorm, LaterLayerUnitIsScaledByItsL1Norm) {
  // One output unit per column: the unit with weights (3, -1) has l1 norm 4.
  MlpParams p;
  p.spec = critic(2, 2, 2, ConstraintMode::InfNorm);
  p.weights = {Tensor::from_rows({{0.6, 0.0}, {0.0, 1.0}}), Tensor::from_rows({{3.0}, {-1.0}})};
  p.biases = {Tensor(1, 2), Tensor(1, 1)};
  project_inf_norm(p);
  EXPECT_DOUBLE_EQ(p.weights[1](0, 0), 0.75);
  EXPECT_DOUBLE_EQ(p.weights[1](1, 0), -0.25);
  EXPECT_EQ(p.weights[0], Tensor::from_rows({{0.6, 0.0}, {0.0, 1.0}}));
}

TEST(InfNorm, InducedNormsAtMostOneOnRandomMatrices) {
  CounterRng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    MlpParams p = init_params(critic(3, 10, 4, ConstraintMode::None), rng);
    for (auto& w : p.weights)
      for (double& v : w.values()) v = rng.uniform(-3.0, 3.0);
    p.spec.constraint.mode = ConstraintMode::InfNorm;
    project_inf_norm(p);
    // First layer: sup over unit x of max_j |x . w_j| = max column l2 norm.
    const Tensor& first = p.weights[0];
    for (std::size_t j = 0; j < first.cols(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < first.rows(); ++i) s += first(i, j) * first(i, j);
      EXPECT_LE(std::sqrt(s), 1.0 + 1e-12);
    }
    // Later layers: induced infinity norm of x -> x W is the max column l1 norm.
    for (std::size_t l = 1; l < p.weights.size(); ++l) {
      const Tensor& w = p.weights[l];
      for (std::size_t j = 0; j < w.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.rows(); ++i) s += std::abs(w(i, j));
        EXPECT_LE(s, 1.0 + 1e-12);
      }
    }
    EXPECT_TRUE(satisfies_constraint(p, 1e-9));
    MlpParams again = p;
    project_inf_norm(again);
    for (std::size_t l = 0; l < p.weights.size(); ++l) EXPECT_LE(max_abs_diff(p.weights[l], again.weights[l]), 1e-9);
  }
}

TEST(Clip, Examples) {
  MlpParams p;
  p.spec = critic(1, 2, 2, ConstraintMode::Clip);
  p.weights = {Tensor::from_rows({{0.3, -0.05}}), Tensor::from_rows({{0.02}, {-0.4}})};
  p.biases = {Tensor::from_rows({{0.0, 0.7}}), Tensor::from_rows({{-0.2}})};
  clip_weights(p, 0.1);
  EXPECT_EQ(p.weights[0], Tensor::from_rows({{0.1, -0.05}}));
  EXPECT_EQ(p.weights[1], Tensor::from_rows({{0.02}, {-0.1}}));
  EXPECT_EQ(p.biases[1].item(), -0.1);
  for (const auto& w : p.weights) EXPECT_LE(max_abs(w), 0.1);
  const MlpParams before = p;
  clip_weights(p, 0.1);
  for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(p.weights[l], before.weights[l]);
  EXPECT_THROW(clip_weights(p, 0.0), ConfigError);
}

TEST(SpectralNorm, Examples) {
  CounterRng rng(14);
  EXPECT_NEAR(spectral_norm_estimate(Tensor::from_rows({{3, 0}, {0, 1}}), 50, rng), 3.0, 1e-9);
  EXPECT_NEAR(spectral_norm_estimate(Tensor::identity(4), 5, rng), 1.0, 1e-12);
  EXPECT_EQ(spectral_norm_estimate(Tensor(3, 3), 5, rng), 0.0);
}

TEST(SpectralNorm, MatchesJacobiGramOracle) {
  CounterRng rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const Tensor w = oracle::random_tensor(10, 10, rng, -1.0, 1.0);
    const double truth = oracle::singular_values(w).front();
    const double est = spectral_norm_estimate(w, 2000, rng);
    EXPECT_LE(est, truth + 1e-12);
    EXPECT_NEAR(est, truth, 1e-6);
  }
}

TEST(CapGeneratorNorm, Examples) {
  MlpParams p;
  p.spec = MlpSpec{2, 2, 2, 2};
  p.weights = {Tensor::from_rows({{4, 0}, {0, 4}}), Tensor::from_rows({{0.5, 0}, {0, 0.5}})};
  p.biases = {Tensor::from_rows({{3, 4}}), Tensor::from_rows({{0.1, 0.1}})};
  const MlpParams before = p;
  cap_generator_norm(p, 2.0);
  EXPECT_LE(max_abs_diff(p.weights[0], Tensor::from_rows({{2, 0}, {0, 2}})), 1e-9);
  EXPECT_EQ(p.weights[1], before.weights[1]);
  EXPECT_EQ(p.biases[1], before.biases[1]);
  for (const auto& b : p.biases) EXPECT_LE(l2(b.values()), 2.0 + 1e-9);
}

TEST(CapGeneratorNorm, LipschitzBoundHolds) {
  CounterRng rng(16);
  MlpSpec s{3, 2, 12, 3};
  MlpParams g = init_params(s, rng);
  for (auto& w : g.weights)
    for (double& v : w.values()) v *= 4.0;
  const double m = 1.5;
  cap_generator_norm(g, m);
  const double bound = std::pow(m, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const Tensor x = oracle::random_tensor(1, 3, rng, -3.0, 3.0), y = oracle::random_tensor(1, 3, rng, -3.0, 3.0);
    const Tensor gx = forward(g, x), gy = forward(g, y);
    const double out = std::hypot(gx[0] - gy[0], gx[1] - gy[1]);
    const double in = std::sqrt((x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]) +
                                (x[2] - y[2]) * (x[2] - y[2]));
    EXPECT_LE(out, (1.0 + 1e-6) * bound * in);
  }
}

TEST(Checkpoint, RoundTripIsExact) {
  CounterRng rng(17);
  NetworkCheckpoint c{init_params(critic(3, 6, 3, ConstraintMode::Bjorck), rng), 1234, 99};
  c.params.biases[0][1] = 0.1 + 0.2;
  const NetworkCheckpoint back = checkpoint_from_json(checkpoint_to_json(c));
  EXPECT_EQ(back.step, 1234);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.params.spec, c.params.spec);
  for (std::size_t l = 0; l < c.params.weights.size(); ++l) {
    EXPECT_EQ(back.params.weights[l], c.params.weights[l]);
    EXPECT_EQ(back.params.biases[l], c.params.biases[l]);
  }
}

TEST(Checkpoint, SchemaErrorsNameTheKey) {
  try {
    checkpoint_from_json(R"({"spec": {}, "weights": [], "biases": [], "step": 0, "seed": 0, "extra": 1})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("extra"), std::string::npos) << e.what();
  }
}
