#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lipgan/checkpoint.hpp"
#include "lipgan/data.hpp"
#include "lipgan/mlp.hpp"
#include "lipgan/optim.hpp"
#include "lipgan/ot.hpp"

namespace lipgan {

enum class Dataset { SwissRoll, Mnist };

struct EvalSchedule {
  long every = 1000;            // monitor tick (sliced W1, tail fraction, checkpoint)
  long exact_every = 0;         // exact W1 cadence; 0 = only at iteration 0 and at the end
  std::size_t samples = 2000;   // generated and reference sample count per evaluation
  int repeats = 1;              // exact-W1 evaluations averaged per tick
  int sliced_projections = 50;
  double tail_threshold = 2.0;  // M~ for the tail-probability diagnostic

  friend bool operator==(const EvalSchedule&, const EvalSchedule&) = default;
};

struct MnistSettings {
  std::string images;
  std::string labels;
  std::string pca;              // optional cached PCA model JSON from `mnist-prep`
  std::size_t holdout = 10000;  // last rows of the training file kept for evaluation
  std::size_t pca_dim = 50;

  friend bool operator==(const MnistSettings&, const MnistSettings&) = default;
};

/// Full description of one training run.
struct TrainConfig {
  std::string experiment_id = "run";
  std::uint64_t seed = 0;
  Dataset dataset = Dataset::SwissRoll;
  MlpSpec generator;
  MlpSpec discriminator;
  std::optional<double> generator_norm_cap;  // M; unenforced when empty
  OptimizerConfig generator_optimizer;
  OptimizerConfig discriminator_optimizer;
  std::size_t batch_size = 100;
  long total_iterations = 10000;
  int critic_steps = 5;
  std::size_t n_train = 2000;
  std::size_t noise_dim = 2;
  EvalSchedule eval;
  MnistSettings mnist;

  /// Throws ConfigError on inconsistent settings (dims, critic_steps < 1, batch_size > n_train, ...).
  void validate() const;

  /// GroupSort + Björck(5, 2), Adam(0.9, 0.99), lr 1e-4, batch 100, 2-d noise.
  static TrainConfig swiss_roll_groupsort(std::size_t gen_width = 30, std::size_t gen_depth = 2,
                                          std::size_t disc_width = 30, std::size_t disc_depth = 2);
  /// ReLU critic with weight clipping, RMSProp(0.9), lr 5e-5, batch 100, 2-d noise.
  static TrainConfig swiss_roll_clipping(std::size_t gen_width = 30, std::size_t gen_depth = 2,
                                         std::size_t disc_width = 30, std::size_t disc_depth = 2);
  /// GroupSort + Björck(5, 2), Adam(0.5, 0.99), lr G 5e-4 / D 1e-3, batch 512, 50-d noise, tanh output.
  static TrainConfig mnist_groupsort(std::size_t gen_width = 50, std::size_t gen_depth = 3,
                                     std::size_t disc_width = 50, std::size_t disc_depth = 3);
};

struct TrainLogRecord {
  long iteration = 0;
  double critic_loss = 0.0;  // J_D = mean f(real) - mean f(fake)
  double gen_loss = 0.0;     // J_G = -mean f(fake)
  double sliced_w1 = 0.0;
  std::optional<double> exact_w1;
  double tail_frac = 0.0;
  double elapsed_s = 0.0;
};

struct TrainLog {
  std::vector<TrainLogRecord> records;

  /// Everything except wall-clock time matches bit for bit.
  bool same_trajectory(const TrainLog& other) const;
  /// "iter,critic_loss,gen_loss,sliced_w1,exact_w1,tail_frac,elapsed_s"
  std::string to_csv(bool include_elapsed = true) const;
};

struct TrainCheckpoint {
  NetworkCheckpoint generator;
  NetworkCheckpoint discriminator;
};

/// Real data for one run: a training pool (only its first n_train rows are
/// ever sampled), a reference sampler producing held-out draws in the
/// evaluation space, and the map from generator output to that space.
struct RealData {
  SampleBatch train;
  std::function<Tensor(std::size_t count, CounterRng& rng)> reference;
  std::optional<PcaModel> eval_projection;
};

/// Swiss-roll pool of n_train points from the run's "data" stream; references are fresh draws.
RealData swiss_roll_data(const TrainConfig& config);
/// MNIST: the last `holdout` rows are held out (in PCA space) for evaluation; the rest is the pool.
RealData mnist_data(const TrainConfig& config, const MnistData& mnist, const PcaModel& pca);

struct TrainOptions {
  std::optional<std::filesystem::path> out_dir;   // log.csv, w1.csv, checkpoints/
  std::function<void(const TrainLogRecord&)> on_eval;
};

struct TrainResult {
  MlpParams generator;
  MlpParams discriminator;
  TrainLog log;
  std::vector<TrainCheckpoint> checkpoints;
  std::vector<W1Report> w1_reports;
  double initial_w1 = 0.0;  // exact W1 of the untrained generator
  double final_w1 = 0.0;
};

/// J_D = mean f(real) - mean f(g(noise)).
double critic_objective(const MlpParams& d, const MlpParams& g, const Tensor& real, const Tensor& noise);
/// J_G = -mean f(g(noise)).
double generator_objective(const MlpParams& g, const MlpParams& d, const Tensor& noise);

/// Gradient of -J_D with respect to the critic parameters.
MlpGrads critic_gradients(const MlpParams& d, const MlpParams& g, const Tensor& real, const Tensor& noise,
                          double* objective = nullptr);
/// Gradient of J_G with respect to the generator parameters (critic frozen).
MlpGrads generator_gradients(const MlpParams& g, const MlpParams& d, const Tensor& noise,
                             double* objective = nullptr);

/// One ascent step on J_D followed by the critic's constraint projection.
/// Returns J_D before the update.
double critic_step(MlpParams& d, const MlpParams& g, const Tensor& real, const Tensor& noise, Optimizer& opt);
/// One descent step on J_G. Returns J_G before the update.
double generator_step(MlpParams& g, const MlpParams& d, const Tensor& noise, Optimizer& opt);

/// Runs the adversarial loop: per outer iteration, `critic_steps` critic
/// updates (fresh minibatch drawn with replacement from the first n_train
/// rows, fresh noise each time) and one generator update with fresh noise.
/// Evaluates at iteration 0, every `eval.every` iterations and at the end.
/// NumericError is rethrown with the iteration; the last good checkpoint is
/// written to out_dir first when one is set.
TrainResult train(const TrainConfig& config, const RealData& data, const TrainOptions& options = {});

}  // namespace lipgan
