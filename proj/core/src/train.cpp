#include "lipgan/train.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lipgan/constraints.hpp"
#include "lipgan/errors.hpp"

namespace lipgan {

namespace {

OptimizerConfig adam(double lr, double beta1, double beta2) {
  OptimizerConfig c;
  c.kind = OptimizerKind::Adam;
  c.lr = lr;
  c.beta1 = beta1;
  c.beta2 = beta2;
  return c;
}

MlpSpec generator_spec(std::size_t noise_dim, std::size_t out_dim, std::size_t width, std::size_t depth,
                       OutputActivation out) {
  MlpSpec s;
  s.input_dim = noise_dim;
  s.output_dim = out_dim;
  s.width = width;
  s.depth = depth;
  s.hidden = HiddenActivation::Relu;
  s.output = out;
  return s;
}

MlpSpec critic_spec(std::size_t in_dim, std::size_t width, std::size_t depth, HiddenActivation act,
                    Constraint constraint) {
  MlpSpec s;
  s.input_dim = in_dim;
  s.output_dim = 1;
  s.width = width;
  s.depth = depth;
  s.hidden = act;
  s.output = OutputActivation::None;
  s.constraint = constraint;
  return s;
}

std::size_t data_dim(const TrainConfig& c) { return c.dataset == Dataset::SwissRoll ? 2 : 784; }

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void TrainConfig::validate() const {
  generator.validate();
  discriminator.validate();
  generator_optimizer.validate();
  discriminator_optimizer.validate();
  const std::size_t d = data_dim(*this);
  if (generator.input_dim != noise_dim) throw ConfigError("config: generator input_dim must equal noise_dim");
  if (generator.output_dim != d) {
    throw ConfigError("config: generator output_dim must be " + std::to_string(d) + " for this dataset");
  }
  if (discriminator.input_dim != d) {
    throw ConfigError("config: discriminator input_dim must be " + std::to_string(d) + " for this dataset");
  }
  if (discriminator.output_dim != 1) throw ConfigError("config: discriminator output_dim must be 1");
  if (critic_steps < 1) throw ConfigError("config: critic_steps must be >= 1");
  if (batch_size == 0) throw ConfigError("config: batch_size must be >= 1");
  if (batch_size > n_train) throw ConfigError("config: batch_size must not exceed n_train");
  if (total_iterations < 0) throw ConfigError("config: total_iterations must be >= 0");
  if (eval.every < 1) throw ConfigError("config: eval.every must be >= 1");
  if (eval.exact_every < 0) throw ConfigError("config: eval.exact_every must be >= 0");
  if (eval.samples < 1) throw ConfigError("config: eval.samples must be >= 1");
  if (eval.repeats < 1) throw ConfigError("config: eval.repeats must be >= 1");
  if (eval.sliced_projections < 1) throw ConfigError("config: eval.sliced_projections must be >= 1");
  if (!(eval.tail_threshold > 0.0)) throw ConfigError("config: eval.tail_threshold must be > 0");
  if (generator_norm_cap && !(*generator_norm_cap > 0.0)) {
    throw ConfigError("config: generator_norm_cap must be > 0");
  }
  if (dataset == Dataset::Mnist && mnist.pca_dim == 0) throw ConfigError("config: mnist.pca_dim must be >= 1");
}

TrainConfig TrainConfig::swiss_roll_groupsort(std::size_t gen_width, std::size_t gen_depth, std::size_t disc_width,
                                              std::size_t disc_depth) {
  TrainConfig c;
  c.experiment_id = "swiss_roll_groupsort";
  c.dataset = Dataset::SwissRoll;
  c.noise_dim = 2;
  c.generator = generator_spec(2, 2, gen_width, gen_depth, OutputActivation::None);
  c.discriminator = critic_spec(2, disc_width, disc_depth, HiddenActivation::GroupSort2,
                                Constraint{ConstraintMode::Bjorck, 5, 2, 0.01});
  c.generator_optimizer = adam(1e-4, 0.9, 0.99);
  c.discriminator_optimizer = adam(1e-4, 0.9, 0.99);
  c.batch_size = 100;
  c.total_iterations = 10000;
  c.critic_steps = 5;
  c.n_train = 2000;
  return c;
}

TrainConfig TrainConfig::swiss_roll_clipping(std::size_t gen_width, std::size_t gen_depth, std::size_t disc_width,
                                             std::size_t disc_depth) {
  TrainConfig c = swiss_roll_groupsort(gen_width, gen_depth, disc_width, disc_depth);
  c.experiment_id = "swiss_roll_clipping";
  c.discriminator = critic_spec(2, disc_width, disc_depth, HiddenActivation::Relu,
                                Constraint{ConstraintMode::Clip, 5, 2, 0.01});
  OptimizerConfig rms;
  rms.kind = OptimizerKind::RmsProp;
  rms.lr = 5e-5;
  rms.rho = 0.9;
  c.generator_optimizer = rms;
  c.discriminator_optimizer = rms;
  return c;
}

TrainConfig TrainConfig::mnist_groupsort(std::size_t gen_width, std::size_t gen_depth, std::size_t disc_width,
                                         std::size_t disc_depth) {
  TrainConfig c;
  c.experiment_id = "mnist_groupsort";
  c.dataset = Dataset::Mnist;
  c.noise_dim = 50;
  c.generator = generator_spec(50, 784, gen_width, gen_depth, OutputActivation::Tanh);
  c.discriminator = critic_spec(784, disc_width, disc_depth, HiddenActivation::GroupSort2,
                                Constraint{ConstraintMode::Bjorck, 5, 2, 0.01});
  c.generator_optimizer = adam(5e-4, 0.5, 0.99);
  c.discriminator_optimizer = adam(1e-3, 0.5, 0.99);
  c.batch_size = 512;
  c.total_iterations = 20000;
  c.critic_steps = 5;
  c.n_train = 50000;
  c.eval.samples = 2000;
  c.eval.every = 2000;
  c.eval.tail_threshold = 28.0;  // sqrt(784): the radius of the [-1, 1]^784 cube
  return c;
}

bool TrainLog::same_trajectory(const TrainLog& other) const {
  if (records.size() != other.records.size()) return false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& a = records[i];
    const auto& b = other.records[i];
    if (a.iteration != b.iteration || !bit_equal(a.critic_loss, b.critic_loss) ||
        !bit_equal(a.gen_loss, b.gen_loss) || !bit_equal(a.sliced_w1, b.sliced_w1) ||
        !bit_equal(a.tail_frac, b.tail_frac) || a.exact_w1.has_value() != b.exact_w1.has_value() ||
        (a.exact_w1 && !bit_equal(*a.exact_w1, *b.exact_w1))) {
      return false;
    }
  }
  return true;
}

std::string TrainLog::to_csv(bool include_elapsed) const {
  std::ostringstream os;
  os << "iter,critic_loss,gen_loss,sliced_w1,exact_w1,tail_frac,elapsed_s\n";
  for (const auto& r : records) {
    os << r.iteration << ',' << format_double(r.critic_loss) << ',' << format_double(r.gen_loss) << ','
       << format_double(r.sliced_w1) << ',' << (r.exact_w1 ? format_double(*r.exact_w1) : std::string()) << ','
       << format_double(r.tail_frac) << ',' << (include_elapsed ? format_double(r.elapsed_s) : std::string("0"))
       << '\n';
  }
  return os.str();
}

RealData swiss_roll_data(const TrainConfig& config) {
  CounterRng rng = CounterRng::stream(config.seed, "data");
  RealData data;
  data.train = swiss_roll(config.n_train, rng);
  data.reference = [](std::size_t count, CounterRng& r) { return swiss_roll(count, r).values; };
  return data;
}

RealData mnist_data(const TrainConfig& config, const MnistData& mnist, const PcaModel& pca) {
  const std::size_t total = mnist.images.count();
  if (config.mnist.holdout >= total) throw ConfigError("config: mnist.holdout leaves no training rows");
  const std::size_t split = total - config.mnist.holdout;
  if (config.n_train > split) throw ConfigError("config: n_train exceeds the MNIST training split");
  RealData data;
  data.train = head(mnist.images, split);
  auto heldout = std::make_shared<SampleBatch>(pca_transform(pca, slice_rows(mnist.images, split, total)));
  data.reference = [heldout](std::size_t count, CounterRng& r) {
    // Partial Fisher-Yates: `count` distinct held-out rows.
    const std::size_t n = heldout->count();
    if (count > n) throw ConfigError("eval.samples exceeds the MNIST held-out split");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Tensor out(count, heldout->dim());
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(r.below(n - i));
      std::swap(idx[i], idx[j]);
      const auto src = heldout->values.row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  };
  data.eval_projection = pca;
  return data;
}

double critic_objective(const MlpParams& d, const MlpParams& g, const Tensor& real, const Tensor& noise) {
  const Tensor fake = forward(g, noise);
  Tape tape;
  const double real_score = tape.reduce_mean(forward(d, real)).item();
  const double fake_score = tape.reduce_mean(forward(d, fake)).item();
  return real_score - fake_score;
}

double generator_objective(const MlpParams& g, const MlpParams& d, const Tensor& noise) {
  Tape tape;
  return -tape.reduce_mean(forward(d, forward(g, noise))).item();
}

MlpGrads critic_gradients(const MlpParams& d, const MlpParams& g, const Tensor& real, const Tensor& noise,
                          double* objective) {
  const Tensor fake = forward(g, noise);
  Tape tape;
  const MlpParams bound = bind(tape, d);
  // Descend mean f(fake) - mean f(real), i.e. ascend J_D.
  const Tensor loss = tape.sub(tape.reduce_mean(forward(tape, bound, fake)),
                               tape.reduce_mean(forward(tape, bound, real)));
  if (!std::isfinite(loss.item())) throw NumericError("critic loss is not finite");
  if (objective) *objective = -loss.item();
  return gradients_for(tape.backward(loss), bound);
}

MlpGrads generator_gradients(const MlpParams& g, const MlpParams& d, const Tensor& noise, double* objective) {
  Tape tape;
  const MlpParams bound = bind(tape, g);
  const Tensor fake = forward(tape, bound, noise);
  const Tensor loss = tape.scale(tape.reduce_mean(forward(tape, d, fake)), -1.0);
  if (!std::isfinite(loss.item())) throw NumericError("generator loss is not finite");
  if (objective) *objective = loss.item();
  return gradients_for(tape.backward(loss), bound);
}

double critic_step(MlpParams& d, const MlpParams& g, const Tensor& real, const Tensor& noise, Optimizer& opt) {
  double objective = 0.0;
  const MlpGrads grads = critic_gradients(d, g, real, noise, &objective);
  opt.step(d, grads);
  apply_constraint(d);
  return objective;
}

double generator_step(MlpParams& g, const MlpParams& d, const Tensor& noise, Optimizer& opt) {
  double objective = 0.0;
  const MlpGrads grads = generator_gradients(g, d, noise, &objective);
  opt.step(g, grads);
  return objective;
}

namespace {

class RunWriter {
 public:
  explicit RunWriter(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
    if (dir_) std::filesystem::create_directories(*dir_ / "checkpoints");
  }

  void checkpoint(const TrainCheckpoint& ckpt, const std::string& tag) const {
    if (!dir_) return;
    save_checkpoint(ckpt.generator, *dir_ / "checkpoints" / (tag + "_generator.json"));
    save_checkpoint(ckpt.discriminator, *dir_ / "checkpoints" / (tag + "_discriminator.json"));
  }

  void finish(const TrainResult& result) const {
    if (!dir_) return;
    write(*dir_ / "log.csv", result.log.to_csv());
    std::ostringstream w1;
    w1 << w1_csv_header() << '\n';
    for (const auto& r : result.w1_reports) w1 << to_csv_row(r) << '\n';
    write(*dir_ / "w1.csv", w1.str());
  }

 private:
  static void write(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
  }

  std::optional<std::filesystem::path> dir_;
};

std::string step_tag(long iteration) {
  std::ostringstream os;
  os << "step_" << iteration;
  return os.str();
}

}  // namespace

TrainResult train(const TrainConfig& config, const RealData& data, const TrainOptions& options) {
  config.validate();
  if (data.train.count() < config.n_train) {
    throw ConfigError("train: real data has " + std::to_string(data.train.count()) + " rows, n_train is " +
                      std::to_string(config.n_train));
  }
  if (data.train.dim() != config.discriminator.input_dim) {
    throw ShapeError("train: real data dimension does not match the discriminator");
  }

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  CounterRng init_rng = CounterRng::stream(config.seed, "init");
  CounterRng batch_rng = CounterRng::stream(config.seed, "minibatch");
  CounterRng noise_rng = CounterRng::stream(config.seed, "noise");
  CounterRng eval_rng = CounterRng::stream(config.seed, "eval");

  TrainResult result;
  result.generator = init_params(config.generator, init_rng);
  if (config.generator_norm_cap) cap_generator_norm(result.generator, *config.generator_norm_cap);
  result.discriminator = init_params(config.discriminator, init_rng);

  Optimizer g_opt(config.generator_optimizer);
  Optimizer d_opt(config.discriminator_optimizer);
  const RunWriter writer(options.out_dir);

  const std::size_t dim = data.train.dim();
  Tensor real(config.batch_size, dim);
  auto draw_real = [&] {
    for (std::size_t i = 0; i < config.batch_size; ++i) {
      const auto src = data.train.values.row(static_cast<std::size_t>(batch_rng.below(config.n_train)));
      std::copy(src.begin(), src.end(), real.row(i).begin());
    }
    return real;
  };
  auto draw_noise = [&] { return gaussian_noise(config.batch_size, config.noise_dim, noise_rng).values; };

  auto snapshot = [&](long step) {
    return TrainCheckpoint{NetworkCheckpoint{result.generator, step, config.seed},
                           NetworkCheckpoint{result.discriminator, step, config.seed}};
  };

  auto generate_eval = [&](std::size_t count) {
    SampleBatch fake{forward(result.generator, gaussian_noise(count, config.noise_dim, eval_rng).values),
                     SampleTag::Generated};
    return fake;
  };

  double last_critic = 0.0, last_gen = 0.0;

  auto evaluate = [&](long iteration, bool exact) {
    TrainLogRecord rec;
    rec.iteration = iteration;
    rec.critic_loss = last_critic;
    rec.gen_loss = last_gen;
    const std::size_t count = config.eval.samples;
    SampleBatch fake = generate_eval(count);
    rec.tail_frac = tail_prob_diagnostic(fake.values, config.eval.tail_threshold);
    if (data.eval_projection) fake = pca_transform(*data.eval_projection, fake);
    const Tensor reference = data.reference(count, eval_rng);
    rec.sliced_w1 = sliced_w1(fake.values, reference, config.eval.sliced_projections, eval_rng);
    if (exact) {
      double sum = 0.0;
      for (int rep = 0; rep < config.eval.repeats; ++rep) {
        const auto t0 = clock::now();
        const Tensor gen = rep == 0 ? fake.values : [&] {
          SampleBatch f = generate_eval(count);
          if (data.eval_projection) f = pca_transform(*data.eval_projection, f);
          return f.values;
        }();
        const Tensor ref = rep == 0 ? reference : data.reference(count, eval_rng);
        const double w1 = exact_w1(gen, ref);
        sum += w1;
        result.w1_reports.push_back(W1Report{config.experiment_id, config.seed, rep, gen.rows(), ref.rows(), w1,
                                             std::chrono::duration<double>(clock::now() - t0).count()});
      }
      rec.exact_w1 = sum / config.eval.repeats;
    }
    rec.elapsed_s = elapsed();
    result.log.records.push_back(rec);
    if (options.on_eval) options.on_eval(rec);
    return rec;
  };

  // Baseline losses on one batch without updating.
  {
    const Tensor noise = draw_noise();
    last_critic = critic_objective(result.discriminator, result.generator, draw_real(), noise);
    last_gen = generator_objective(result.generator, result.discriminator, noise);
  }
  result.initial_w1 = *evaluate(0, true).exact_w1;
  result.checkpoints.push_back(snapshot(0));
  writer.checkpoint(result.checkpoints.back(), step_tag(0));

  for (long it = 1; it <= config.total_iterations; ++it) {
    try {
      for (int k = 0; k < config.critic_steps; ++k) {
        const Tensor& batch = draw_real();
        last_critic = critic_step(result.discriminator, result.generator, batch, draw_noise(), d_opt);
      }
      last_gen = generator_step(result.generator, result.discriminator, draw_noise(), g_opt);
      if (config.generator_norm_cap) cap_generator_norm(result.generator, *config.generator_norm_cap);
    } catch (const NumericError& e) {
      writer.checkpoint(result.checkpoints.back(), "last_good");
      throw NumericError("iteration " + std::to_string(it) + ": " + e.what(), it);
    }

    const bool final = it == config.total_iterations;
    if (it % config.eval.every == 0 || final) {
      const bool exact = final || (config.eval.exact_every > 0 && it % config.eval.exact_every == 0);
      evaluate(it, exact);
      result.checkpoints.push_back(snapshot(it));
      writer.checkpoint(result.checkpoints.back(), step_tag(it));
    }
  }

  result.final_w1 = *result.log.records.back().exact_w1;
  if (options.out_dir) {
    save_checkpoint(result.checkpoints.back().generator, *options.out_dir / "final_generator.json");
    save_checkpoint(result.checkpoints.back().discriminator, *options.out_dir / "final_discriminator.json");
  }
  writer.finish(result);
  return result;
}

}  // namespace lipgan
