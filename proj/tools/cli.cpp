#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "lipgan/checkpoint.hpp"
#include "lipgan/config.hpp"
#include "lipgan/errors.hpp"
#include "lipgan/plot.hpp"
#include "lipgan/sweep.hpp"
#include "lipgan/train.hpp"

namespace lipgan {

namespace fs = std::filesystem;

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

fs::path data_dir() {
  const char* env = std::getenv("LIPGAN_DATA_DIR");
  return env && *env ? fs::path(env) : fs::path("data");
}

std::string resolve(const std::string& given, const char* default_name) {
  if (given.empty()) return (data_dir() / default_name).string();
  const fs::path p(given);
  if (p.is_relative() && !fs::exists(p) && fs::exists(data_dir() / p)) return (data_dir() / p).string();
  return given;
}

struct MnistBundle {
  MnistData data;
  PcaModel pca;
};

std::shared_ptr<const MnistBundle> load_mnist_bundle(const TrainConfig& c, std::ostream& out) {
  auto bundle = std::make_shared<MnistBundle>();
  bundle->data = mnist_load(resolve(c.mnist.images, "train-images-idx3-ubyte"),
                            resolve(c.mnist.labels, "train-labels-idx1-ubyte"));
  if (!c.mnist.pca.empty()) {
    bundle->pca = pca_from_json(read_text_file(resolve(c.mnist.pca, "mnist_pca.json")));
  } else {
    const std::size_t total = bundle->data.images.count();
    if (c.mnist.holdout >= total) throw ConfigError("config.mnist.holdout: leaves no training rows");
    out << "fitting PCA-" << c.mnist.pca_dim << " on " << total - c.mnist.holdout << " images\n";
    bundle->pca = pca_fit(head(bundle->data.images, total - c.mnist.holdout), c.mnist.pca_dim);
  }
  return bundle;
}

std::function<RealData(const TrainConfig&)> data_source(const TrainConfig& base, std::ostream& out) {
  if (base.dataset == Dataset::SwissRoll) {
    return [](const TrainConfig& c) { return swiss_roll_data(c); };
  }
  auto bundle = load_mnist_bundle(base, out);
  return [bundle](const TrainConfig& c) { return mnist_data(c, bundle->data, bundle->pca); };
}

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out;
};

int run_train(const Globals& g, const std::string& config_path, std::ostream& out) {
  TrainConfig config = parse_train_config(read_text_file(config_path));
  if (g.seed) config.seed = *g.seed;
  const fs::path dir = g.out.empty() ? fs::path("runs") / (config.experiment_id + "_seed" + std::to_string(config.seed))
                                     : fs::path(g.out);
  fs::create_directories(dir);
  write_text_file(dir / "config.json", train_config_to_json(config) + "\n");
  const RealData data = data_source(config, out)(config);
  TrainOptions opts;
  opts.out_dir = dir;
  opts.on_eval = [&](const TrainLogRecord& r) {
    out << "iter " << r.iteration << "  critic " << r.critic_loss << "  gen " << r.gen_loss << "  sliced_w1 "
        << r.sliced_w1;
    if (r.exact_w1) out << "  w1 " << *r.exact_w1;
    out << "  tail " << r.tail_frac << '\n';
  };
  const TrainResult result = train(config, data, opts);
  out << "initial_w1 " << shortest(result.initial_w1) << "\nfinal_w1 " << shortest(result.final_w1) << "\n"
      << "wrote " << dir.string() << "\n";
  return kExitOk;
}

int run_sweep_cmd(const Globals& g, const std::string& path, bool long_runs, std::ostream& out) {
  SweepSpec spec = parse_sweep_spec(read_text_file(path));
  if (spec.base.dataset == Dataset::Mnist && !long_runs) {
    throw ConfigError("sweep.base.dataset: MNIST sweeps are long-running; pass --long to run them");
  }
  if (g.seed) spec.base.seed = *g.seed;
  if (!g.out.empty()) spec.output_dir = g.out;
  if (spec.output_dir.empty()) spec.output_dir = fs::path("sweeps") / spec.label;
  SweepOptions opts;
  opts.threads = g.threads;
  opts.on_run = [&](const SweepRun& r) {
    out << to_string(spec.axis) << '=' << r.axis_value << " seed=" << r.seed << ' '
        << (r.ok ? "w1=" + shortest(r.final_w1) : "FAILED: " + r.error) << std::endl;
  };
  const SweepResult result = run_sweep(spec, opts, data_source(spec.base, out));
  out << "trained " << result.trained << " of " << result.runs.size() << " runs\n";
  out << to_string(result.axis) << ",mean_w1,stderr,count,failed\n";
  for (const auto& p : result.points) {
    out << p.axis_value << ',' << shortest(p.mean) << ',' << shortest(p.stderr_) << ',' << p.count << ','
        << p.failed << '\n';
  }
  if (result.degraded) out << "warning: sweep is degraded (a cell lost at least half of its runs)\n";
  out << "wrote " << spec.output_dir.string() << "\n";
  return kExitOk;
}

Tensor sample_generator(const fs::path& path, std::size_t count, std::uint64_t seed) {
  const NetworkCheckpoint ckpt = load_checkpoint(path);
  CounterRng rng = CounterRng::stream(seed, "eval");
  return forward(ckpt.params, gaussian_noise(count, ckpt.params.spec.input_dim, rng).values);
}

int run_eval(const Globals& g, const std::string& a_path, const std::string& b_path, bool sliced,
             std::size_t samples, int projections, std::ostream& out) {
  SampleBatch b = read_csv_points(b_path);
  if (samples > 0 && samples < b.count()) b = head(b, samples);
  Tensor a;
  if (fs::path(a_path).extension() == ".json") {
    a = sample_generator(a_path, samples > 0 ? samples : b.count(), g.seed.value_or(0));
  } else {
    SampleBatch batch = read_csv_points(a_path);
    if (samples > 0 && samples < batch.count()) batch = head(batch, samples);
    a = batch.values;
  }
  if (a.cols() != b.dim()) throw ConfigError("eval-w1: --a and --b have different dimensions");
  double value = 0.0;
  if (sliced) {
    const std::size_t n = std::min(a.rows(), b.count());
    CounterRng rng = CounterRng::stream(g.seed.value_or(0), "sliced");
    value = sliced_w1(head(SampleBatch{a}, n).values, head(b, n).values, projections, rng);
  } else {
    value = exact_w1(a, b.values);
  }
  out << shortest(value) << '\n';
  return kExitOk;
}

int run_plot(const Globals& g, const std::string& dir, std::ostream& out) {
  std::vector<fs::path> sweeps;
  if (fs::exists(fs::path(dir) / "result.json")) {
    sweeps.emplace_back(dir);
  } else if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_directory() && fs::exists(entry.path() / "result.json")) sweeps.push_back(entry.path());
    std::sort(sweeps.begin(), sweeps.end());
  }
  if (sweeps.empty()) throw ConfigError("plot: no sweep results under " + dir);
  std::map<std::string, std::vector<SweepResult>> by_axis;
  for (const auto& s : sweeps) {
    SweepResult r = load_sweep_result(s);
    by_axis[std::string(to_string(r.axis))].push_back(std::move(r));
  }
  const fs::path target = g.out.empty() ? fs::path(dir) : fs::path(g.out);
  fs::create_directories(target);
  for (const auto& [axis, results] : by_axis) {
    const fs::path svg = target / ("plot_" + axis + ".svg");
    PlotOptions opts;
    opts.title = "W1 vs " + axis;
    plot_curves(results, svg, opts);
    out << "wrote " << svg.string() << '\n';
  }
  return kExitOk;
}

int run_mnist_prep(const Globals& g, const std::string& images, const std::string& labels, std::size_t holdout,
                   std::size_t k, std::ostream& out) {
  const MnistData data = mnist_load(resolve(images, "train-images-idx3-ubyte"),
                                    resolve(labels, "train-labels-idx1-ubyte"));
  const std::size_t total = data.images.count();
  if (holdout >= total) throw ConfigError("mnist-prep: --holdout leaves no training rows");
  const PcaModel pca = pca_fit(head(data.images, total - holdout), k);
  const fs::path path = g.out.empty() ? fs::path("mnist_pca" + std::to_string(k) + ".json") : fs::path(g.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text_file(path, pca_to_json(pca));
  out << "loaded " << total << " images, fit PCA-" << k << " on " << total - holdout << "\nwrote " << path.string()
      << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lipschitz-constrained WGAN experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Override the run seed");
  app.add_option("--threads", g.threads, "Sweep worker threads (0 = cores - 1)");
  app.add_option("--out", g.out, "Output file or directory");

  std::string config_path;
  auto* train_cmd = app.add_subcommand("train", "Train one GAN from a JSON config");
  train_cmd->add_option("config", config_path, "Config JSON")->required();

  std::string sweep_path;
  bool long_runs = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a capacity or sample-size sweep");
  sweep_cmd->add_option("spec", sweep_path, "Sweep JSON")->required();
  sweep_cmd->add_flag("--long", long_runs, "Allow MNIST sweeps");

  std::string a_path, b_path;
  bool exact = false, sliced = false;
  std::size_t samples = 0;
  int projections = 50;
  auto* eval_cmd = app.add_subcommand("eval-w1", "W1 between two point sets (or a generator checkpoint and a set)");
  eval_cmd->add_option("--a", a_path, "CSV points or generator checkpoint JSON")->required();
  eval_cmd->add_option("--b", b_path, "CSV points")->required();
  auto* exact_flag = eval_cmd->add_flag("--exact", exact, "Exact W1 (default)");
  eval_cmd->add_flag("--sliced", sliced, "Sliced W1")->excludes(exact_flag);
  eval_cmd->add_option("--samples", samples, "Points per side (0 = all)");
  eval_cmd->add_option("--projections", projections, "Directions for --sliced");

  std::string plot_dir;
  auto* plot_cmd = app.add_subcommand("plot", "SVG curves for finished sweeps");
  plot_cmd->add_option("sweep_dir", plot_dir, "Sweep output directory, or a directory of them")->required();

  std::string images, labels;
  std::size_t holdout = 10000, k = 50;
  auto* prep_cmd = app.add_subcommand("mnist-prep", "Fit and save the MNIST PCA model");
  prep_cmd->add_option("--images", images, "IDX image file");
  prep_cmd->add_option("--labels", labels, "IDX label file");
  prep_cmd->add_option("--holdout", holdout, "Rows held out for evaluation");
  prep_cmd->add_option("--k", k, "Components");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train_cmd) return run_train(g, config_path, out);
    if (*sweep_cmd) return run_sweep_cmd(g, sweep_path, long_runs, out);
    if (*eval_cmd) return run_eval(g, a_path, b_path, sliced, samples, projections, out);
    if (*plot_cmd) return run_plot(g, plot_dir, out);
    if (*prep_cmd) return run_mnist_prep(g, images, labels, holdout, k, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("lipgan");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lipgan
