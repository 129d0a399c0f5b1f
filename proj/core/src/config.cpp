#include "lipgan/config.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "spec_json.hpp"

namespace lipgan {

using detail::json;
using detail::StrictObject;

namespace {

std::string_view dataset_name(Dataset d) { return d == Dataset::SwissRoll ? "swiss_roll" : "mnist"; }

Dataset parse_dataset(const std::string& s, const std::string& path) {
  if (s == "swiss_roll") return Dataset::SwissRoll;
  if (s == "mnist") return Dataset::Mnist;
  throw ConfigError(path + ": unknown dataset '" + s + "'");
}

TrainConfig preset(const std::string& name, const std::string& path) {
  if (name == "swiss_roll_groupsort") return TrainConfig::swiss_roll_groupsort();
  if (name == "swiss_roll_clipping") return TrainConfig::swiss_roll_clipping();
  if (name == "mnist_groupsort") return TrainConfig::mnist_groupsort();
  throw ConfigError(path + ": unknown preset '" + name + "'");
}

json optimizer_json(const OptimizerConfig& c) {
  json j;
  j["kind"] = std::string(to_string(c.kind));
  j["lr"] = c.lr;
  if (c.kind == OptimizerKind::Adam) {
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
  }
  if (c.kind == OptimizerKind::RmsProp) j["rho"] = c.rho;
  if (c.kind != OptimizerKind::Sgd) j["eps"] = c.eps;
  return j;
}

void read_optimizer(const StrictObject& o, OptimizerConfig& c) {
  o.allow_only({"kind", "lr", "beta1", "beta2", "rho", "eps"});
  if (o.has("kind")) {
    try {
      c.kind = parse_optimizer_kind(o.get<std::string>("kind"));
    } catch (const ConfigError& e) {
      throw ConfigError(o.child("kind") + ": " + e.what());
    }
  }
  c.lr = o.get_or("lr", c.lr);
  c.beta1 = o.get_or("beta1", c.beta1);
  c.beta2 = o.get_or("beta2", c.beta2);
  c.rho = o.get_or("rho", c.rho);
  c.eps = o.get_or("eps", c.eps);
}

template <class F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("config", 0) == 0) throw;
    throw ConfigError(path + ": " + msg);
  }
}

void read_generator(const StrictObject& o, TrainConfig& c) {
  o.allow_only({"width", "depth", "hidden_activation", "output_activation", "norm_cap"});
  c.generator.width = o.get_or("width", c.generator.width);
  c.generator.depth = o.get_or("depth", c.generator.depth);
  if (o.has("hidden_activation")) {
    c.generator.hidden = wrap(o.child("hidden_activation"),
                              [&] { return parse_hidden_activation(o.get<std::string>("hidden_activation")); });
  }
  if (o.has("output_activation")) {
    c.generator.output = wrap(o.child("output_activation"),
                              [&] { return parse_output_activation(o.get<std::string>("output_activation")); });
  }
  if (o.has("norm_cap")) {
    if (o.at("norm_cap").is_null()) {
      c.generator_norm_cap.reset();
    } else {
      c.generator_norm_cap = o.get<double>("norm_cap");
    }
  }
}

void read_discriminator(const StrictObject& o, TrainConfig& c) {
  o.allow_only({"width", "depth", "hidden_activation", "constraint"});
  c.discriminator.width = o.get_or("width", c.discriminator.width);
  c.discriminator.depth = o.get_or("depth", c.discriminator.depth);
  if (o.has("hidden_activation")) {
    c.discriminator.hidden = wrap(o.child("hidden_activation"), [&] {
      return parse_hidden_activation(o.get<std::string>("hidden_activation"));
    });
  }
  if (o.has("constraint")) {
    const StrictObject k = o.object("constraint");
    k.allow_only({"mode", "steps", "order", "c"});
    Constraint& con = c.discriminator.constraint;
    if (k.has("mode")) {
      con.mode = wrap(k.child("mode"), [&] { return parse_constraint_mode(k.get<std::string>("mode")); });
    }
    con.bjorck_steps = k.get_or("steps", con.bjorck_steps);
    con.bjorck_order = k.get_or("order", con.bjorck_order);
    con.clip = k.get_or("c", con.clip);
  }
}

void read_eval(const StrictObject& o, EvalSchedule& e) {
  o.allow_only({"every", "exact_every", "samples", "repeats", "sliced_projections", "tail_threshold"});
  e.every = o.get_or("every", e.every);
  e.exact_every = o.get_or("exact_every", e.exact_every);
  e.samples = o.get_or("samples", e.samples);
  e.repeats = o.get_or("repeats", e.repeats);
  e.sliced_projections = o.get_or("sliced_projections", e.sliced_projections);
  e.tail_threshold = o.get_or("tail_threshold", e.tail_threshold);
}

void read_mnist(const StrictObject& o, MnistSettings& m) {
  o.allow_only({"images", "labels", "pca", "holdout", "pca_dim"});
  m.images = o.get_or("images", m.images);
  m.labels = o.get_or("labels", m.labels);
  m.pca = o.get_or("pca", m.pca);
  m.holdout = o.get_or("holdout", m.holdout);
  m.pca_dim = o.get_or("pca_dim", m.pca_dim);
}

TrainConfig train_config_from(const StrictObject& o) {
  o.allow_only({"preset", "experiment_id", "seed", "dataset", "generator", "discriminator",
                "generator_optimizer", "discriminator_optimizer", "batch_size", "total_iterations",
                "critic_steps", "n_train", "noise_dim", "eval", "mnist"});
  std::string preset_name = "swiss_roll_groupsort";
  if (o.has("dataset") && o.get<std::string>("dataset") == "mnist") preset_name = "mnist_groupsort";
  if (o.has("preset")) preset_name = o.get<std::string>("preset");
  TrainConfig c = preset(preset_name, o.child("preset"));
  if (o.has("dataset")) c.dataset = parse_dataset(o.get<std::string>("dataset"), o.child("dataset"));

  c.experiment_id = o.get_or("experiment_id", c.experiment_id);
  c.seed = o.get_or("seed", c.seed);
  c.batch_size = o.get_or("batch_size", c.batch_size);
  c.total_iterations = o.get_or("total_iterations", c.total_iterations);
  c.critic_steps = o.get_or("critic_steps", c.critic_steps);
  c.n_train = o.get_or("n_train", c.n_train);
  c.noise_dim = o.get_or("noise_dim", c.noise_dim);
  if (o.has("generator")) read_generator(o.object("generator"), c);
  if (o.has("discriminator")) read_discriminator(o.object("discriminator"), c);
  if (o.has("generator_optimizer")) read_optimizer(o.object("generator_optimizer"), c.generator_optimizer);
  if (o.has("discriminator_optimizer")) {
    read_optimizer(o.object("discriminator_optimizer"), c.discriminator_optimizer);
  }
  if (o.has("eval")) read_eval(o.object("eval"), c.eval);
  if (o.has("mnist")) read_mnist(o.object("mnist"), c.mnist);

  const std::size_t d = c.dataset == Dataset::SwissRoll ? 2 : 784;
  c.generator.input_dim = c.noise_dim;
  c.generator.output_dim = d;
  c.discriminator.input_dim = d;
  c.discriminator.output_dim = 1;
  wrap(o.path(), [&] {
    c.validate();
    return 0;
  });
  return c;
}

json train_config_json(const TrainConfig& c) {
  json j;
  j["experiment_id"] = c.experiment_id;
  j["seed"] = c.seed;
  j["dataset"] = std::string(dataset_name(c.dataset));
  j["generator"] = {{"width", c.generator.width},
                    {"depth", c.generator.depth},
                    {"hidden_activation", std::string(to_string(c.generator.hidden))},
                    {"output_activation", std::string(to_string(c.generator.output))}};
  j["generator"]["norm_cap"] = c.generator_norm_cap ? json(*c.generator_norm_cap) : json(nullptr);
  j["discriminator"] = {{"width", c.discriminator.width},
                        {"depth", c.discriminator.depth},
                        {"hidden_activation", std::string(to_string(c.discriminator.hidden))},
                        {"constraint", detail::constraint_json(c.discriminator.constraint)}};
  j["generator_optimizer"] = optimizer_json(c.generator_optimizer);
  j["discriminator_optimizer"] = optimizer_json(c.discriminator_optimizer);
  j["batch_size"] = c.batch_size;
  j["total_iterations"] = c.total_iterations;
  j["critic_steps"] = c.critic_steps;
  j["n_train"] = c.n_train;
  j["noise_dim"] = c.noise_dim;
  j["eval"] = {{"every", c.eval.every},
               {"exact_every", c.eval.exact_every},
               {"samples", c.eval.samples},
               {"repeats", c.eval.repeats},
               {"sliced_projections", c.eval.sliced_projections},
               {"tail_threshold", c.eval.tail_threshold}};
  if (c.dataset == Dataset::Mnist) {
    j["mnist"] = {{"images", c.mnist.images},
                  {"labels", c.mnist.labels},
                  {"pca", c.mnist.pca},
                  {"holdout", c.mnist.holdout},
                  {"pca_dim", c.mnist.pca_dim}};
  }
  return j;
}

}  // namespace

TrainConfig parse_train_config(std::string_view json_text) {
  const json j = detail::parse_json(json_text, "config");
  return train_config_from(StrictObject(j, "config"));
}

std::string train_config_to_json(const TrainConfig& config) { return train_config_json(config).dump(2); }

SweepSpec parse_sweep_spec(std::string_view json_text) {
  const json j = detail::parse_json(json_text, "sweep");
  const StrictObject o(j, "sweep");
  o.allow_only({"base", "axis", "values", "repeats", "output_dir", "label"});
  SweepSpec spec;
  spec.base = train_config_from(o.object("base"));
  spec.axis = wrap(o.child("axis"), [&] { return parse_sweep_axis(o.get<std::string>("axis")); });
  const json& values = o.at("values");
  if (!values.is_array()) throw ConfigError(o.child("values") + ": expected an array");
  for (std::size_t i = 0; i < values.size(); ++i) {
    spec.values.push_back(StrictObject::convert<double>(values[i], o.child("values") + "[" + std::to_string(i) + "]"));
  }
  spec.repeats = o.get_or("repeats", spec.repeats);
  spec.output_dir = o.get_or<std::string>("output_dir", "");
  spec.label = o.get_or<std::string>("label", spec.base.experiment_id);
  wrap("sweep", [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

std::string sweep_spec_to_json(const SweepSpec& spec) {
  json j;
  j["base"] = train_config_json(spec.base);
  j["axis"] = std::string(to_string(spec.axis));
  j["values"] = spec.values;
  j["repeats"] = spec.repeats;
  j["output_dir"] = spec.output_dir.string();
  j["label"] = spec.label;
  return j.dump(2);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace lipgan
