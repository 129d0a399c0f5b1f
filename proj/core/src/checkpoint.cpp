#include "lipgan/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "spec_json.hpp"

namespace lipgan {

using detail::json;
using detail::StrictObject;

std::string spec_to_json(const MlpSpec& spec) { return detail::spec_json(spec).dump(); }

std::string checkpoint_to_json(const NetworkCheckpoint& ckpt) {
  json j;
  j["spec"] = detail::spec_json(ckpt.params.spec);
  j["weights"] = json::array();
  for (const auto& w : ckpt.params.weights) {
    j["weights"].push_back(std::vector<double>(w.values().begin(), w.values().end()));
  }
  j["biases"] = json::array();
  for (const auto& b : ckpt.params.biases) {
    j["biases"].push_back(std::vector<double>(b.values().begin(), b.values().end()));
  }
  j["step"] = ckpt.step;
  j["seed"] = ckpt.seed;
  return j.dump();
}

NetworkCheckpoint checkpoint_from_json(std::string_view text) {
  const json j = detail::parse_json(text, "checkpoint");
  StrictObject root(j, "checkpoint");
  root.allow_only({"spec", "weights", "biases", "step", "seed"});

  NetworkCheckpoint ckpt;
  ckpt.params.spec = detail::spec_from_json(root.object("spec"));
  ckpt.params.spec.validate();
  ckpt.step = root.get<long>("step");
  ckpt.seed = root.get<std::uint64_t>("seed");

  const auto shapes = ckpt.params.spec.layer_shapes();
  auto read_layers = [&](std::string_view key, bool bias) {
    const json& arr = root.at(key);
    if (!arr.is_array() || arr.size() != shapes.size()) {
      throw ConfigError(root.child(key) + ": expected " + std::to_string(shapes.size()) + " layers");
    }
    std::vector<Tensor> out;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      const std::string path = root.child(key) + "[" + std::to_string(i) + "]";
      const auto [fan_in, fan_out] = shapes[i];
      const std::size_t rows = bias ? 1 : fan_in;
      if (!arr[i].is_array()) throw ConfigError(path + ": expected an array");
      std::vector<double> values;
      values.reserve(arr[i].size());
      for (const auto& v : arr[i]) values.push_back(StrictObject::convert<double>(v, path));
      if (values.size() != rows * fan_out) {
        throw ConfigError(path + ": expected " + std::to_string(rows * fan_out) + " values");
      }
      out.emplace_back(rows, fan_out, std::move(values));
    }
    return out;
  };
  ckpt.params.weights = read_layers("weights", false);
  ckpt.params.biases = read_layers("biases", true);
  return ckpt;
}

void save_checkpoint(const NetworkCheckpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(ckpt) << '\n';
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

NetworkCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace lipgan
