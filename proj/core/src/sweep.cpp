#include "lipgan/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json_util.hpp"
#include "lipgan/config.hpp"
#include "lipgan/errors.hpp"

namespace lipgan {

using detail::json;

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::NTrain: return "n_train";
    case SweepAxis::GenWidth: return "W_g";
    case SweepAxis::GenDepth: return "D_g";
    case SweepAxis::DiscWidth: return "W_f";
    case SweepAxis::DiscDepth: return "D_f";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view s) {
  for (auto a : {SweepAxis::NTrain, SweepAxis::GenWidth, SweepAxis::GenDepth, SweepAxis::DiscWidth,
                 SweepAxis::DiscDepth}) {
    if (s == to_string(a)) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(s) + "' (n_train, W_g, D_g, W_f, D_f)");
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep: no axis values");
  if (repeats < 1) throw ConfigError("sweep: repeats must be >= 1");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!(v >= 1.0) || v != std::floor(v)) {
      throw ConfigError("sweep.values[" + std::to_string(i) + "]: expected a positive integer");
    }
    if (i > 0 && !(values[i - 1] < v)) throw ConfigError("sweep.values: must be strictly increasing");
  }
  for (double v : values) cell_config(v, base.seed).validate();
}

TrainConfig SweepSpec::cell_config(double value, std::uint64_t seed) const {
  TrainConfig c = base;
  const auto n = static_cast<std::size_t>(value);
  switch (axis) {
    case SweepAxis::NTrain: c.n_train = n; break;
    case SweepAxis::GenWidth: c.generator.width = n; break;
    case SweepAxis::GenDepth: c.generator.depth = n; break;
    case SweepAxis::DiscWidth: c.discriminator.width = n; break;
    case SweepAxis::DiscDepth: c.discriminator.depth = n; break;
  }
  c.seed = seed;
  c.experiment_id = base.experiment_id + "_" + std::string(to_string(axis)) + "_" + std::to_string(n);
  return c;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string cell_name(double value, std::uint64_t seed) {
  return "v" + std::to_string(static_cast<long long>(value)) + "_s" + std::to_string(seed);
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

std::optional<SweepRun> read_completed(const std::filesystem::path& cell) {
  const auto path = cell / "result.json";
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const json j = json::parse(read_text_file(path));
    if (j.at("status").get<std::string>() != "ok") return std::nullopt;
    SweepRun r;
    r.axis_value = j.at("axis_value").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ok = true;
    r.final_w1 = j.at("final_w1").get<double>();
    r.initial_w1 = j.at("initial_w1").get<double>();
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_result(const std::filesystem::path& cell, const SweepRun& r) {
  json j;
  j["status"] = r.ok ? "ok" : "failed";
  j["axis_value"] = r.axis_value;
  j["seed"] = r.seed;
  j["final_w1"] = r.final_w1;
  j["initial_w1"] = r.initial_w1;
  if (!r.ok) j["error"] = r.error;
  write_text_file(cell / "result.json", j.dump(2) + "\n");
}

std::string runs_csv(const std::vector<SweepRun>& runs) {
  std::ostringstream os;
  os << "value,seed,status,initial_w1,final_w1,error\n";
  for (const auto& r : runs) {
    os << fmt(r.axis_value) << ',' << r.seed << ',' << (r.ok ? "ok" : "failed") << ',' << fmt(r.initial_w1)
       << ',' << fmt(r.final_w1) << ',' << sanitize(r.error) << '\n';
  }
  return os.str();
}

std::string aggregate_csv(SweepAxis axis, const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "axis,value,mean_w1,stderr,initial_mean,count,failed,degraded\n";
  for (const auto& p : points) {
    os << to_string(axis) << ',' << fmt(p.axis_value) << ',' << fmt(p.mean) << ',' << fmt(p.stderr_) << ','
       << fmt(p.initial_mean) << ',' << p.count << ',' << p.failed << ',' << (p.degraded ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<std::string> split(const std::string& line, char sep, std::size_t max_fields) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (out.size() + 1 < max_fields) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) break;
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  out.push_back(line.substr(start));
  return out;
}

}  // namespace

std::vector<SweepPoint> aggregate_runs(const std::vector<SweepRun>& runs) {
  std::vector<double> values;
  for (const auto& r : runs)
    if (std::find(values.begin(), values.end(), r.axis_value) == values.end()) values.push_back(r.axis_value);
  std::sort(values.begin(), values.end());

  std::vector<SweepPoint> points;
  for (double v : values) {
    SweepPoint p;
    p.axis_value = v;
    std::vector<double> w1, init;
    std::size_t total = 0;
    for (const auto& r : runs) {
      if (r.axis_value != v) continue;
      ++total;
      if (r.ok) {
        w1.push_back(r.final_w1);
        init.push_back(r.initial_w1);
      } else {
        ++p.failed;
      }
    }
    p.count = w1.size();
    p.degraded = 2 * p.failed >= total;
    if (!w1.empty()) {
      double s = 0.0, si = 0.0;
      for (std::size_t i = 0; i < w1.size(); ++i) {
        s += w1[i];
        si += init[i];
      }
      p.mean = s / static_cast<double>(w1.size());
      p.initial_mean = si / static_cast<double>(w1.size());
      if (w1.size() > 1) {
        double ss = 0.0;
        for (double x : w1) ss += (x - p.mean) * (x - p.mean);
        const double sd = std::sqrt(ss / static_cast<double>(w1.size() - 1));
        p.stderr_ = sd / std::sqrt(static_cast<double>(w1.size()));
      }
    }
    points.push_back(p);
  }
  return points;
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options,
                      std::function<RealData(const TrainConfig&)> data_for) {
  spec.validate();
  if (!data_for) data_for = [](const TrainConfig& c) { return swiss_roll_data(c); };
  const auto& dir = spec.output_dir;
  if (dir.empty()) throw ConfigError("sweep: output_dir is empty");
  std::filesystem::create_directories(dir / "cells");

  SweepResult result;
  result.label = spec.label.empty() ? spec.base.experiment_id : spec.label;
  result.axis = spec.axis;

  struct Cell {
    double value;
    std::uint64_t seed;
    std::filesystem::path path;
  };
  std::vector<Cell> cells;
  for (double v : spec.values)
    for (int k = 0; k < spec.repeats; ++k) {
      const std::uint64_t seed = spec.base.seed + static_cast<std::uint64_t>(k);
      cells.push_back({v, seed, dir / "cells" / cell_name(v, seed)});
    }
  result.runs.resize(cells.size());

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (auto done = read_completed(cells[i].path)) {
      result.runs[i] = *done;
    } else {
      todo.push_back(i);
    }
  }
  result.trained = todo.size();

  std::mutex writer;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= todo.size()) return;
      const Cell& cell = cells[todo[t]];
      SweepRun run;
      run.axis_value = cell.value;
      run.seed = cell.seed;
      try {
        const TrainConfig cfg = spec.cell_config(cell.value, cell.seed);
        std::filesystem::create_directories(cell.path);
        write_text_file(cell.path / "config.json", train_config_to_json(cfg) + "\n");
        TrainOptions topt;
        topt.out_dir = cell.path;
        const TrainResult tr = train(cfg, data_for(cfg), topt);
        run.ok = true;
        run.final_w1 = tr.final_w1;
        run.initial_w1 = tr.initial_w1;
      } catch (const std::exception& e) {
        run.ok = false;
        run.error = e.what();
      }
      std::lock_guard lock(writer);
      result.runs[todo[t]] = run;
      try {
        write_result(cell.path, run);
      } catch (const std::exception&) {
      }
      if (options.on_run) options.on_run(run);
    }
  };

  unsigned threads = options.threads;
  if (threads == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw > 1 ? hw - 1 : 1;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(todo.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  result.points = aggregate_runs(result.runs);
  result.degraded = std::any_of(result.points.begin(), result.points.end(),
                                [](const SweepPoint& p) { return p.degraded; });

  json meta;
  meta["label"] = result.label;
  meta["axis"] = std::string(to_string(spec.axis));
  meta["degraded"] = result.degraded;
  write_text_file(dir / "sweep.json", sweep_spec_to_json(spec) + "\n");
  write_text_file(dir / "result.json", meta.dump(2) + "\n");
  write_text_file(dir / "runs.csv", runs_csv(result.runs));
  write_text_file(dir / "aggregate.csv", aggregate_csv(spec.axis, result.points));
  return result;
}

SweepResult load_sweep_result(const std::filesystem::path& dir) {
  const json meta = detail::parse_json(read_text_file(dir / "result.json"), (dir / "result.json").string());
  SweepResult result;
  result.label = meta.at("label").get<std::string>();
  result.axis = parse_sweep_axis(meta.at("axis").get<std::string>());

  std::istringstream in(read_text_file(dir / "runs.csv"));
  std::string line;
  std::getline(in, line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',', 6);
    if (f.size() != 6) throw FormatError((dir / "runs.csv").string() + ": line " + std::to_string(lineno));
    SweepRun r;
    try {
      r.axis_value = std::stod(f[0]);
      r.seed = std::stoull(f[1]);
      r.ok = f[2] == "ok";
      r.initial_w1 = std::stod(f[3]);
      r.final_w1 = std::stod(f[4]);
    } catch (const std::exception&) {
      throw FormatError((dir / "runs.csv").string() + ": line " + std::to_string(lineno));
    }
    r.error = f[5];
    result.runs.push_back(r);
  }
  result.points = aggregate_runs(result.runs);
  result.degraded = std::any_of(result.points.begin(), result.points.end(),
                                [](const SweepPoint& p) { return p.degraded; });
  return result;
}

}  // namespace lipgan
