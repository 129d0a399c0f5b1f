#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lipgan/sweep.hpp"
#include "lipgan/train.hpp"

namespace lipgan {

/// Parses a training config. Unknown keys anywhere are rejected; the
/// ConfigError message starts with the offending key path (e.g.
/// "config.generator.widht: unknown key"). Omitted keys take the defaults of
/// the named preset ("preset": "swiss_roll_groupsort" | "swiss_roll_clipping" |
/// "mnist_groupsort", default chosen by "dataset").
TrainConfig parse_train_config(std::string_view json_text);
std::string train_config_to_json(const TrainConfig& config);

SweepSpec parse_sweep_spec(std::string_view json_text);
std::string sweep_spec_to_json(const SweepSpec& spec);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace lipgan
