#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "lipgan/mlp.hpp"

namespace lipgan {

/// One network snapshot. Serialized as
/// {"spec": {...}, "weights": [[row-major...], ...], "biases": [[...], ...],
///  "step": N, "seed": S}
/// Doubles are written in shortest round-trip form, so load(save(x)) == x exactly.
struct NetworkCheckpoint {
  MlpParams params;
  long step = 0;
  std::uint64_t seed = 0;
};

std::string checkpoint_to_json(const NetworkCheckpoint& ckpt);
/// Throws ConfigError on schema violations (message names the key path).
NetworkCheckpoint checkpoint_from_json(std::string_view text);

void save_checkpoint(const NetworkCheckpoint& ckpt, const std::filesystem::path& path);
NetworkCheckpoint load_checkpoint(const std::filesystem::path& path);

std::string spec_to_json(const MlpSpec& spec);

}  // namespace lipgan
