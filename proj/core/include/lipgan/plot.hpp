#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lipgan/sweep.hpp"

namespace lipgan {

struct PlotOptions {
  std::string title;
  std::string y_label = "W1";
  int width = 640;
  int height = 420;
};

/// Renders one or more sweep curves sharing an axis as a standalone SVG.
/// Each point is one <circle class="marker"> with a standard-error bar; each
/// result is one polyline with a legend entry. Output depends only on the input.
std::string render_curves_svg(const std::vector<SweepResult>& results, const PlotOptions& options = {});

void plot_curves(const std::vector<SweepResult>& results, const std::filesystem::path& out,
                 const PlotOptions& options = {});
void plot_curves(const SweepResult& result, const std::filesystem::path& out, const PlotOptions& options = {});

}  // namespace lipgan
