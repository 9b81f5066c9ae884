#pragma once

#include <string>
#include <vector>

#include "sharpot/types.hpp"

namespace sharpot {

/// One labelled panel of grouped histogram bars.
struct SvgPanel {
  std::string title;
  std::vector<Histogram> histograms;
  std::vector<std::string> labels;
};

/// Renders grouped bars for same-length histograms on a fixed 800x400
/// canvas with a legend. Pure function of its inputs, so output bytes are
/// identical across runs.
std::string render_svg_bars(const std::vector<Histogram>& histograms,
                            const std::vector<std::string>& labels);

/// Renders panels stacked vertically, one 800x400 canvas each.
std::string render_svg_panels(const std::vector<SvgPanel>& panels);

/// Writes render_svg_bars output to `path`. Refuses an empty histogram list
/// before touching the filesystem.
void emit_svg_bars(const std::vector<Histogram>& histograms,
                   const std::vector<std::string>& labels,
                   const std::string& path);

}  // namespace sharpot
