#include "sharpot/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "sharpot/errors.hpp"

namespace sharpot {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 400;
constexpr double kLeft = 50.0;
constexpr double kRight = 10.0;
constexpr double kTop = 14.0;
constexpr double kBottom = 30.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Bars and legend of one panel, without the svg envelope.
std::string panel_body(const std::vector<Histogram>& histograms,
                       const std::vector<std::string>& labels,
                       const std::string& title) {
  const Eigen::Index bins = histograms.front().size();
  const size_t series = histograms.size();
  for (const auto& h : histograms) {
    if (h.size() != bins) {
      throw InvalidInput("svg: histograms must share a common length");
    }
  }
  if (!labels.empty() && labels.size() != series) {
    throw InvalidInput("svg: one label per histogram required");
  }

  double ymax = 0.0;
  for (const auto& h : histograms) {
    ymax = std::max(ymax, h.weights().maxCoeff());
  }
  if (ymax <= 0.0) ymax = 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double group_w = plot_w / static_cast<double>(bins);
  const double bar_w = 0.9 * group_w / static_cast<double>(series);

  std::string out;
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    out += "<text x=\"" + num(kLeft) + "\" y=\"11\" font-family=\"monospace\" "
           "font-size=\"11\">" + escape_xml(title) + "</text>\n";
  }
  // axis line
  out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) +
         "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" + num(kTop + plot_h) +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  out += "<text x=\"4\" y=\"" + num(kTop + 8.0) +
         "\" font-family=\"monospace\" font-size=\"10\">" + num(ymax) +
         "</text>\n";

  for (size_t s = 0; s < series; ++s) {
    const char* color = kPalette[s % kPaletteSize];
    for (Eigen::Index i = 0; i < bins; ++i) {
      const double v = histograms[s][i];
      const double h = plot_h * (v / ymax);
      const double x = kLeft + group_w * static_cast<double>(i) +
                       0.05 * group_w + bar_w * static_cast<double>(s);
      const double y = kTop + plot_h - h;
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
             num(bar_w) + "\" height=\"" + num(h) + "\" fill=\"" + color +
             "\"/>\n";
    }
  }

  for (size_t s = 0; s < labels.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    const double ly = kTop + 14.0 * static_cast<double>(s);
    out += "<rect x=\"" + num(kLeft + plot_w - 150.0) + "\" y=\"" + num(ly) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + num(kLeft + plot_w - 136.0) + "\" y=\"" +
           num(ly + 9.0) + "\" font-family=\"monospace\" font-size=\"11\">" +
           escape_xml(labels[s]) + "</text>\n";
  }
  return out;
}

}  // namespace

std::string render_svg_bars(const std::vector<Histogram>& histograms,
                            const std::vector<std::string>& labels) {
  if (histograms.empty()) {
    throw InvalidInput("svg: no histograms to draw");
  }
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(kWidth) + "\" height=\"" +
                    std::to_string(kHeight) + "\">\n";
  out += panel_body(histograms, labels, "");
  out += "</svg>\n";
  return out;
}

std::string render_svg_panels(const std::vector<SvgPanel>& panels) {
  if (panels.empty()) {
    throw InvalidInput("svg: no panels to draw");
  }
  const int total_h = kHeight * static_cast<int>(panels.size());
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(kWidth) + "\" height=\"" +
                    std::to_string(total_h) + "\">\n";
  for (size_t p = 0; p < panels.size(); ++p) {
    if (panels[p].histograms.empty()) {
      throw InvalidInput("svg: empty panel");
    }
    out += "<g transform=\"translate(0," +
           std::to_string(kHeight * static_cast<int>(p)) + ")\">\n";
    out += panel_body(panels[p].histograms, panels[p].labels, panels[p].title);
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_svg_bars(const std::vector<Histogram>& histograms,
                   const std::vector<std::string>& labels,
                   const std::string& path) {
  const std::string svg = render_svg_bars(histograms, labels);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << svg;
  if (!out) {
    throw IoError("write to " + path + " failed");
  }
}

}  // namespace sharpot
