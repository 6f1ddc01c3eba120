#include "phonerr/heatmap.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "phonerr/error.h"

namespace phonerr {

namespace {

constexpr int kCell = 14;
constexpr int kMargin = 44;

std::string Escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

HeatmapKind ParseHeatmapKind(std::string_view name) {
  if (name == "confusion") return HeatmapKind::kConfusion;
  if (name == "cost") return HeatmapKind::kCost;
  throw ValidationError(fmt::format("unknown heatmap kind '{}'", name));
}

std::vector<double> HeatmapDarkness(const std::vector<double>& values,
                                    std::size_t n, HeatmapKind kind) {
  std::vector<double> dark(values.size(), 0.0);
  if (kind == HeatmapKind::kCost) {
    double max = *std::max_element(values.begin(), values.end());
    if (max <= 0.0) return dark;
    for (std::size_t i = 0; i < values.size(); ++i) dark[i] = 1.0 - values[i] / max;
    return dark;
  }
  for (std::size_t r = 0; r < n; ++r) {
    double max = *std::max_element(values.begin() + r * n,
                                   values.begin() + (r + 1) * n);
    if (max <= 0.0) continue;
    for (std::size_t c = 0; c < n; ++c) dark[r * n + c] = values[r * n + c] / max;
  }
  return dark;
}

std::string RenderHeatmapSvg(const std::vector<double>& values,
                             const PhonemeInventory& inventory,
                             HeatmapKind kind) {
  const std::size_t n = inventory.size();
  const auto dark = HeatmapDarkness(values, n, kind);
  const int side = kMargin + static_cast<int>(n) * kCell;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
      "viewBox=\"0 0 {0} {0}\" font-family=\"monospace\" font-size=\"9\">\n",
      side);
  for (std::size_t i = 0; i < n; ++i) {
    const int offset = kMargin + static_cast<int>(i) * kCell + kCell / 2;
    const std::string label = Escape(inventory.Label(PhoneId(i)));
    // Column labels (observed) across the top, row labels (expected) down
    // the left.
    svg += fmt::format(
        "<text class=\"col\" x=\"{0}\" y=\"{1}\" text-anchor=\"start\" "
        "transform=\"rotate(-90 {0} {1})\">{2}</text>\n",
        offset + 3, kMargin - 3, label);
    svg += fmt::format(
        "<text class=\"row\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
        kMargin - 3, offset + 3, label);
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const int level =
          static_cast<int>(std::lround(255.0 * (1.0 - dark[r * n + c])));
      svg += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
          "fill=\"#{:02x}{:02x}{:02x}\" data-row=\"{}\" data-col=\"{}\"/>\n",
          kMargin + static_cast<int>(c) * kCell,
          kMargin + static_cast<int>(r) * kCell, kCell, kCell, level, level,
          level, r, c);
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace phonerr
