// SVG heatmaps of inventory-indexed grids.

#ifndef PHONERR_HEATMAP_H_
#define PHONERR_HEATMAP_H_

#include <string>
#include <string_view>
#include <vector>

#include "phonerr/inventory.h"

namespace phonerr {

enum class HeatmapKind {
  // Darkness = count / row max.
  kConfusion,
  // Darkness = 1 - cost / global max: similar (cheap) pairs are dark.
  kCost,
};

HeatmapKind ParseHeatmapKind(std::string_view name);

// Darkness in [0, 1] of every cell, row-major. A zero scale maximum gives 0.
std::vector<double> HeatmapDarkness(const std::vector<double>& values,
                                    std::size_t n, HeatmapKind kind);

// Byte-deterministic SVG: one rect per cell, axis labels in inventory order.
std::string RenderHeatmapSvg(const std::vector<double>& values,
                             const PhonemeInventory& inventory,
                             HeatmapKind kind);

}  // namespace phonerr

#endif  // PHONERR_HEATMAP_H_
