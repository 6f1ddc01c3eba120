// Labelled square grids in CSV form, shared by cost and confusion matrices.
//
// Layout: a header row whose first cell is ignored followed by inventory
// labels, then one row per label. Rows and columns may come in any order
// but must cover the inventory exactly once each.

#ifndef PHONERR_CSV_GRID_H_
#define PHONERR_CSV_GRID_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "phonerr/inventory.h"

namespace phonerr {

// Returns the grid row-major in inventory order. Throws ValidationError
// naming a missing, duplicate or unknown label, ParseError for
// non-numeric cells or ragged rows.
// T is double or std::uint64_t; cells must parse fully as T.
template <typename T>
std::vector<T> ParseLabelledGridAs(std::istream& in,
                                   const PhonemeInventory& inventory);

inline std::vector<double> ParseLabelledGrid(std::istream& in,
                                             const PhonemeInventory& inventory) {
  return ParseLabelledGridAs<double>(in, inventory);
}

// `cell(row, col)` renders one value.
void WriteLabelledGrid(
    std::ostream& out, const PhonemeInventory& inventory,
    const std::function<std::string(PhoneId, PhoneId)>& cell);

// Shortest round-trip decimal rendering.
std::string FormatReal(double value);

}  // namespace phonerr

#endif  // PHONERR_CSV_GRID_H_
