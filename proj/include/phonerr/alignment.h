// Weighted edit-distance alignment of expected vs. observed phone sequences.

#ifndef PHONERR_ALIGNMENT_H_
#define PHONERR_ALIGNMENT_H_

#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phonerr/cost_matrix.h"
#include "phonerr/inventory.h"
#include "phonerr/lexicon.h"

namespace phonerr {

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

std::string_view EditKindName(EditKind kind);

// match: expected == observed != eps; delete: observed == eps;
// insert: expected == eps. Never both eps.
struct EditOp {
  EditKind kind;
  PhoneId expected;
  PhoneId observed;
  double cost;

  bool operator==(const EditOp&) const = default;
};

struct Alignment {
  std::vector<EditOp> ops;
  double total_cost = 0.0;
};

// Backtrace step from cell (i, j).
enum class Move { kDiagonal, kDelete, kInsert };

// Preference among backtrace moves whose path sums tie exactly.
class TieBreak {
 public:
  // Diagonal (match/substitute), then delete, then insert.
  static TieBreak Default() {
    return TieBreak({Move::kDiagonal, Move::kDelete, Move::kInsert});
  }
  // Comma separated permutation of "diag", "del", "ins".
  static TieBreak Parse(std::string_view spec);

  explicit TieBreak(std::array<Move, 3> order);

  const std::array<Move, 3>& order() const { return order_; }
  std::string ToString() const;

 private:
  std::array<Move, 3> order_;
};

// Minimum-cost alignment. Inputs must be inventory ids other than epsilon.
// Ties compare path sums bitwise, with no tolerance.
Alignment Align(std::span<const PhoneId> expected,
                std::span<const PhoneId> observed, const CostMatrix& costs,
                const TieBreak& tie_break = TieBreak::Default());

// Exhaustive enumeration of every monotone edit script; a test oracle
// independent of the DP. Requires expected.size() + observed.size() <=
// kBruteforceMaxLength.
inline constexpr std::size_t kBruteforceMaxLength = 12;
double AlignBruteforce(std::span<const PhoneId> expected,
                       std::span<const PhoneId> observed,
                       const CostMatrix& costs);

// Every script reaching the brute-force minimum, in enumeration order.
std::vector<std::vector<EditOp>> OptimalScriptsBruteforce(
    std::span<const PhoneId> expected, std::span<const PhoneId> observed,
    const CostMatrix& costs);

struct VariantAlignment {
  Alignment alignment;
  std::vector<std::size_t> chosen;  // variant index per word
};

inline constexpr std::size_t kDefaultMaxVariantCombinations = 4096;

// Minimizes over every concatenation of per-word variants. The earliest
// combination (first word most significant) wins ties. Throws
// ValidationError when the combination count exceeds `max_combinations`.
VariantAlignment AlignMinVariant(
    const WordLattice& expected, std::span<const PhoneId> observed,
    const CostMatrix& costs, const TieBreak& tie_break = TieBreak::Default(),
    std::size_t max_combinations = kDefaultMaxVariantCombinations);

// One op per line: expected<TAB>observed<TAB>kind<TAB>cost.
void WriteAlignment(std::ostream& out, const Alignment& alignment,
                    const PhonemeInventory& inventory);

}  // namespace phonerr

#endif  // PHONERR_ALIGNMENT_H_
