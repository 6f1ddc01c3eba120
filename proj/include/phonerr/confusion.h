// Per-speaker confusion matrices and the recognition/substitution metrics
// derived from them.

#ifndef PHONERR_CONFUSION_H_
#define PHONERR_CONFUSION_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "phonerr/alignment.h"
#include "phonerr/inventory.h"

namespace phonerr {

using Count = std::uint64_t;

// counts(expected, observed) over the inventory including epsilon. Deletions
// land in the epsilon column, insertions in the epsilon row; (eps, eps) is
// always 0.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(InventoryPtr inventory);
  // Row-major counts. Throws ValidationError on size mismatch or a
  // non-zero (eps, eps) cell.
  ConfusionMatrix(InventoryPtr inventory, std::vector<Count> counts);

  Count operator()(PhoneId expected, PhoneId observed) const {
    return counts_[Index(expected, observed)];
  }
  void Add(PhoneId expected, PhoneId observed, Count n = 1);

  Count RowTotal(PhoneId expected) const;
  Count Total() const;

  std::size_t size() const { return n_; }
  const InventoryPtr& inventory() const { return inventory_; }
  const std::vector<Count>& counts() const { return counts_; }

  bool operator==(const ConfusionMatrix& other) const {
    return SameInventory(inventory_, other.inventory_) &&
           counts_ == other.counts_;
  }

 private:
  std::size_t Index(PhoneId r, PhoneId c) const {
    return static_cast<std::size_t>(r) * n_ + static_cast<std::size_t>(c);
  }

  InventoryPtr inventory_;
  std::size_t n_;
  std::vector<Count> counts_;
};

struct SpeakerProfile {
  std::string speaker_id;
  std::string l1_label;  // empty when unknown
  ConfusionMatrix matrix;
  Count utterance_count = 0;

  explicit SpeakerProfile(InventoryPtr inventory, std::string id = {},
                          std::string l1 = {})
      : speaker_id(std::move(id)),
        l1_label(std::move(l1)),
        matrix(std::move(inventory)) {}
};

// Adds one count per op. Match/substitute -> (x, y), delete -> (x, eps),
// insert -> (eps, y).
void Accumulate(ConfusionMatrix& matrix, const Alignment& alignment);
// Same, and counts the utterance.
void Accumulate(SpeakerProfile& profile, const Alignment& alignment);

// Exact fraction; rendered only at report time.
struct Rate {
  Count numerator = 0;
  Count denominator = 0;

  double value() const {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  bool operator==(const Rate&) const = default;
};

// One-decimal percentage, rounded half up: 792/1000 -> "79.2%".
std::string FormatPercent(const Rate& rate);

// counts(t, t) / row total. Throws UndefinedRateError for an empty row and
// ValidationError for epsilon.
Rate RecognitionRate(const ConfusionMatrix& matrix, PhoneId target);

struct Substitute {
  PhoneId phone;  // may be epsilon only when deletions are included
  Rate rate;
  bool operator==(const Substitute&) const = default;
};

// Largest off-diagonal count in the target row, lowest inventory index on
// ties. The epsilon column is ignored unless `include_deletion`. Empty when
// there are no off-diagonal counts. Throws like RecognitionRate.
std::optional<Substitute> MostCommonSubstitute(const ConfusionMatrix& matrix,
                                               PhoneId target,
                                               bool include_deletion = false);

// Elementwise sum. Throws ValidationError on inventory mismatch.
ConfusionMatrix Merge(const ConfusionMatrix& a, const ConfusionMatrix& b);

// Non-zero epsilon-row counts, largest first (lowest index on ties).
std::vector<std::pair<PhoneId, Count>> InsertionStats(
    const ConfusionMatrix& matrix);

struct PhonemeStats {
  PhoneId target;
  Count occurrences;
  Rate recognition_rate;
  // Every non-zero off-diagonal cell of the row, epsilon included, sorted by
  // count descending then index.
  std::vector<Substitute> substitutes;
};

PhonemeStats ComputePhonemeStats(const ConfusionMatrix& matrix, PhoneId target);

// Same grid layout as the cost-matrix CSV, integer cells.
void WriteConfusionCsv(std::ostream& out, const ConfusionMatrix& matrix);
ConfusionMatrix ParseConfusionCsv(std::istream& in, InventoryPtr inventory);

// {speaker_id, l1_label, utterance_count, inventory, counts[row][col]}
nlohmann::json ProfileToJson(const SpeakerProfile& profile);
SpeakerProfile ProfileFromJson(const nlohmann::json& j, InventoryPtr inventory);

}  // namespace phonerr

#endif  // PHONERR_CONFUSION_H_
