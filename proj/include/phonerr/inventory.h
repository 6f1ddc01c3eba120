// The closed phoneme symbol set that indexes every matrix and vector.

#ifndef PHONERR_INVENTORY_H_
#define PHONERR_INVENTORY_H_

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phonerr {

// Index of a symbol within a PhonemeInventory.
using PhoneId = int;

inline constexpr std::string_view kEpsilonLabel = "<eps>";
inline constexpr std::size_t kInventorySize = 40;

// 39 stress-free ARPAbet phonemes plus epsilon. Immutable after construction.
class PhonemeInventory {
 public:
  // Built-in ARPAbet set in CMU dictionary order, epsilon last.
  static std::shared_ptr<const PhonemeInventory> Arpabet();

  // Throws ValidationError unless there are exactly kInventorySize unique
  // symbols with exactly one kEpsilonLabel.
  explicit PhonemeInventory(std::vector<std::string> symbols);

  // One symbol per line; blank lines and '#' comments are skipped.
  static PhonemeInventory Parse(std::istream& in);

  std::size_t size() const { return symbols_.size(); }
  PhoneId epsilon() const { return epsilon_; }
  bool IsEpsilon(PhoneId id) const { return id == epsilon_; }
  bool Contains(PhoneId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < symbols_.size();
  }

  const std::string& Label(PhoneId id) const { return symbols_.at(id); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  // Exact label lookup (no stress stripping).
  std::optional<PhoneId> Find(std::string_view label) const;
  // Like Find but throws ValidationError naming the label.
  PhoneId Require(std::string_view label) const;

  bool operator==(const PhonemeInventory& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, PhoneId> index_;
  PhoneId epsilon_ = -1;
};

using InventoryPtr = std::shared_ptr<const PhonemeInventory>;

// Same object or same symbol order.
inline bool SameInventory(const InventoryPtr& a, const InventoryPtr& b) {
  return a == b || (a && b && *a == *b);
}

// Renders a phone sequence as space separated labels.
std::string JoinLabels(const PhonemeInventory& inventory,
                       const std::vector<PhoneId>& phones);

}  // namespace phonerr

#endif  // PHONERR_INVENTORY_H_
