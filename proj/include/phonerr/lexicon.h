// Pronouncing-dictionary parsing and word-to-phoneme conversion.

#ifndef PHONERR_LEXICON_H_
#define PHONERR_LEXICON_H_

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "phonerr/inventory.h"

namespace phonerr {

struct PronunciationVariant {
  std::vector<PhoneId> phones;  // non-empty, never epsilon

  bool operator==(const PronunciationVariant&) const = default;
};

// Normalized word -> pronunciation variants in source order.
class Lexicon {
 public:
  explicit Lexicon(InventoryPtr inventory);

  // `word` is normalized here. Throws ValidationError for an empty variant,
  // an epsilon phone or an out-of-range id.
  void Add(std::string_view word, PronunciationVariant variant);

  // nullptr when absent. `word` must already be normalized.
  const std::vector<PronunciationVariant>* Lookup(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<PronunciationVariant>, std::less<>>&
  entries() const {
    return entries_;
  }
  const InventoryPtr& inventory() const { return inventory_; }

  bool operator==(const Lexicon& other) const {
    return SameInventory(inventory_, other.inventory_) &&
           entries_ == other.entries_;
  }

 private:
  InventoryPtr inventory_;
  std::map<std::string, std::vector<PronunciationVariant>, std::less<>>
      entries_;
};

// CMU dictionary format: `WORD  PH PH ...`, variants as `WORD(1)`, `;;;`
// comment lines. Stress digits are stripped. Throws ParseError with the line
// number on unknown phonemes or malformed variant indices.
Lexicon ParseLexicon(std::istream& in, InventoryPtr inventory);
Lexicon ParseLexicon(std::string_view text, InventoryPtr inventory);

// Inverse of ParseLexicon (stress-free, words sorted, variants in order).
void WriteLexicon(std::ostream& out, const Lexicon& lexicon);

// AH0 -> AH. Throws ValidationError if the result is not in the inventory
// or is epsilon.
PhoneId StripStress(std::string_view label, const PhonemeInventory& inventory);

// Uppercase, trim leading/trailing punctuation, keep internal apostrophes.
std::string NormalizeWord(std::string_view word);

// Transcript preprocessing shared by prompts and ASR output: punctuation
// other than apostrophes separates words, then each word is normalized.
std::vector<std::string> Tokenize(std::string_view text);

enum class OovMode { kFail, kSkipUtterance, kSupplementaryLexicon };

class OovPolicy {
 public:
  static OovPolicy Fail() { return OovPolicy(OovMode::kFail, nullptr); }
  static OovPolicy SkipUtterance() {
    return OovPolicy(OovMode::kSkipUtterance, nullptr);
  }
  // `supplementary` must outlive the policy.
  static OovPolicy Supplementary(const Lexicon& supplementary) {
    return OovPolicy(OovMode::kSupplementaryLexicon, &supplementary);
  }

  OovMode mode() const { return mode_; }
  const Lexicon* supplementary() const { return supplementary_; }

 private:
  OovPolicy(OovMode mode, const Lexicon* supplementary)
      : mode_(mode), supplementary_(supplementary) {}

  OovMode mode_;
  const Lexicon* supplementary_;
};

enum class VariantRule { kFirst, kAll };

// Per-word alternative pronunciations.
using WordLattice = std::vector<std::vector<PronunciationVariant>>;

struct PhonemizeResult {
  // First variant of every word, concatenated.
  std::vector<PhoneId> phones;
  // Filled only under VariantRule::kAll.
  WordLattice lattice;
  // Every token not found, in token order (duplicates kept).
  std::vector<std::string> oov;
  // Tokens missing from the main lexicon but found in the supplementary one.
  std::vector<std::string> supplemented;
  // Set under kSkipUtterance when `oov` is non-empty.
  bool skipped = false;
};

// Throws OovError listing every missing word under kFail, and under
// kSupplementaryLexicon for words missing from both lexicons.
PhonemizeResult Phonemize(const std::vector<std::string>& tokens,
                          const Lexicon& lexicon, const OovPolicy& policy,
                          VariantRule rule = VariantRule::kFirst);

}  // namespace phonerr

#endif  // PHONERR_LEXICON_H_
