// Human phoneme-level annotations and ASR-vs-annotator comparison.

#ifndef PHONERR_ANNOTATIONS_H_
#define PHONERR_ANNOTATIONS_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phonerr/confusion.h"
#include "phonerr/inventory.h"

namespace phonerr {

enum class AnnotationKind { kCorrect, kSubstitution, kDeletion, kInsertion };

std::string_view AnnotationKindName(AnnotationKind kind);

struct AnnotationRecord {
  std::string utterance_id;
  std::size_t position = 0;
  PhoneId target;
  PhoneId observed;
  AnnotationKind kind;

  bool operator==(const AnnotationRecord&) const = default;
};

struct AnnotationSet {
  std::string speaker_id;
  std::vector<AnnotationRecord> records;

  bool operator==(const AnnotationSet&) const = default;
};

// Throws ValidationError when kind disagrees with the epsilon pattern:
// correct needs target == observed != eps, substitution two different
// non-eps phones, deletion observed == eps, insertion target == eps.
void ValidateRecord(const AnnotationRecord& record,
                    const PhonemeInventory& inventory);

// Header `utterance,position,target,observed,kind`; epsilon is `<eps>`.
// Positions must not decrease within an utterance. Errors carry the line.
AnnotationSet ParseAnnotationCsv(std::istream& in,
                                 const PhonemeInventory& inventory,
                                 std::string speaker_id = {});
void WriteAnnotationCsv(std::ostream& out, const AnnotationSet& set,
                        const PhonemeInventory& inventory);

// How interval labels map to records. A bare phone label is a correct
// realization; `T<sep>D<sep>s` is target, observed and a kind code.
struct LabelConvention {
  char separator = ',';
  std::string substitution_code = "s";
  std::string deletion_code = "d";
  std::string insertion_code = "i";
  // Spellings of the empty side of a deletion or insertion.
  std::set<std::string> epsilon_spellings = {"<eps>", "sil", "err", ""};
  // Bare labels dropped without being reported (pauses, empty intervals).
  std::set<std::string> ignored_labels = {"", "sil", "sp", "spn"};
};

struct TextGridResult {
  AnnotationSet set;
  // Labels that matched no rule of the convention, in interval order.
  std::vector<std::string> skipped_labels;
};

// Reads long- or short-form Praat TextGrid text. Throws ParseError with a
// byte offset on malformed structure, ValidationError naming the available
// tiers when `tier_name` is absent.
TextGridResult ParseTextGrid(std::string_view text, std::string_view tier_name,
                             const LabelConvention& convention,
                             const PhonemeInventory& inventory,
                             std::string utterance_id = {});

ConfusionMatrix AnnotationsToConfusion(const AnnotationSet& set,
                                       InventoryPtr inventory);

struct ComparisonRow {
  PhoneId target;
  std::optional<Rate> asr_rate;
  std::optional<Rate> ha_rate;
  std::optional<Substitute> asr_mcs;
  std::optional<Substitute> ha_mcs;
};

struct ComparisonTable {
  std::string group;  // e.g. an L1 label
  bool has_annotations = true;
  std::vector<ComparisonRow> rows;
};

struct TargetSelection {
  // When non-empty, exactly these targets in this order.
  std::vector<PhoneId> targets;
  // Otherwise the k lowest ASR recognition rates among phonemes with at
  // least `min_occurrences` occurrences.
  std::size_t top_k = 3;
  Count min_occurrences = 20;
};

// Targets for the default top-k rule: ascending ASR rate, then index.
std::vector<PhoneId> LowestRecognitionTargets(const ConfusionMatrix& asr,
                                              std::size_t k,
                                              Count min_occurrences);

// `ha` may be null: its columns are then reported as absent.
ComparisonTable Compare(const ConfusionMatrix& asr, const ConfusionMatrix* ha,
                        const TargetSelection& selection,
                        std::string group = {});

// CSV and aligned plain text, columns: group, target, rate ASR, rate HA,
// MCS ASR, MCS HA, MCS rate ASR, MCS rate HA.
void WriteComparisonCsv(std::ostream& out, const ComparisonTable& table,
                        const PhonemeInventory& inventory);
void WriteComparisonText(std::ostream& out, const ComparisonTable& table,
                         const PhonemeInventory& inventory);

}  // namespace phonerr

#endif  // PHONERR_ANNOTATIONS_H_
