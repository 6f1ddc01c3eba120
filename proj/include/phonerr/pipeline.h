// End-to-end corpus processing behind the command-line tool.

#ifndef PHONERR_PIPELINE_H_
#define PHONERR_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "phonerr/alignment.h"
#include "phonerr/annotations.h"
#include "phonerr/clustering.h"
#include "phonerr/confusion.h"
#include "phonerr/cost_matrix.h"
#include "phonerr/heatmap.h"
#include "phonerr/lexicon.h"
#include "phonerr/manifest.h"
#include "phonerr/tsne.h"

namespace phonerr {

struct RunConfig {
  std::filesystem::path lexicon_path;
  std::filesystem::path supplementary_lexicon_path;
  // Empty means uniform (Levenshtein) weights.
  std::filesystem::path cost_matrix_path;
  // Empty means the built-in ARPAbet inventory.
  std::filesystem::path inventory_path;
  OovMode oov_mode = OovMode::kFail;
  VariantRule variant_rule = VariantRule::kFirst;
  TieBreak tie_break = TieBreak::Default();
  std::size_t max_variant_combinations = kDefaultMaxVariantCombinations;
  KMeansOptions kmeans;
  TsneOptions tsne;
  Normalization normalization = Normalization::kRawCounts;
  std::string textgrid_tier = "phones";
  LabelConvention label_convention;
  TargetSelection selection;
  // Resolved into selection.targets against the inventory.
  std::vector<std::string> target_labels;
  bool per_speaker_comparison = false;
  std::size_t jobs = 1;
  std::filesystem::path out_dir = "out";
};

struct OovEntry {
  std::string speaker_id;
  std::string utterance_id;
  std::string side;  // "prompt" or "asr"
  std::string word;
  std::string resolution;  // "missing" or "supplementary"
};

struct PhonemizedUtterance {
  std::string speaker_id;
  std::string utterance_id;
  PhonemizeResult expected;
  PhonemizeResult observed;
  bool skipped = false;
};

struct AlignSummary {
  std::vector<SpeakerProfile> profiles;  // manifest order
  std::size_t utterances_aligned = 0;
  std::size_t utterances_skipped = 0;
  std::size_t total_ops = 0;
};

struct ClusterSummary {
  ClusterResult clusters;
  std::optional<double> purity;  // when every speaker has an L1 label
  TsneResult tsne;
};

// Loads and validates every configured resource on construction, so a bad
// lexicon or cost matrix fails before any utterance is touched.
class Pipeline {
 public:
  explicit Pipeline(RunConfig config);

  const RunConfig& config() const { return config_; }
  const InventoryPtr& inventory() const { return inventory_; }
  const CostMatrix& costs() const { return costs_; }

  // Writes phonemes/<speaker>/<utterance>.txt and oov_report.tsv. Unless
  // utterances are being skipped, the report is written first and then
  // OovError lists every miss.
  std::vector<PhonemizedUtterance> Phonemize(const CorpusManifest& manifest) const;

  // Writes oov_report.tsv, alignments/<speaker>/<utterance>.tsv and
  // profiles/<speaker>.{csv,json}. Misses are handled as in Phonemize.
  AlignSummary Align(const CorpusManifest& manifest) const;

  // Writes clusters.csv, embedding.csv and cluster_summary.json.
  ClusterSummary Cluster(const std::vector<SpeakerProfile>& profiles) const;

  // One table per L1 group (pooled counts), written to comparison/.
  std::vector<ComparisonTable> Compare(
      const CorpusManifest& manifest,
      const std::vector<SpeakerProfile>& profiles) const;

  // heatmaps/<speaker>.svg for every profile.
  void Heatmaps(const std::vector<SpeakerProfile>& profiles) const;

  // Everything above, in order.
  void Run(const CorpusManifest& manifest) const;

  // Reads every *.json profile in `dir`, sorted by file name.
  std::vector<SpeakerProfile> LoadProfiles(const std::filesystem::path& dir) const;

 private:
  AnnotationSet LoadAnnotations(const std::filesystem::path& path,
                                const std::string& speaker_id,
                                const std::string& utterance_id,
                                std::vector<std::string>& skipped) const;
  void RequireLexicon() const;
  void Write(const std::filesystem::path& relative,
             const std::string& content) const;

  RunConfig config_;
  InventoryPtr inventory_;
  Lexicon lexicon_;
  std::optional<Lexicon> supplementary_;
  CostMatrix costs_;
};

// Creates parent directories as needed.
void WriteTextFile(const std::filesystem::path& path, const std::string& content);

// Replaces characters unusable in a file name with '_'.
std::string SafeFileStem(std::string_view label);

}  // namespace phonerr

#endif  // PHONERR_PIPELINE_H_
