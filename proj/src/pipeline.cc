#include "phonerr/pipeline.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "phonerr/csv_grid.h"
#include "phonerr/error.h"

namespace phonerr {

namespace fs = std::filesystem;

void WriteTextFile(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

std::string SafeFileStem(std::string_view label) {
  if (label.empty()) return "unlabelled";
  std::string out(label);
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
  }
  return out;
}

namespace {

InventoryPtr LoadInventory(const RunConfig& config) {
  if (config.inventory_path.empty()) return PhonemeInventory::Arpabet();
  std::ifstream in(config.inventory_path);
  if (!in) {
    throw ValidationError(
        fmt::format("cannot read inventory '{}'", config.inventory_path.string()));
  }
  return std::make_shared<const PhonemeInventory>(PhonemeInventory::Parse(in));
}

Lexicon LoadLexicon(const fs::path& path, const InventoryPtr& inventory) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read lexicon '{}'", path.string()));
  try {
    return ParseLexicon(in, inventory);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::optional<Lexicon> LoadSupplementary(const RunConfig& config,
                                         const InventoryPtr& inventory) {
  if (config.oov_mode != OovMode::kSupplementaryLexicon) return std::nullopt;
  if (config.supplementary_lexicon_path.empty()) {
    throw ValidationError("the supplementary OOV policy needs a second lexicon");
  }
  return LoadLexicon(config.supplementary_lexicon_path, inventory);
}

CostMatrix LoadCosts(const RunConfig& config, const InventoryPtr& inventory) {
  if (config.cost_matrix_path.empty()) return CostMatrix::Uniform(inventory);
  std::ifstream in(config.cost_matrix_path);
  if (!in) {
    throw ValidationError(fmt::format("cannot read cost matrix '{}'",
                                      config.cost_matrix_path.string()));
  }
  try {
    return ParseCostMatrix(in, inventory);
  } catch (const std::runtime_error& e) {
    throw ValidationError(
        fmt::format("{}: {}", config.cost_matrix_path.string(), e.what()));
  }
}

template <typename Fn>
std::string Render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

}  // namespace

Pipeline::Pipeline(RunConfig config)
    : config_(std::move(config)),
      inventory_(LoadInventory(config_)),
      lexicon_(config_.lexicon_path.empty()
                   ? Lexicon(inventory_)
                   : LoadLexicon(config_.lexicon_path, inventory_)),
      supplementary_(LoadSupplementary(config_, inventory_)),
      costs_(LoadCosts(config_, inventory_)) {
  if (config_.jobs == 0) config_.jobs = 1;
  for (const auto& label : config_.target_labels) {
    config_.selection.targets.push_back(inventory_->Require(label));
  }
}

void Pipeline::RequireLexicon() const {
  if (config_.lexicon_path.empty()) throw ValidationError("no lexicon configured");
}

void Pipeline::Write(const fs::path& relative, const std::string& content) const {
  WriteTextFile(config_.out_dir / relative, content);
}

namespace {

// Phonemizes one side, collecting misses instead of throwing.
PhonemizeResult PhonemizeSide(const std::string& text, const Lexicon& lexicon,
                              const OovPolicy& policy, VariantRule rule) {
  try {
    return Phonemize(Tokenize(text), lexicon, policy, rule);
  } catch (const OovError& e) {
    PhonemizeResult r;
    r.oov = e.words();
    r.skipped = true;
    // Recover which tokens the supplementary lexicon did resolve.
    if (policy.supplementary() != nullptr) {
      for (const auto& token : Tokenize(text)) {
        if (!lexicon.Lookup(token) && policy.supplementary()->Lookup(token)) {
          r.supplemented.push_back(token);
        }
      }
    }
    return r;
  }
}

OovPolicy MakePolicy(OovMode mode, const std::optional<Lexicon>& supplementary) {
  switch (mode) {
    case OovMode::kFail: return OovPolicy::Fail();
    case OovMode::kSkipUtterance: return OovPolicy::SkipUtterance();
    case OovMode::kSupplementaryLexicon: return OovPolicy::Supplementary(*supplementary);
  }
  return OovPolicy::Fail();
}

std::vector<PhonemizedUtterance> PhonemizeAll(
    const CorpusManifest& manifest, const Lexicon& lexicon,
    const OovPolicy& policy, VariantRule rule, std::vector<OovEntry>& oov) {
  std::vector<PhonemizedUtterance> out;
  for (const auto& speaker : manifest.speakers) {
    for (const auto& utt : speaker.utterances) {
      PhonemizedUtterance p{speaker.speaker_id, utt.utterance_id,
                            PhonemizeSide(utt.prompt_text, lexicon, policy, rule),
                            PhonemizeSide(utt.asr_text, lexicon, policy,
                                          VariantRule::kFirst),
                            false};
      for (const auto* side : {&p.expected, &p.observed}) {
        const char* name = side == &p.expected ? "prompt" : "asr";
        for (const auto& w : side->supplemented) {
          oov.push_back({speaker.speaker_id, utt.utterance_id, name, w,
                         "supplementary"});
        }
        for (const auto& w : side->oov) {
          oov.push_back({speaker.speaker_id, utt.utterance_id, name, w, "missing"});
        }
      }
      p.skipped = p.expected.skipped || p.observed.skipped;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<std::string> MissingWords(const std::vector<OovEntry>& oov) {
  std::vector<std::string> words;
  for (const auto& e : oov) {
    if (e.resolution == "missing") words.push_back(e.word);
  }
  return words;
}

std::string OovReport(const std::vector<OovEntry>& oov) {
  std::string out = "speaker\tutterance\tside\tword\tresolution\n";
  for (const auto& e : oov) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", e.speaker_id, e.utterance_id,
                       e.side, e.word, e.resolution);
  }
  return out;
}

}  // namespace

std::vector<PhonemizedUtterance> Pipeline::Phonemize(
    const CorpusManifest& manifest) const {
  RequireLexicon();
  std::vector<OovEntry> oov;
  auto policy = MakePolicy(config_.oov_mode, supplementary_);
  auto utterances =
      PhonemizeAll(manifest, lexicon_, policy, config_.variant_rule, oov);
  Write("oov_report.tsv", OovReport(oov));
  auto missing = MissingWords(oov);
  if (config_.oov_mode != OovMode::kSkipUtterance && !missing.empty()) {
    throw OovError(missing);
  }
  for (const auto& u : utterances) {
    std::string body;
    if (u.skipped) {
      body = "skipped\toov\n";
    } else {
      body = fmt::format("expected\t{}\nobserved\t{}\n",
                         JoinLabels(*inventory_, u.expected.phones),
                         JoinLabels(*inventory_, u.observed.phones));
      if (config_.variant_rule == VariantRule::kAll) {
        for (std::size_t w = 0; w < u.expected.lattice.size(); ++w) {
          std::string alts;
          for (const auto& v : u.expected.lattice[w]) {
            if (!alts.empty()) alts += " | ";
            alts += JoinLabels(*inventory_, v.phones);
          }
          body += fmt::format("word{}\t{}\n", w, alts);
        }
      }
    }
    Write(fs::path("phonemes") / u.speaker_id / (u.utterance_id + ".txt"), body);
  }
  return utterances;
}

AlignSummary Pipeline::Align(const CorpusManifest& manifest) const {
  RequireLexicon();
  std::vector<OovEntry> oov;
  auto policy = MakePolicy(config_.oov_mode, supplementary_);
  auto utterances =
      PhonemizeAll(manifest, lexicon_, policy, config_.variant_rule, oov);
  Write("oov_report.tsv", OovReport(oov));
  auto missing = MissingWords(oov);
  if (config_.oov_mode != OovMode::kSkipUtterance && !missing.empty()) {
    throw OovError(missing);
  }

  // Alignment fans out across workers; everything after is sequential in
  // manifest order.
  std::vector<std::optional<Alignment>> results(utterances.size());
  std::vector<std::string> failures(utterances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < utterances.size(); i = next++) {
      const auto& u = utterances[i];
      if (u.skipped) continue;
      try {
        if (config_.variant_rule == VariantRule::kAll) {
          results[i] = AlignMinVariant(u.expected.lattice, u.observed.phones,
                                       costs_, config_.tie_break,
                                       config_.max_variant_combinations)
                           .alignment;
        } else {
          results[i] = phonerr::Align(u.expected.phones, u.observed.phones,
                                      costs_, config_.tie_break);
        }
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::size_t threads = std::min(config_.jobs, std::max<std::size_t>(1, utterances.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    if (!failures[i].empty()) {
      throw ValidationError(fmt::format("speaker {} utterance {}: {}",
                                        utterances[i].speaker_id,
                                        utterances[i].utterance_id, failures[i]));
    }
  }

  AlignSummary summary;
  std::size_t k = 0;
  for (const auto& speaker : manifest.speakers) {
    SpeakerProfile profile(inventory_, speaker.speaker_id, speaker.l1_label);
    for (std::size_t u = 0; u < speaker.utterances.size(); ++u, ++k) {
      if (!results[k]) {
        ++summary.utterances_skipped;
        continue;
      }
      const Alignment& a = *results[k];
      Accumulate(profile, a);
      summary.total_ops += a.ops.size();
      ++summary.utterances_aligned;
      Write(fs::path("alignments") / speaker.speaker_id /
                (speaker.utterances[u].utterance_id + ".tsv"),
            Render([&](std::ostream& o) { WriteAlignment(o, a, *inventory_); }));
    }
    Write(fs::path("profiles") / (speaker.speaker_id + ".csv"),
          Render([&](std::ostream& o) { WriteConfusionCsv(o, profile.matrix); }));
    Write(fs::path("profiles") / (speaker.speaker_id + ".json"),
          ProfileToJson(profile).dump(1) + "\n");
    summary.profiles.push_back(std::move(profile));
  }
  return summary;
}

ClusterSummary Pipeline::Cluster(const std::vector<SpeakerProfile>& profiles) const {
  if (profiles.empty()) throw ValidationError("no speaker profiles to cluster");
  std::vector<SpeakerVector> vectors;
  std::map<std::string, std::string> labels;
  bool all_labelled = true;
  for (const auto& p : profiles) {
    vectors.push_back(Vectorize(p.matrix, config_.normalization, p.speaker_id));
    if (p.l1_label.empty()) all_labelled = false;
    labels[p.speaker_id] = p.l1_label;
  }

  ClusterSummary summary;
  summary.clusters = KMeans(vectors, config_.kmeans);
  if (all_labelled) summary.purity = Purity(summary.clusters, labels);

  // Centroids share the embedding with the speakers.
  std::vector<std::vector<double>> points;
  for (const auto& v : vectors) points.push_back(v.values);
  for (const auto& c : summary.clusters.centroids) points.push_back(c);
  summary.tsne = RunTsne(points, config_.tsne);

  std::string clusters = "speaker_id,cluster\n";
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    clusters += fmt::format("{},{}\n", vectors[i].speaker_id,
                            summary.clusters.assignments[i]);
  }
  Write("clusters.csv", clusters);

  std::string embedding = "speaker_id,x,y,kind\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = summary.tsne.embedding[i];
    bool centroid = i >= vectors.size();
    std::string id = centroid ? fmt::format("centroid_{}", i - vectors.size())
                              : vectors[i].speaker_id;
    embedding += fmt::format("{},{},{},{}\n", id, FormatReal(p[0]),
                             FormatReal(p[1]), centroid ? "centroid" : "speaker");
  }
  Write("embedding.csv", embedding);

  nlohmann::json j = {
      {"k", config_.kmeans.k},
      {"seed", config_.kmeans.seed},
      {"normalization", NormalizationName(config_.normalization)},
      {"inertia", summary.clusters.inertia},
      {"iterations", summary.clusters.iterations},
      {"n_init", config_.kmeans.n_init},
      {"purity", summary.purity ? nlohmann::json(*summary.purity) : nlohmann::json()},
      {"tsne_initial_kl", summary.tsne.initial_kl},
      {"tsne_final_kl", summary.tsne.final_kl},
  };
  Write("cluster_summary.json", j.dump(1) + "\n");
  return summary;
}

AnnotationSet Pipeline::LoadAnnotations(const fs::path& path,
                                        const std::string& speaker_id,
                                        const std::string& utterance_id,
                                        std::vector<std::string>& skipped) const {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  try {
    if (ext == ".textgrid") {
      auto result = ParseTextGrid(ReadTextFile(path), config_.textgrid_tier,
                                  config_.label_convention, *inventory_, utterance_id);
      result.set.speaker_id = speaker_id;
      skipped.insert(skipped.end(), result.skipped_labels.begin(),
                     result.skipped_labels.end());
      return result.set;
    }
    std::ifstream in(path);
    return ParseAnnotationCsv(in, *inventory_, speaker_id);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<ComparisonTable> Pipeline::Compare(
    const CorpusManifest& manifest,
    const std::vector<SpeakerProfile>& profiles) const {
  std::map<std::string, const SpeakerProfile*> by_id;
  for (const auto& p : profiles) by_id[p.speaker_id] = &p;

  // Groups in order of first appearance.
  std::vector<std::string> groups;
  std::map<std::string, std::vector<const SpeakerEntry*>> members;
  for (const auto& s : manifest.speakers) {
    if (!members.count(s.l1_label)) groups.push_back(s.l1_label);
    members[s.l1_label].push_back(&s);
  }

  std::vector<ComparisonTable> tables;
  std::string skip_report = "speaker\tutterance\tlabel\n";
  for (const auto& group : groups) {
    ConfusionMatrix asr(inventory_);
    ConfusionMatrix ha(inventory_);
    bool has_ha = false;
    for (const SpeakerEntry* s : members[group]) {
      auto it = by_id.find(s->speaker_id);
      if (it == by_id.end()) {
        throw ValidationError(
            fmt::format("no ASR profile for speaker {}", s->speaker_id));
      }
      asr = Merge(asr, it->second->matrix);
      ConfusionMatrix speaker_ha(inventory_);
      bool speaker_has_ha = false;
      for (const auto& u : s->utterances) {
        if (!u.annotation) continue;
        std::vector<std::string> skipped;
        auto set = LoadAnnotations(*u.annotation, s->speaker_id, u.utterance_id, skipped);
        for (const auto& label : skipped) {
          skip_report += fmt::format("{}\t{}\t{}\n", s->speaker_id, u.utterance_id, label);
        }
        speaker_ha = Merge(speaker_ha, AnnotationsToConfusion(set, inventory_));
        speaker_has_ha = true;
      }
      if (speaker_has_ha) {
        ha = Merge(ha, speaker_ha);
        has_ha = true;
      }
      if (config_.per_speaker_comparison) {
        auto table = phonerr::Compare(it->second->matrix,
                                      speaker_has_ha ? &speaker_ha : nullptr,
                                      config_.selection, s->speaker_id);
        Write(fs::path("comparison") / "speakers" / (s->speaker_id + ".csv"),
              Render([&](std::ostream& o) { WriteComparisonCsv(o, table, *inventory_); }));
      }
    }
    auto table = phonerr::Compare(asr, has_ha ? &ha : nullptr, config_.selection,
                                  group.empty() ? "unlabelled" : group);
    const std::string stem = SafeFileStem(group);
    Write(fs::path("comparison") / (stem + ".csv"),
          Render([&](std::ostream& o) { WriteComparisonCsv(o, table, *inventory_); }));
    Write(fs::path("comparison") / (stem + ".txt"),
          Render([&](std::ostream& o) { WriteComparisonText(o, table, *inventory_); }));
    tables.push_back(std::move(table));
  }
  Write(fs::path("comparison") / "skipped_labels.tsv", skip_report);
  return tables;
}

void Pipeline::Heatmaps(const std::vector<SpeakerProfile>& profiles) const {
  for (const auto& p : profiles) {
    std::vector<double> values(p.matrix.counts().begin(), p.matrix.counts().end());
    Write(fs::path("heatmaps") / (p.speaker_id + ".svg"),
          RenderHeatmapSvg(values, *inventory_, HeatmapKind::kConfusion));
  }
}

void Pipeline::Run(const CorpusManifest& manifest) const {
  // Clustering settings that cannot work for this corpus are rejected before
  // any output is produced.
  const std::size_t speakers = manifest.speakers.size();
  if (speakers > 0) {
    const std::size_t k = config_.kmeans.k;
    if (k == 0 || k > speakers) {
      throw ValidationError(
          fmt::format("k = {} needs 1 <= k <= {} speakers", k, speakers));
    }
    const auto points = static_cast<double>(speakers + k);
    if (speakers + k < 3 || config_.tsne.perplexity <= 1.0 ||
        config_.tsne.perplexity >= points - 1.0) {
      throw ValidationError(fmt::format(
          "perplexity {} is infeasible for {} embedded points",
          config_.tsne.perplexity, speakers + k));
    }
  }
  Phonemize(manifest);
  auto summary = Align(manifest);
  Heatmaps(summary.profiles);
  if (!summary.profiles.empty()) Cluster(summary.profiles);
  Compare(manifest, summary.profiles);
}

std::vector<SpeakerProfile> Pipeline::LoadProfiles(const fs::path& dir) const {
  if (!fs::is_directory(dir)) {
    throw ValidationError(fmt::format("'{}' is not a directory", dir.string()));
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<SpeakerProfile> profiles;
  for (const auto& f : files) {
    try {
      profiles.push_back(
          ProfileFromJson(nlohmann::json::parse(ReadTextFile(f)), inventory_));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(fmt::format("{}: {}", f.string(), e.what()));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}: {}", f.string(), e.what()));
    }
  }
  return profiles;
}

}  // namespace phonerr
