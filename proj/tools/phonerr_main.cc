// phonerr: phoneme-level analysis of ASR transcripts.
//
// Exit codes: 0 success, 1 internal error, 2 input/validation error,
// 3 out-of-vocabulary failure.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "phonerr/csv_grid.h"
#include "phonerr/error.h"
#include "phonerr/heatmap.h"
#include "phonerr/manifest.h"
#include "phonerr/pipeline.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitOov = 3;

struct CliOptions {
  phonerr::RunConfig config;
  std::string manifest;
  std::string profiles_dir;
  std::string oov_policy = "fail";
  std::string variant_rule = "first";
  std::string tie_break = "diag,del,ins";
  std::string kmeans_init = "kmeanspp";
  std::string normalization = "raw_counts";
  // heatmap
  std::string matrix;
  std::string svg_out;
  std::string heatmap_kind = "confusion";
};

void AddResourceOptions(CLI::App* cmd, CliOptions& o) {
  auto& c = o.config;
  cmd->add_option("--lexicon", c.lexicon_path, "Pronouncing dictionary");
  cmd->add_option("--supplementary-lexicon", c.supplementary_lexicon_path,
                  "Second dictionary for --oov-policy supplementary");
  cmd->add_option("--cost-matrix", c.cost_matrix_path,
                  "Cost-matrix CSV (default: uniform weights)");
  cmd->add_option("--inventory", c.inventory_path,
                  "Inventory file overriding the built-in ARPAbet set");
  cmd->add_option("--oov-policy", o.oov_policy)
      ->check(CLI::IsMember({"fail", "skip", "supplementary"}));
  cmd->add_option("--variant-rule", o.variant_rule)
      ->check(CLI::IsMember({"first", "all"}));
  cmd->add_option("--tie-break", o.tie_break,
                  "Backtrace preference, a permutation of diag,del,ins");
  cmd->add_option("--max-variant-combinations", c.max_variant_combinations);
  cmd->add_option("--jobs", c.jobs, "Alignment worker threads");
  cmd->add_option("--out-dir", c.out_dir)->capture_default_str();
}

void AddClusterOptions(CLI::App* cmd, CliOptions& o) {
  auto& c = o.config;
  cmd->add_option("--k", c.kmeans.k)->capture_default_str();
  cmd->add_option("--seed", c.kmeans.seed)->capture_default_str();
  cmd->add_option("--kmeans-init", o.kmeans_init)
      ->check(CLI::IsMember({"kmeanspp", "forgy"}));
  cmd->add_option("--max-iter", c.kmeans.max_iter)->capture_default_str();
  cmd->add_option("--rel-tol", c.kmeans.rel_tol)->capture_default_str();
  cmd->add_option("--n-init", c.kmeans.n_init)
      ->capture_default_str();
  cmd->add_option("--normalization", o.normalization)
      ->check(CLI::IsMember({"raw_counts", "row_frequency"}));
  cmd->add_option("--perplexity", c.tsne.perplexity)->capture_default_str();
  cmd->add_option("--learning-rate", c.tsne.learning_rate)->capture_default_str();
  cmd->add_option("--tsne-iterations", c.tsne.iterations)->capture_default_str();
  cmd->add_option("--early-exaggeration", c.tsne.early_exaggeration)
      ->capture_default_str();
}

void AddCompareOptions(CLI::App* cmd, CliOptions& o) {
  auto& c = o.config;
  cmd->add_option("--textgrid-tier", c.textgrid_tier)->capture_default_str();
  cmd->add_option("--top-k", c.selection.top_k)->capture_default_str();
  cmd->add_option("--min-occurrences", c.selection.min_occurrences)
      ->capture_default_str();
  cmd->add_option("--targets", c.target_labels, "Explicit target phonemes");
  cmd->add_flag("--per-speaker", c.per_speaker_comparison,
                "Also write one table per speaker");
}

// Converts the string-valued flags into the typed config.
phonerr::RunConfig Finish(CliOptions& o) {
  auto& c = o.config;
  static const std::map<std::string, phonerr::OovMode> kModes = {
      {"fail", phonerr::OovMode::kFail},
      {"skip", phonerr::OovMode::kSkipUtterance},
      {"supplementary", phonerr::OovMode::kSupplementaryLexicon}};
  c.oov_mode = kModes.at(o.oov_policy);
  c.variant_rule = o.variant_rule == "all" ? phonerr::VariantRule::kAll
                                           : phonerr::VariantRule::kFirst;
  c.tie_break = phonerr::TieBreak::Parse(o.tie_break);
  c.kmeans.init = o.kmeans_init == "forgy" ? phonerr::KMeansInit::kForgy
                                           : phonerr::KMeansInit::kPlusPlus;
  c.tsne.seed = c.kmeans.seed;
  c.normalization = phonerr::ParseNormalization(o.normalization);
  return c;
}

int Dispatch(CLI::App& app, CliOptions& o) {
  auto config = Finish(o);
  if (app.got_subcommand("heatmap")) {
    phonerr::Pipeline pipeline(config);
    std::ifstream in(o.matrix);
    if (!in) throw phonerr::ValidationError(fmt::format("cannot read '{}'", o.matrix));
    auto values = phonerr::ParseLabelledGrid(in, *pipeline.inventory());
    phonerr::WriteTextFile(
        o.svg_out,
        phonerr::RenderHeatmapSvg(values, *pipeline.inventory(),
                                  phonerr::ParseHeatmapKind(o.heatmap_kind)));
    return kExitOk;
  }

  phonerr::Pipeline pipeline(config);
  if (app.got_subcommand("cluster")) {
    auto summary = pipeline.Cluster(pipeline.LoadProfiles(o.profiles_dir));
    if (summary.purity) std::cout << fmt::format("purity {:.4f}\n", *summary.purity);
    std::cout << fmt::format("inertia {} after {} iterations\n",
                             phonerr::FormatReal(summary.clusters.inertia),
                             summary.clusters.iterations);
    return kExitOk;
  }

  auto manifest = phonerr::LoadManifest(o.manifest);
  if (app.got_subcommand("phonemize")) {
    pipeline.Phonemize(manifest);
  } else if (app.got_subcommand("align")) {
    auto summary = pipeline.Align(manifest);
    std::cout << fmt::format("{} utterances aligned, {} skipped, {} edit ops\n",
                             summary.utterances_aligned, summary.utterances_skipped,
                             summary.total_ops);
  } else if (app.got_subcommand("compare")) {
    auto profiles = o.profiles_dir.empty() ? pipeline.Align(manifest).profiles
                                           : pipeline.LoadProfiles(o.profiles_dir);
    for (const auto& table : pipeline.Compare(manifest, profiles)) {
      phonerr::WriteComparisonText(std::cout, table, *pipeline.inventory());
    }
  } else if (app.got_subcommand("run")) {
    pipeline.Run(manifest);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phoneme-level error analysis of ASR transcripts"};
  app.require_subcommand(1);
  CliOptions o;

  auto* phonemize = app.add_subcommand("phonemize", "Convert texts to phoneme sequences");
  auto* align = app.add_subcommand("align", "Align utterances, build speaker profiles");
  auto* cluster = app.add_subcommand("cluster", "Cluster and embed speaker profiles");
  auto* compare = app.add_subcommand("compare", "Compare ASR and annotator rates per L1");
  auto* heatmap = app.add_subcommand("heatmap", "Render a matrix CSV as an SVG heatmap");
  auto* run = app.add_subcommand("run", "Full pipeline");

  for (auto* cmd : {phonemize, align, compare, run}) {
    cmd->add_option("--manifest", o.manifest, "Corpus manifest JSON")->required();
    AddResourceOptions(cmd, o);
  }
  for (auto* cmd : {compare, run}) AddCompareOptions(cmd, o);
  compare->add_option("--profiles-dir", o.profiles_dir,
                      "Precomputed ASR profiles (default: align now)");
  for (auto* cmd : {cluster, run}) AddClusterOptions(cmd, o);
  cluster->add_option("--profiles-dir", o.profiles_dir, "Directory of profile JSON")
      ->required();
  cluster->add_option("--out-dir", o.config.out_dir)->capture_default_str();
  cluster->add_option("--inventory", o.config.inventory_path);
  heatmap->add_option("--matrix", o.matrix, "Matrix CSV")->required();
  heatmap->add_option("--out", o.svg_out, "SVG output path")->required();
  heatmap->add_option("--kind", o.heatmap_kind)
      ->check(CLI::IsMember({"confusion", "cost"}));
  heatmap->add_option("--inventory", o.config.inventory_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    return Dispatch(app, o);
  } catch (const phonerr::OovError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOov;
  } catch (const phonerr::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const phonerr::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const phonerr::UndefinedRateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
