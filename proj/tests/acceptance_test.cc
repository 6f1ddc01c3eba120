// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "phonerr/alignment.h"
#include "phonerr/annotations.h"
#include "phonerr/clustering.h"
#include "phonerr/confusion.h"
#include "phonerr/cost_matrix.h"
#include "phonerr/lexicon.h"
#include "phonerr/tsne.h"
#include "test_util.h"

namespace phonerr {
namespace {

namespace fs = std::filesystem;
using testing::Arpabet;
using testing::Id;
using testing::Phones;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      detail = what;
    }
  }
};

struct Criterion {
  int number;
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

PhoneId Eps() { return Arpabet()->epsilon(); }

Outcome HisEase() {
  Outcome o;
  auto exp = Phones("HH IH Z"), obs = Phones("IY Z");
  const std::vector<EditOp> want = {
      {EditKind::kDelete, Id("HH"), Eps(), 0},
      {EditKind::kSubstitute, Id("IH"), Id("IY"), 0},
      {EditKind::kMatch, Id("Z"), Id("Z"), 0}};
  auto same_shape = [&](const Alignment& a) {
    if (a.ops.size() != want.size()) return false;
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (a.ops[i].kind != want[i].kind || a.ops[i].expected != want[i].expected ||
          a.ops[i].observed != want[i].observed) {
        return false;
      }
    }
    return true;
  };
  // Random matrices that satisfy the constraint, plus the bundled one.
  Rng rng(2024);
  int checked = 0;
  while (checked < 200) {
    CostMatrix m = testing::RandomCostMatrix(rng);
    if (!(m(Id("HH"), Eps()) + m(Id("IH"), Id("IY")) <
          m(Id("HH"), Id("IY")) + m(Id("IH"), Eps()))) {
      continue;
    }
    // The pair must also beat scripts that avoid both of these ops.
    if (AlignBruteforce(exp, obs, m) !=
        m(Id("HH"), Eps()) + m(Id("IH"), Id("IY"))) {
      continue;
    }
    ++checked;
    o.Require(same_shape(Align(exp, obs, m)), "random constrained matrix");
  }
  std::ifstream in(testing::DataPath("costs.csv"));
  o.Require(same_shape(Align(exp, obs, ParseCostMatrix(in, Arpabet()))),
            "bundled cost matrix");
  CostMatrix uniform = CostMatrix::Uniform(Arpabet());
  o.Require(AlignBruteforce(exp, obs, uniform) == 2.0, "uniform minimum != 2");
  o.Require(OptimalScriptsBruteforce(exp, obs, uniform).size() == 2,
            "uniform optimal script count != 2");
  if (o.pass) {
    o.detail = fmt::format("{} constrained matrices + bundled; uniform: 2 scripts of cost 2",
                           checked);
  }
  return o;
}

Outcome OracleEquivalence() {
  Outcome o;
  Rng rng(7);
  const auto alphabet = Phones("AA HH IH IY S Z");
  int n = 0;
  for (int m = 0; m < 100; ++m) {
    CostMatrix costs = testing::RandomCostMatrix(rng);
    for (int k = 0; k < 20; ++k, ++n) {
      auto a = testing::RandomSequence(rng, alphabet, 5);
      auto b = testing::RandomSequence(rng, alphabet, 5);
      o.Require(Align(a, b, costs).total_cost == AlignBruteforce(a, b, costs),
                fmt::format("instance {}", n));
    }
  }
  if (o.pass) o.detail = fmt::format("{} instances, exact equality", n);
  return o;
}

Outcome LevenshteinReduction() {
  Outcome o;
  Rng rng(8);
  const auto alphabet = Phones("AA B CH D EH F");
  CostMatrix uniform = CostMatrix::Uniform(Arpabet());
  const int n = 2000;
  for (int k = 0; k < n; ++k) {
    auto a = testing::RandomSequence(rng, alphabet, 10);
    auto b = testing::RandomSequence(rng, alphabet, 10);
    o.Require(Align(a, b, uniform).total_cost ==
                  static_cast<double>(testing::PlainLevenshtein(a, b)),
              fmt::format("pair {}", k));
  }
  if (o.pass) o.detail = fmt::format("{} pairs, exact equality", n);
  return o;
}

Outcome MetricIdentities() {
  Outcome o;
  Rng rng(9);
  const auto alphabet = Phones("AA HH IH IY S Z TH DH T D");
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    CostMatrix costs = testing::RandomCostMatrix(rng);
    ConfusionMatrix m(Arpabet());
    std::vector<Count> occurrences(40, 0);
    for (int u = 0; u < 30; ++u) {
      auto exp = testing::RandomSequence(rng, alphabet, 8);
      auto obs = testing::RandomSequence(rng, alphabet, 8);
      for (PhoneId p : exp) ++occurrences[p];
      Accumulate(m, Align(exp, obs, costs));
    }
    for (PhoneId p = 0; p < 39; ++p) {
      o.Require(m.RowTotal(p) == occurrences[p],
                fmt::format("matrix {} row {} not conserved", trial, p));
      if (m.RowTotal(p) == 0) continue;
      auto stats = ComputePhonemeStats(m, p);
      double sum = stats.recognition_rate.value();
      for (const auto& s : stats.substitutes) sum += s.rate.value();
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  o.Require(worst <= 1e-9, fmt::format("max |sum - 1| = {}", worst));
  if (o.pass) o.detail = fmt::format("100 matrices, max |sum - 1| = {:.3g}", worst);
  return o;
}

Outcome ArabicThRow() {
  Outcome o;
  ConfusionMatrix asr(Arpabet());
  asr.Add(Id("TH"), Id("TH"), 792);
  asr.Add(Id("TH"), Id("S"), 75);
  asr.Add(Id("TH"), Id("T"), 40);
  asr.Add(Id("TH"), Eps(), 93);
  AnnotationSet ha_set{"arabic", {}};
  auto add = [&](std::string_view obs, AnnotationKind kind, int n) {
    for (int i = 0; i < n; ++i) {
      ha_set.records.push_back({"u", ha_set.records.size(), Id("TH"),
                                obs.empty() ? Eps() : Id(obs), kind});
    }
  };
  add("TH", AnnotationKind::kCorrect, 810);
  add("S", AnnotationKind::kSubstitution, 131);
  add("T", AnnotationKind::kSubstitution, 30);
  add("", AnnotationKind::kDeletion, 29);
  ConfusionMatrix ha = AnnotationsToConfusion(ha_set, Arpabet());
  TargetSelection sel;
  sel.targets = {Id("TH")};
  std::ostringstream csv;
  WriteComparisonCsv(csv, Compare(asr, &ha, sel, "Arabic"), *Arpabet());
  const std::string want = "Arabic,TH,79.2%,81.0%,S,S,7.5%,13.1%";
  o.Require(csv.str().find(want + "\n") != std::string::npos, csv.str());
  if (o.pass) o.detail = want;
  return o;
}

Outcome ClusteringRecovery() {
  Outcome o;
  auto fixture = testing::MakeSpeakerFixture(606);
  // Measured noise relative to template separation.
  double max_noise = 0.0;
  for (std::size_t g = 0; g < 6; ++g) {
    std::vector<double> mean(fixture.vectors[0].values.size(), 0.0);
    for (std::size_t s = 0; s < 4; ++s) {
      for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i] += fixture.vectors[g * 4 + s].values[i] / 4.0;
      }
    }
    for (std::size_t s = 0; s < 4; ++s) {
      max_noise = std::max(
          max_noise, std::sqrt(SquaredDistance(fixture.vectors[g * 4 + s].values, mean)));
    }
  }
  int perfect = 0, runs = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    KMeansOptions opt;
    opt.k = 6;
    opt.seed = seed;
    opt.init = KMeansInit::kPlusPlus;
    auto r = KMeans(fixture.vectors, opt);
    for (const auto& h : r.run_inertia_histories) {
      ++runs;
      for (std::size_t i = 1; i < h.size(); ++i) {
        o.Require(h[i] <= h[i - 1],
                  fmt::format("seed {} inertia rose at iteration {}", seed, i));
      }
    }
    if (Purity(r, fixture.labels) == 1.0) ++perfect;
  }
  o.Require(perfect >= 9, fmt::format("purity 1.0 for only {}/10 seeds", perfect));
  if (o.pass) {
    o.detail = fmt::format(
        "purity 1.0 for {}/10 seeds; inertia monotone in all {} runs; noise RMS "
        "0.1 x min template distance (max speaker offset {:.3f} x)",
        perfect, runs, max_noise / fixture.min_template_distance);
  }
  return o;
}

Outcome TsneProperties() {
  Outcome o;
  auto fixture = testing::MakeSpeakerFixture(606);
  std::vector<std::vector<double>> pts;
  for (const auto& v : fixture.vectors) pts.push_back(v.values);
  TsneOptions base;
  Affinities p = ComputeAffinities(pts, base.perplexity);
  double sum = 0.0, worst_entropy = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    for (std::size_t j = 0; j < p.n; ++j) {
      o.Require(p.joint[i * p.n + j] >= 0.0, "negative affinity");
      o.Require(p.joint[i * p.n + j] == p.joint[j * p.n + i], "asymmetric affinity");
      sum += p.joint[i * p.n + j];
    }
    worst_entropy =
        std::max(worst_entropy, std::abs(p.entropy_bits[i] - std::log2(base.perplexity)));
  }
  o.Require(std::abs(sum - 1.0) <= 1e-9, fmt::format("affinity sum {}", sum));
  o.Require(worst_entropy <= 1e-5, fmt::format("entropy error {}", worst_entropy));
  int kl_ok = 0, separated = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TsneOptions opt;
    opt.seed = seed;
    auto r = RunTsne(pts, opt);
    if (r.final_kl < r.initial_kl) ++kl_ok;
    double inter = 0.0, intra = 0.0;
    int n_inter = 0, n_intra = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double d = std::hypot(r.embedding[i][0] - r.embedding[j][0],
                              r.embedding[i][1] - r.embedding[j][1]);
        bool same = fixture.labels[fixture.vectors[i].speaker_id] ==
                    fixture.labels[fixture.vectors[j].speaker_id];
        (same ? intra : inter) += d;
        ++(same ? n_intra : n_inter);
      }
    }
    if (inter / n_inter > intra / n_intra) ++separated;
  }
  o.Require(kl_ok == 5, fmt::format("KL decreased for {}/5 seeds", kl_ok));
  o.Require(separated == 5, fmt::format("inter > intra for {}/5 seeds", separated));
  if (o.pass) {
    o.detail = fmt::format(
        "|sum-1| {:.2g}, entropy error {:.2g}, KL down 5/5, inter > intra 5/5",
        std::abs(sum - 1.0), worst_entropy);
  }
  return o;
}

std::map<std::string, std::string> Tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[fs::relative(e.path(), root).string()] = testing::Slurp(e.path());
    }
  }
  return out;
}

Outcome EndToEndDeterminism() {
  Outcome o;
  testing::TempDir dir;
  std::size_t files = 0;
  for (const char* name : {"a", "b"}) {
    std::string cmd = fmt::format(
        "\"{}\" run --manifest {} --lexicon {} --supplementary-lexicon {} "
        "--oov-policy supplementary --cost-matrix {} --k 3 --seed 11 "
        "--min-occurrences 1 --jobs 2 --out-dir {} > {} 2>&1",
        PHONERR_CLI, testing::DataPath("example/manifest.json"),
        testing::DataPath("lexicon.dict"), testing::DataPath("supplementary.dict"),
        testing::DataPath("costs.csv"), (dir.path() / name).string(),
        (dir.path() / "log").string());
    int status = std::system(cmd.c_str());
    o.Require(WIFEXITED(status) && WEXITSTATUS(status) == 0,
              "run failed: " + testing::Slurp(dir.path() / "log"));
    if (!o.pass) return o;
  }
  auto a = Tree(dir.path() / "a"), b = Tree(dir.path() / "b");
  files = a.size();
  o.Require(files > 0, "empty output tree");
  o.Require(a == b, "output trees differ");
  if (o.pass) o.detail = fmt::format("{} files byte-identical", files);
  return o;
}

std::string RandomWord(Rng& rng) {
  static const std::string letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string w(1 + rng.Index(8), 'A');
  for (char& c : w) c = letters[rng.Index(letters.size())];
  if (w.size() > 2 && rng.Uniform() < 0.2) w[1 + rng.Index(w.size() - 2)] = '\'';
  return w;
}

std::vector<PhoneId> RandomPhones(Rng& rng, std::size_t max_len) {
  std::vector<PhoneId> p(1 + rng.Index(max_len));
  for (auto& x : p) x = static_cast<PhoneId>(rng.Index(39));
  return p;
}

Outcome FormatRoundTrips() {
  Outcome o;
  Rng rng(99);
  auto inv = Arpabet();
  const int n = 150;
  for (int t = 0; t < n; ++t) {
    Lexicon lex(inv);
    const std::size_t words = rng.Index(30);
    for (std::size_t w = 0; w < words; ++w) {
      std::string word = RandomWord(rng);
      const std::size_t variants = 1 + rng.Index(3);
      for (std::size_t v = 0; v < variants; ++v) {
        lex.Add(word, {RandomPhones(rng, 10)});
      }
    }
    std::ostringstream first;
    WriteLexicon(first, lex);
    Lexicon once = ParseLexicon(first.str(), inv);
    std::ostringstream second;
    WriteLexicon(second, once);
    o.Require(once == lex && ParseLexicon(second.str(), inv) == once,
              fmt::format("lexicon instance {}", t));
  }
  for (int t = 0; t < n; ++t) {
    AnnotationSet set{"spk", {}};
    const std::size_t utts = 1 + rng.Index(4);
    for (std::size_t u = 0; u < utts; ++u) {
      std::size_t position = 0;
      const std::size_t records = rng.Index(20);
      for (std::size_t r = 0; r < records; ++r) {
        position += rng.Index(2);
        PhoneId a = static_cast<PhoneId>(rng.Index(39));
        PhoneId b = static_cast<PhoneId>((a + 1 + rng.Index(38)) % 39);
        AnnotationRecord rec{fmt::format("utt_{}", u), position, a, a,
                             AnnotationKind::kCorrect};
        switch (rng.Index(4)) {
          case 1: rec.observed = b; rec.kind = AnnotationKind::kSubstitution; break;
          case 2: rec.observed = Eps(); rec.kind = AnnotationKind::kDeletion; break;
          case 3:
            rec.target = Eps();
            rec.kind = AnnotationKind::kInsertion;
            break;
          default: break;
        }
        set.records.push_back(rec);
      }
    }
    std::ostringstream first;
    WriteAnnotationCsv(first, set, *inv);
    std::istringstream in1(first.str());
    AnnotationSet once = ParseAnnotationCsv(in1, *inv, "spk");
    std::ostringstream second;
    WriteAnnotationCsv(second, once, *inv);
    std::istringstream in2(second.str());
    o.Require(once == set && ParseAnnotationCsv(in2, *inv, "spk") == once,
              fmt::format("annotation instance {}", t));
  }
  for (int t = 0; t < n; ++t) {
    ConfusionMatrix m(inv);
    const std::size_t cells = rng.Index(200);
    for (std::size_t c = 0; c < cells; ++c) {
      PhoneId r = static_cast<PhoneId>(rng.Index(40));
      PhoneId col = static_cast<PhoneId>(rng.Index(r == Eps() ? 39 : 40));
      m.Add(r, col, rng.Uniform() < 0.05 ? (Count{1} << 62) : 1 + rng.Index(1000));
    }
    std::ostringstream first;
    WriteConfusionCsv(first, m);
    std::istringstream in1(first.str());
    ConfusionMatrix once = ParseConfusionCsv(in1, inv);
    std::ostringstream second;
    WriteConfusionCsv(second, once);
    std::istringstream in2(second.str());
    o.Require(once == m && ParseConfusionCsv(in2, inv) == once,
              fmt::format("confusion instance {}", t));
  }
  if (o.pass) o.detail = fmt::format("{} instances per format", n);
  return o;
}

}  // namespace
}  // namespace phonerr

int main() {
  using namespace phonerr;
  const std::vector<Criterion> criteria = {
      {1, "his/ease disambiguation", 1.0, HisEase},
      {2, "DP vs brute-force oracle", 30.0, OracleEquivalence},
      {3, "uniform costs reduce to Levenshtein", 10.0, LevenshteinReduction},
      {4, "metric identities and row conservation", 0.0, MetricIdentities},
      {5, "Arabic /TH/ comparison row", 1.0, ArabicThRow},
      {6, "k-means recovers synthetic groups", 10.0, ClusteringRecovery},
      {7, "t-SNE properties", 60.0, TsneProperties},
      {8, "end-to-end determinism", 30.0, EndToEndDeterminism},
      {9, "format round-trips", 0.0, FormatRoundTrips},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    if (o.pass && c.time_limit_s > 0.0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail = fmt::format("took {:.2f}s, limit {:.0f}s", secs, c.time_limit_s);
    }
    failed += !o.pass;
    std::string limit =
        c.time_limit_s > 0.0 ? fmt::format(" < {:.0f}s", c.time_limit_s) : "";
    fmt::print("AC{} {} [{:.2f}s{}] {}: {}\n", c.number, o.pass ? "PASS" : "FAIL",
               secs, limit, c.name, o.detail);
    std::fflush(stdout);
  }
  return failed;
}
