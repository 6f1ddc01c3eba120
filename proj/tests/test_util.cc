#include "test_util.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace phonerr::testing {

namespace fs = std::filesystem;

InventoryPtr Arpabet() { return PhonemeInventory::Arpabet(); }

PhoneId Id(std::string_view label) { return Arpabet()->Require(label); }

std::vector<PhoneId> Phones(std::string_view labels) {
  std::vector<PhoneId> out;
  std::istringstream in{std::string(labels)};
  std::string label;
  while (in >> label) out.push_back(Id(label));
  return out;
}

std::string DataPath(std::string_view relative) {
  return (fs::path(PHONERR_DATA_DIR) / relative).string();
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TempDir::TempDir() {
  static int counter = 0;
  Rng rng(static_cast<std::uint64_t>(std::hash<std::string>{}(
      fmt::format("{}-{}", static_cast<const void*>(this), counter++))));
  path_ = fs::temp_directory_path() /
          fmt::format("phonerr-test-{:016x}", rng.Index(SIZE_MAX));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

CostMatrix RandomCostMatrix(Rng& rng) {
  auto inv = Arpabet();
  const std::size_t n = inv->size();
  const bool quantized = rng.Uniform() < 0.5;
  std::vector<double> costs(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (r == c) continue;
      costs[r * n + c] = quantized ? 0.25 * static_cast<double>(rng.Index(9))
                                   : 2.0 * rng.Uniform();
    }
  }
  return CostMatrix(inv, std::move(costs));
}

std::vector<PhoneId> RandomSequence(Rng& rng, const std::vector<PhoneId>& alphabet,
                                    std::size_t max_len) {
  std::vector<PhoneId> seq(rng.Index(max_len + 1));
  for (auto& p : seq) p = alphabet[rng.Index(alphabet.size())];
  return seq;
}

std::size_t PlainLevenshtein(const std::vector<PhoneId>& a,
                             const std::vector<PhoneId>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

SpeakerFixture MakeSpeakerFixture(std::uint64_t seed, double noise_ratio,
                                  std::size_t groups, std::size_t per_group) {
  const std::size_t dim = kInventorySize * kInventorySize;
  Rng rng(seed);
  std::vector<std::vector<double>> templates(groups, std::vector<double>(dim));
  for (auto& t : templates) {
    for (double& x : t) x = 10.0 * rng.Uniform();
  }
  SpeakerFixture fixture;
  fixture.min_template_distance = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < groups; ++a) {
    for (std::size_t b = a + 1; b < groups; ++b) {
      fixture.min_template_distance =
          std::min(fixture.min_template_distance,
                   std::sqrt(SquaredDistance(templates[a], templates[b])));
    }
  }
  const double sigma = noise_ratio * fixture.min_template_distance /
                       std::sqrt(static_cast<double>(dim));
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t s = 0; s < per_group; ++s) {
      SpeakerVector v;
      v.speaker_id = fmt::format("g{}s{}", g, s);
      v.values = templates[g];
      for (double& x : v.values) x += sigma * rng.Normal();
      fixture.labels[v.speaker_id] = fmt::format("L1_{}", g);
      fixture.vectors.push_back(std::move(v));
    }
  }
  return fixture;
}

std::vector<SpeakerProfile> MakeProfileFixture(std::uint64_t seed,
                                               std::size_t groups,
                                               std::size_t per_group) {
  auto inv = Arpabet();
  const std::size_t n = inv->size();
  const auto eps = static_cast<std::size_t>(inv->epsilon());
  Rng rng(seed);
  std::vector<std::vector<Count>> templates(groups, std::vector<Count>(n * n));
  for (auto& t : templates) {
    for (std::size_t i = 0; i < n * n; ++i) {
      t[i] = i == eps * n + eps ? 0 : static_cast<Count>(rng.Index(200));
    }
  }
  std::vector<SpeakerProfile> profiles;
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t s = 0; s < per_group; ++s) {
      std::vector<Count> counts = templates[g];
      for (std::size_t i = 0; i < n * n; ++i) {
        if (i == eps * n + eps) continue;
        Count jitter = rng.Index(5);
        counts[i] += jitter;
      }
      SpeakerProfile p(inv, fmt::format("g{}s{}", g, s), fmt::format("L1_{}", g));
      p.matrix = ConfusionMatrix(inv, std::move(counts));
      p.utterance_count = 50;
      profiles.push_back(std::move(p));
    }
  }
  return profiles;
}

}  // namespace phonerr::testing
