#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "phonerr/clustering.h"
#include "phonerr/error.h"
#include "test_util.h"

namespace phonerr {
namespace {

using testing::Arpabet;
using testing::Id;

void ExpectNonIncreasing(const ClusterResult& r) {
  ASSERT_FALSE(r.run_inertia_histories.empty());
  for (const auto& h : r.run_inertia_histories) {
    for (std::size_t i = 1; i < h.size(); ++i) {
      EXPECT_LE(h[i], h[i - 1]) << "iteration " << i;
    }
  }
}

TEST(VectorizeTest, ZeroMatrix) {
  auto v = Vectorize(ConfusionMatrix(Arpabet()));
  ASSERT_EQ(v.values.size(), 1600u);
  for (double x : v.values) EXPECT_EQ(x, 0.0);
}

TEST(VectorizeTest, RowMajorIndexing) {
  ConfusionMatrix m(Arpabet());
  m.Add(0, 1, 5);
  auto v = Vectorize(m, Normalization::kRawCounts, "s");
  EXPECT_EQ(v.values[1], 5.0);
  EXPECT_EQ(v.speaker_id, "s");
}

TEST(VectorizeTest, RowFrequencySumsToOneOrZero) {
  auto profiles = testing::MakeProfileFixture(4, 1, 1);
  ConfusionMatrix m = profiles[0].matrix;
  ConfusionMatrix sparse(Arpabet());
  sparse.Add(Id("TH"), Id("S"), 3);
  sparse.Add(Id("TH"), Id("TH"), 1);
  for (const auto* mat : {&m, &sparse}) {
    auto v = Vectorize(*mat, Normalization::kRowFrequency);
    for (std::size_t r = 0; r < 40; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < 40; ++c) sum += v.values[r * 40 + c];
      const bool empty = mat->RowTotal(static_cast<PhoneId>(r)) == 0;
      EXPECT_NEAR(sum, empty ? 0.0 : 1.0, 1e-12);
    }
  }
  auto v = Vectorize(sparse, Normalization::kRowFrequency);
  EXPECT_EQ(v.values[Id("TH") * 40 + Id("S")], 0.75);
}

TEST(NormalizationTest, ParseNames) {
  EXPECT_EQ(ParseNormalization("raw_counts"), Normalization::kRawCounts);
  EXPECT_EQ(ParseNormalization("row_frequency"), Normalization::kRowFrequency);
  EXPECT_THROW(ParseNormalization("zscore"), ValidationError);
}

std::vector<SpeakerVector> Points(const std::vector<std::vector<double>>& xs) {
  std::vector<SpeakerVector> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.push_back({"p" + std::to_string(i), xs[i], Normalization::kRawCounts});
  }
  return out;
}

TEST(KMeansTest, SingleClusterIsMean) {
  auto pts = Points({{0, 0}, {2, 0}, {4, 6}});
  KMeansOptions opt;
  opt.k = 1;
  auto r = KMeans(pts, opt);
  ASSERT_EQ(r.centroids.size(), 1u);
  EXPECT_DOUBLE_EQ(r.centroids[0][0], 2.0);
  EXPECT_DOUBLE_EQ(r.centroids[0][1], 2.0);
  // (4+4) + (0+4) + (4+16)
  EXPECT_DOUBLE_EQ(r.inertia, 32.0);
}

TEST(KMeansTest, TwoPointsTwoClusters) {
  auto pts = Points({{0, 0}, {3, 4}});
  for (auto init : {KMeansInit::kPlusPlus, KMeansInit::kForgy}) {
    KMeansOptions opt;
    opt.k = 2;
    opt.init = init;
    auto r = KMeans(pts, opt);
    EXPECT_EQ(r.inertia, 0.0);
    EXPECT_NE(r.assignments[0], r.assignments[1]);
  }
}

TEST(KMeansTest, InvalidK) {
  auto pts = Points({{0, 0}, {3, 4}});
  KMeansOptions opt;
  opt.k = 3;
  EXPECT_THROW(KMeans(pts, opt), ValidationError);
  opt.k = 0;
  EXPECT_THROW(KMeans(pts, opt), ValidationError);
}

TEST(KMeansTest, RecoversSyntheticGroups) {
  int perfect = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto fixture = testing::MakeSpeakerFixture(1000 + seed);
    KMeansOptions opt;
    opt.seed = seed;
    auto r = KMeans(fixture.vectors, opt);
    ExpectNonIncreasing(r);
    if (Purity(r, fixture.labels) == 1.0) ++perfect;
  }
  EXPECT_GE(perfect, 9);
}

TEST(KMeansTest, FixpointAssignsNearestCentroid) {
  auto fixture = testing::MakeSpeakerFixture(77, 0.5);
  for (auto init : {KMeansInit::kPlusPlus, KMeansInit::kForgy}) {
    KMeansOptions opt;
    opt.init = init;
    opt.seed = 3;
    opt.rel_tol = 0.0;
    auto r = KMeans(fixture.vectors, opt);
    ExpectNonIncreasing(r);
    for (std::size_t i = 0; i < fixture.vectors.size(); ++i) {
      const auto& x = fixture.vectors[i].values;
      double best = SquaredDistance(x, r.centroids[r.assignments[i]]);
      for (const auto& c : r.centroids) EXPECT_LE(best, SquaredDistance(x, c));
    }
  }
}

TEST(KMeansTest, RestartsKeepLowestInertia) {
  auto fixture = testing::MakeSpeakerFixture(606);
  KMeansOptions opt;
  opt.seed = 3;
  opt.n_init = 10;
  auto r = KMeans(fixture.vectors, opt);
  ASSERT_EQ(r.run_inertia_histories.size(), 10u);
  for (const auto& h : r.run_inertia_histories) EXPECT_LE(r.inertia, h.back());
  opt.n_init = 0;
  EXPECT_THROW(KMeans(fixture.vectors, opt), ValidationError);
}

TEST(KMeansTest, DeterministicGivenSeed) {
  auto fixture = testing::MakeSpeakerFixture(5, 1.0);
  KMeansOptions opt;
  opt.seed = 42;
  auto a = KMeans(fixture.vectors, opt);
  auto b = KMeans(fixture.vectors, opt);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.inertia_history, b.inertia_history);
}

TEST(PurityTest, Arithmetic) {
  auto fixture = testing::MakeSpeakerFixture(1);
  ClusterResult r;
  for (const auto& v : fixture.vectors) {
    r.speaker_ids.push_back(v.speaker_id);
    r.assignments.push_back(0);
  }
  EXPECT_DOUBLE_EQ(Purity(r, fixture.labels), 4.0 / 24.0);
  for (std::size_t i = 0; i < r.assignments.size(); ++i) r.assignments[i] = i / 4;
  EXPECT_EQ(Purity(r, fixture.labels), 1.0);
  fixture.labels.erase(r.speaker_ids[0]);
  EXPECT_THROW(Purity(r, fixture.labels), ValidationError);
}

}  // namespace
}  // namespace phonerr
