#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "phonerr/error.h"
#include "phonerr/tsne.h"
#include "test_util.h"

namespace phonerr {
namespace {

std::vector<std::vector<double>> FixturePoints(std::uint64_t seed) {
  auto fixture = testing::MakeSpeakerFixture(seed);
  std::vector<std::vector<double>> pts;
  for (auto& v : fixture.vectors) pts.push_back(v.values);
  return pts;
}

double Dist(const Point2& a, const Point2& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

TEST(AffinityTest, SymmetricNormalizedAndOnTarget) {
  auto pts = FixturePoints(8);
  Affinities p = ComputeAffinities(pts, 5.0);
  ASSERT_EQ(p.n, pts.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    EXPECT_EQ(p.joint[i * p.n + i], 0.0);
    for (std::size_t j = 0; j < p.n; ++j) {
      EXPECT_GE(p.joint[i * p.n + j], 0.0);
      EXPECT_EQ(p.joint[i * p.n + j], p.joint[j * p.n + i]);
      sum += p.joint[i * p.n + j];
    }
    EXPECT_NEAR(p.entropy_bits[i], std::log2(5.0), kEntropyTolerance);
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(AffinityTest, EquidistantPointsGiveUniformAffinities) {
  // Unit basis vectors: every pairwise squared distance is exactly 2.
  std::vector<std::vector<double>> pts{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  Affinities p = ComputeAffinities(pts, 1.5);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) EXPECT_NEAR(p.joint[i * 3 + j], 1.0 / 6.0, 1e-12);
    }
    EXPECT_NEAR(p.entropy_bits[i], 1.0, 1e-12);
  }
  TsneOptions opt;
  opt.perplexity = 1.5;
  opt.iterations = 200;
  auto r = RunTsne(pts, opt);
  ASSERT_EQ(r.embedding.size(), 3u);
  for (const auto& q : r.embedding) {
    EXPECT_TRUE(std::isfinite(q[0]) && std::isfinite(q[1]));
  }
}

TEST(AffinityTest, InfeasiblePerplexity) {
  std::vector<std::vector<double>> pts{{0}, {1}, {2}, {3}};
  EXPECT_THROW(ComputeAffinities(pts, 3.0), ValidationError);
  EXPECT_THROW(ComputeAffinities(pts, 1.0), ValidationError);
  EXPECT_THROW(ComputeAffinities({{0}, {1}}, 0.5), ValidationError);
}

TEST(TsneTest, ReducesKlAndSeparatesGroups) {
  auto pts = FixturePoints(12);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TsneOptions opt;
    opt.seed = seed;
    auto r = RunTsne(pts, opt);
    EXPECT_LT(r.final_kl, r.initial_kl) << "seed " << seed;
    EXPECT_DOUBLE_EQ(r.final_kl, KlDivergence(r.affinities, r.embedding));

    double inter = 0.0, intra = 0.0;
    int n_inter = 0, n_intra = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        double d = Dist(r.embedding[i], r.embedding[j]);
        if (i / 4 == j / 4) {
          intra += d;
          ++n_intra;
        } else {
          inter += d;
          ++n_inter;
        }
      }
    }
    EXPECT_GT(inter / n_inter, intra / n_intra) << "seed " << seed;
  }
}

TEST(TsneTest, DeterministicAndCentered) {
  auto pts = FixturePoints(3);
  TsneOptions opt;
  opt.seed = 9;
  opt.iterations = 300;
  auto a = RunTsne(pts, opt);
  auto b = RunTsne(pts, opt);
  EXPECT_EQ(a.embedding, b.embedding);
  double mx = 0.0, my = 0.0;
  for (const auto& q : a.embedding) {
    mx += q[0];
    my += q[1];
  }
  EXPECT_NEAR(mx / pts.size(), 0.0, 1e-9);
  EXPECT_NEAR(my / pts.size(), 0.0, 1e-9);
}

}  // namespace
}  // namespace phonerr
