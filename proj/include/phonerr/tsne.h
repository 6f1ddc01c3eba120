// Exact t-SNE for small point sets (tens of speakers), no tree
// approximation.

#ifndef PHONERR_TSNE_H_
#define PHONERR_TSNE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace phonerr {

struct TsneOptions {
  double perplexity = 5.0;
  double learning_rate = 200.0;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch_iteration = 250;
};

// Entropy tolerance of the per-point bandwidth search, in bits.
inline constexpr double kEntropyTolerance = 1e-5;

struct Affinities {
  std::size_t n = 0;
  // Symmetrized joint probabilities, row-major n x n, zero diagonal.
  std::vector<double> joint;
  // Per-point Gaussian precision (1 / 2 sigma^2) found by the search.
  std::vector<double> precision;
  // Entropy in bits of each conditional distribution P(.|i).
  std::vector<double> entropy_bits;
};

// Binary-searches each point's bandwidth so the conditional entropy matches
// log2(perplexity), then symmetrizes. Points at identical distances from i
// give a uniform conditional whatever the bandwidth. Throws ValidationError
// unless n >= 3 and 1 < perplexity < n - 1.
Affinities ComputeAffinities(const std::vector<std::vector<double>>& points,
                             double perplexity);

using Point2 = std::array<double, 2>;

// KL(P || Q) for the Student-t low-dimensional similarities of `embedding`.
double KlDivergence(const Affinities& affinities,
                    const std::vector<Point2>& embedding);

struct TsneResult {
  std::vector<Point2> embedding;
  Affinities affinities;
  double initial_kl = 0.0;  // right after initialization
  double final_kl = 0.0;
};

// Gradient descent with momentum and adaptive gains. Deterministic given
// the seed.
TsneResult RunTsne(const std::vector<std::vector<double>>& points,
                   const TsneOptions& options);

}  // namespace phonerr

#endif  // PHONERR_TSNE_H_
