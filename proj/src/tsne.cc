#include "phonerr/tsne.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "phonerr/error.h"
#include "phonerr/rng.h"

namespace phonerr {

namespace {

constexpr int kMaxSearchSteps = 200;

double SquaredDistance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

// Fills `row` with P(j|i) for precision `beta`; returns the entropy in bits.
// `shifted[j]` is d(i, j) minus the smallest such distance, which keeps the
// largest kernel value at exp(0).
double Conditional(const std::vector<double>& shifted, std::size_t self,
                   double beta, std::vector<double>& row) {
  double sum = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < shifted.size(); ++j) {
    row[j] = j == self ? 0.0 : std::exp(-beta * shifted[j]);
    sum += row[j];
    weighted += row[j] * shifted[j];
  }
  for (double& p : row) p /= sum;
  double nats = std::log(sum) + beta * weighted / sum;
  return nats / std::numbers::ln2;
}

}  // namespace

Affinities ComputeAffinities(const std::vector<std::vector<double>>& points,
                             double perplexity) {
  const std::size_t n = points.size();
  if (n < 3) throw ValidationError("t-SNE needs at least 3 points");
  if (!(perplexity > 1.0) || !(perplexity < static_cast<double>(n - 1))) {
    throw ValidationError(fmt::format(
        "perplexity {} is infeasible for {} points; need 1 < perplexity < {}",
        perplexity, n, n - 1));
  }
  const double target = std::log2(perplexity);

  Affinities out;
  out.n = n;
  out.precision.assign(n, 0.0);
  out.entropy_bits.assign(n, 0.0);
  std::vector<double> conditional(n * n, 0.0);
  std::vector<double> shifted(n), row(n);

  for (std::size_t i = 0; i < n; ++i) {
    double min_d = std::numeric_limits<double>::infinity();
    double max_d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      shifted[j] = j == i ? 0.0 : SquaredDistance(points[i], points[j]);
      if (j != i) {
        min_d = std::min(min_d, shifted[j]);
        max_d = std::max(max_d, shifted[j]);
      }
    }
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) {
        shifted[j] -= min_d;
        mean += shifted[j];
      }
    }
    mean /= static_cast<double>(n - 1);

    double beta = 1.0;
    double entropy = 0.0;
    if (max_d == min_d) {
      // Equidistant neighbours: uniform for every bandwidth.
      entropy = Conditional(shifted, i, beta, row);
    } else {
      beta = 1.0 / mean;
      double lo = 0.0;
      double hi = std::numeric_limits<double>::infinity();
      for (int step = 0; step < kMaxSearchSteps; ++step) {
        entropy = Conditional(shifted, i, beta, row);
        double diff = entropy - target;
        if (std::abs(diff) < kEntropyTolerance) break;
        if (diff > 0) {
          lo = beta;
          beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
        } else {
          hi = beta;
          beta = (beta + lo) / 2.0;
        }
      }
    }
    out.precision[i] = beta;
    out.entropy_bits[i] = entropy;
    std::copy(row.begin(), row.end(), conditional.begin() + i * n);
  }

  out.joint.assign(n * n, 0.0);
  const double norm = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.joint[i * n + j] = (conditional[i * n + j] + conditional[j * n + i]) / norm;
    }
  }
  return out;
}

namespace {

// Student-t kernel values 1 / (1 + |yi - yj|^2) and their sum over i != j.
double Kernel(const std::vector<Point2>& y, std::vector<double>& num) {
  const std::size_t n = y.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = y[i][0] - y[j][0];
      double dy = y[i][1] - y[j][1];
      double v = 1.0 / (1.0 + dx * dx + dy * dy);
      num[i * n + j] = num[j * n + i] = v;
      sum += 2.0 * v;
    }
  }
  return sum;
}

}  // namespace

double KlDivergence(const Affinities& affinities,
                    const std::vector<Point2>& embedding) {
  const std::size_t n = affinities.n;
  std::vector<double> num(n * n);
  double sum = Kernel(embedding, num);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double p = affinities.joint[i * n + j];
      if (i == j || p <= 0.0) continue;
      double q = std::max(num[i * n + j] / sum, std::numeric_limits<double>::min());
      kl += p * std::log(p / q);
    }
  }
  return kl;
}

TsneResult RunTsne(const std::vector<std::vector<double>>& points,
                   const TsneOptions& options) {
  TsneResult result;
  result.affinities = ComputeAffinities(points, options.perplexity);
  const std::size_t n = points.size();
  const auto& joint = result.affinities.joint;

  Rng rng(options.seed);
  std::vector<Point2> y(n);
  for (auto& p : y) {
    p[0] = 1e-4 * rng.Normal();
    p[1] = 1e-4 * rng.Normal();
  }
  result.initial_kl = KlDivergence(result.affinities, y);

  std::vector<Point2> update(n, {0.0, 0.0});
  std::vector<Point2> gains(n, {1.0, 1.0});
  std::vector<Point2> grad(n);
  std::vector<double> num(n * n);
  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    const double exaggeration = iter < options.exaggeration_iterations
                                    ? options.early_exaggeration
                                    : 1.0;
    const double momentum = iter < options.momentum_switch_iteration
                                ? options.initial_momentum
                                : options.final_momentum;
    double sum = Kernel(y, num);
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = {0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double w = num[i * n + j];
        double mult = (exaggeration * joint[i * n + j] - w / sum) * w;
        grad[i][0] += 4.0 * mult * (y[i][0] - y[j][0]);
        grad[i][1] += 4.0 * mult * (y[i][1] - y[j][1]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 2; ++d) {
        bool same_sign = (grad[i][d] > 0) == (update[i][d] > 0);
        gains[i][d] = same_sign ? gains[i][d] * 0.8 : gains[i][d] + 0.2;
        gains[i][d] = std::max(gains[i][d], 0.01);
        update[i][d] = momentum * update[i][d] -
                       options.learning_rate * gains[i][d] * grad[i][d];
        y[i][d] += update[i][d];
      }
    }
    Point2 mean{0.0, 0.0};
    for (const auto& p : y) {
      mean[0] += p[0];
      mean[1] += p[1];
    }
    for (auto& p : y) {
      p[0] -= mean[0] / static_cast<double>(n);
      p[1] -= mean[1] / static_cast<double>(n);
    }
  }
  result.final_kl = KlDivergence(result.affinities, y);
  result.embedding = std::move(y);
  return result;
}

}  // namespace phonerr
