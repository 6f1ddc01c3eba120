#include "phonerr/clustering.h"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "phonerr/error.h"
#include "phonerr/rng.h"

namespace phonerr {

Normalization ParseNormalization(std::string_view name) {
  if (name == "raw" || name == "raw_counts") return Normalization::kRawCounts;
  if (name == "row" || name == "row_frequency") return Normalization::kRowFrequency;
  throw ValidationError(fmt::format("unknown normalization '{}'", name));
}

std::string_view NormalizationName(Normalization n) {
  return n == Normalization::kRawCounts ? "raw_counts" : "row_frequency";
}

SpeakerVector Vectorize(const ConfusionMatrix& matrix,
                        Normalization normalization, std::string speaker_id) {
  const std::size_t n = matrix.size();
  SpeakerVector v{std::move(speaker_id), std::vector<double>(n * n, 0.0),
                  normalization};
  for (std::size_t r = 0; r < n; ++r) {
    Count total = matrix.RowTotal(PhoneId(r));
    for (std::size_t c = 0; c < n; ++c) {
      double count = static_cast<double>(matrix(PhoneId(r), PhoneId(c)));
      if (normalization == Normalization::kRowFrequency) {
        count = total ? count / static_cast<double>(total) : 0.0;
      }
      v.values[r * n + c] = count;
    }
  }
  return v;
}

double SquaredDistance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

std::map<std::string, std::size_t> ClusterResult::AssignmentMap() const {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < speaker_ids.size(); ++i) {
    out[speaker_ids[i]] = assignments[i];
  }
  return out;
}

namespace {

using Points = std::vector<const std::vector<double>*>;

std::vector<std::vector<double>> InitPlusPlus(const Points& points,
                                              std::size_t k, Rng& rng) {
  std::vector<std::vector<double>> centroids;
  centroids.push_back(*points[rng.Index(points.size())]);
  std::vector<double> nearest(points.size(),
                              std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(*points[i], centroids.back()));
      total += nearest[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.Uniform() * total;
      double acc = 0.0;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += nearest[i];
        if (target < acc && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      // All points coincide with a centroid already.
      pick = rng.Index(points.size());
    }
    centroids.push_back(*points[pick]);
  }
  return centroids;
}

std::vector<std::vector<double>> InitForgy(const Points& points, std::size_t k,
                                           Rng& rng) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::vector<double>> centroids;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.Index(order.size() - i);
    std::swap(order[i], order[j]);
    centroids.push_back(*points[order[i]]);
  }
  return centroids;
}

ClusterResult Lloyd(const Points& points, std::size_t k,
                    const KMeansOptions& options, Rng& rng);

}  // namespace

ClusterResult KMeans(const std::vector<SpeakerVector>& vectors,
                     const KMeansOptions& options) {
  const std::size_t n = vectors.size();
  const std::size_t k = options.k;
  if (k < 1 || k > n) {
    throw ValidationError(
        fmt::format("k = {} must lie between 1 and the {} speakers", k, n));
  }
  const std::size_t dim = vectors.front().values.size();
  Points points;
  for (const auto& v : vectors) {
    if (v.values.size() != dim) {
      throw ValidationError("speaker vectors differ in dimension");
    }
    points.push_back(&v.values);
  }

  if (options.n_init < 1) throw ValidationError("n_init must be at least 1");

  // All restarts draw from one stream; the lowest final inertia wins, the
  // earliest run on ties.
  Rng rng(options.seed);
  ClusterResult best;
  for (std::size_t run = 0; run < options.n_init; ++run) {
    ClusterResult r = Lloyd(points, k, options, rng);
    best.run_inertia_histories.push_back(r.inertia_history);
    if (run == 0 || r.inertia < best.inertia) {
      r.run_inertia_histories = std::move(best.run_inertia_histories);
      best = std::move(r);
    }
  }
  best.seed = options.seed;
  for (const auto& v : vectors) best.speaker_ids.push_back(v.speaker_id);
  return best;
}

namespace {

ClusterResult Lloyd(const Points& points, std::size_t k,
                    const KMeansOptions& options, Rng& rng) {
  const std::size_t n = points.size();
  const std::size_t dim = points.front()->size();
  ClusterResult result;
  result.centroids = options.init == KMeansInit::kPlusPlus
                         ? InitPlusPlus(points, k, rng)
                         : InitForgy(points, k, rng);

  std::vector<std::size_t> assignment(n, k);  // k = unassigned
  std::vector<double> dist_to_assigned(n, 0.0);
  for (std::size_t iter = 1;; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double d = SquaredDistance(*points[i], result.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      changed |= assignment[i] != best;
      assignment[i] = best;
      dist_to_assigned[i] = best_d;
      inertia += best_d;
    }
    result.iterations = iter;
    result.inertia_history.push_back(inertia);

    if (!changed || iter >= options.max_iter) break;
    if (result.inertia_history.size() >= 2) {
      double prev = result.inertia_history[result.inertia_history.size() - 2];
      if (prev == 0.0 || (prev - inertia) / prev < options.rel_tol) break;
    }

    // Update step.
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += (*points[i])[d];
      ++sizes[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        result.centroids[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      // Re-seed with the point farthest from its current centroid, taking it
      // out of the running for further empty clusters.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assignment[i]] > 1 && dist_to_assigned[i] > far_d) {
          far_d = dist_to_assigned[i];
          far = i;
        }
      }
      result.centroids[c] = *points[far];
      --sizes[assignment[far]];
      assignment[far] = c;
      sizes[c] = 1;
      dist_to_assigned[far] = 0.0;
    }
  }
  result.assignments = std::move(assignment);
  result.inertia = result.inertia_history.back();
  return result;
}

}  // namespace

double Purity(const ClusterResult& result,
              const std::map<std::string, std::string>& labels) {
  std::map<std::size_t, std::map<std::string, std::size_t>> per_cluster;
  for (std::size_t i = 0; i < result.speaker_ids.size(); ++i) {
    auto it = labels.find(result.speaker_ids[i]);
    if (it == labels.end()) {
      throw ValidationError(
          fmt::format("speaker '{}' has no label", result.speaker_ids[i]));
    }
    ++per_cluster[result.assignments[i]][it->second];
  }
  std::size_t majority = 0;
  for (const auto& [cluster, counts] : per_cluster) {
    std::size_t best = 0;
    for (const auto& [label, count] : counts) best = std::max(best, count);
    majority += best;
  }
  return result.speaker_ids.empty()
             ? 0.0
             : static_cast<double>(majority) /
                   static_cast<double>(result.speaker_ids.size());
}

}  // namespace phonerr
