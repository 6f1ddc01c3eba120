// Speaker vectors built from confusion matrices, and k-means over them.

#ifndef PHONERR_CLUSTERING_H_
#define PHONERR_CLUSTERING_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "phonerr/confusion.h"

namespace phonerr {

enum class Normalization { kRawCounts, kRowFrequency };

Normalization ParseNormalization(std::string_view name);
std::string_view NormalizationName(Normalization n);

struct SpeakerVector {
  std::string speaker_id;
  std::vector<double> values;  // inventory size squared, row-major
  Normalization normalization = Normalization::kRawCounts;
};

// Row-major flattening. kRowFrequency divides each row by its total; empty
// rows stay zero.
SpeakerVector Vectorize(const ConfusionMatrix& matrix,
                        Normalization normalization = Normalization::kRawCounts,
                        std::string speaker_id = {});

double SquaredDistance(const std::vector<double>& a,
                       const std::vector<double>& b);

enum class KMeansInit { kPlusPlus, kForgy };

struct KMeansOptions {
  std::size_t k = 6;
  std::uint64_t seed = 0;
  KMeansInit init = KMeansInit::kPlusPlus;
  std::size_t max_iter = 300;
  double rel_tol = 1e-9;
  // Independent initializations; the run with the lowest inertia is kept.
  std::size_t n_init = 10;
};

struct ClusterResult {
  std::vector<std::string> speaker_ids;  // input order
  std::vector<std::size_t> assignments;  // parallel to speaker_ids
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  // Inertia after each assignment step of the kept run; the last entry
  // equals `inertia`.
  std::vector<double> inertia_history;
  // The same for every run, in run order.
  std::vector<std::vector<double>> run_inertia_histories;

  std::map<std::string, std::size_t> AssignmentMap() const;
};

// Lloyd iterations until the assignment stops changing, the relative inertia
// change drops below rel_tol, or max_iter. Points go to the nearest
// centroid, lowest index on ties. An emptied cluster is re-seeded with the
// point farthest from its centroid. Deterministic given the seed. Throws
// ValidationError unless 1 <= k <= vectors.size() and dimensions agree.
ClusterResult KMeans(const std::vector<SpeakerVector>& vectors,
                     const KMeansOptions& options);

// Sum over clusters of the majority label count, over the number of
// speakers. Throws ValidationError for a speaker without a label.
double Purity(const ClusterResult& result,
              const std::map<std::string, std::string>& labels);

}  // namespace phonerr

#endif  // PHONERR_CLUSTERING_H_
