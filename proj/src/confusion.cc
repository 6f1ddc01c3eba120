#include "phonerr/confusion.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "phonerr/csv_grid.h"
#include "phonerr/error.h"

namespace phonerr {

ConfusionMatrix::ConfusionMatrix(InventoryPtr inventory)
    : inventory_(std::move(inventory)),
      n_(inventory_->size()),
      counts_(n_ * n_, 0) {}

ConfusionMatrix::ConfusionMatrix(InventoryPtr inventory,
                                 std::vector<Count> counts)
    : inventory_(std::move(inventory)),
      n_(inventory_->size()),
      counts_(std::move(counts)) {
  if (counts_.size() != n_ * n_) {
    throw ValidationError(fmt::format("confusion matrix needs {} cells, got {}",
                                      n_ * n_, counts_.size()));
  }
  PhoneId eps = inventory_->epsilon();
  if (counts_[Index(eps, eps)] != 0) {
    throw ValidationError("confusion cell (<eps>, <eps>) must be 0");
  }
}

void ConfusionMatrix::Add(PhoneId expected, PhoneId observed, Count n) {
  if (!inventory_->Contains(expected) || !inventory_->Contains(observed)) {
    throw ValidationError("confusion index outside the inventory");
  }
  if (inventory_->IsEpsilon(expected) && inventory_->IsEpsilon(observed)) {
    throw ValidationError("cannot count an (<eps>, <eps>) operation");
  }
  counts_[Index(expected, observed)] += n;
}

Count ConfusionMatrix::RowTotal(PhoneId expected) const {
  Count total = 0;
  for (std::size_t c = 0; c < n_; ++c) total += counts_[Index(expected, PhoneId(c))];
  return total;
}

Count ConfusionMatrix::Total() const {
  Count total = 0;
  for (Count c : counts_) total += c;
  return total;
}

void Accumulate(ConfusionMatrix& matrix, const Alignment& alignment) {
  for (const auto& op : alignment.ops) matrix.Add(op.expected, op.observed);
}

void Accumulate(SpeakerProfile& profile, const Alignment& alignment) {
  Accumulate(profile.matrix, alignment);
  ++profile.utterance_count;
}

std::string FormatPercent(const Rate& rate) {
  if (rate.denominator == 0) return "n/a";
  // Tenths of a percent, rounded half up in integer arithmetic.
  Count tenths = (rate.numerator * 2000 + rate.denominator) /
                 (2 * rate.denominator);
  return fmt::format("{}.{}%", tenths / 10, tenths % 10);
}

namespace {

Count CheckedRowTotal(const ConfusionMatrix& matrix, PhoneId target) {
  const auto& inv = *matrix.inventory();
  if (!inv.Contains(target) || inv.IsEpsilon(target)) {
    throw ValidationError("rate target must be a non-epsilon phoneme");
  }
  Count total = matrix.RowTotal(target);
  if (total == 0) {
    throw UndefinedRateError(fmt::format(
        "phoneme {} never occurs; its rates are undefined", inv.Label(target)));
  }
  return total;
}

}  // namespace

Rate RecognitionRate(const ConfusionMatrix& matrix, PhoneId target) {
  Count total = CheckedRowTotal(matrix, target);
  return {matrix(target, target), total};
}

std::optional<Substitute> MostCommonSubstitute(const ConfusionMatrix& matrix,
                                               PhoneId target,
                                               bool include_deletion) {
  Count total = CheckedRowTotal(matrix, target);
  const auto& inv = *matrix.inventory();
  std::optional<Substitute> best;
  for (PhoneId c = 0; c < static_cast<PhoneId>(matrix.size()); ++c) {
    if (c == target || (inv.IsEpsilon(c) && !include_deletion)) continue;
    Count n = matrix(target, c);
    if (n > 0 && (!best || n > best->rate.numerator)) {
      best = Substitute{c, {n, total}};
    }
  }
  return best;
}

ConfusionMatrix Merge(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  if (!SameInventory(a.inventory(), b.inventory())) {
    throw ValidationError("cannot merge confusion matrices over different inventories");
  }
  std::vector<Count> sum(a.counts());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b.counts()[i];
  return ConfusionMatrix(a.inventory(), std::move(sum));
}

std::vector<std::pair<PhoneId, Count>> InsertionStats(
    const ConfusionMatrix& matrix) {
  const PhoneId eps = matrix.inventory()->epsilon();
  std::vector<std::pair<PhoneId, Count>> out;
  for (PhoneId c = 0; c < static_cast<PhoneId>(matrix.size()); ++c) {
    if (Count n = matrix(eps, c); n > 0) out.emplace_back(c, n);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.second > y.second;
  });
  return out;
}

PhonemeStats ComputePhonemeStats(const ConfusionMatrix& matrix,
                                 PhoneId target) {
  PhonemeStats stats{target, CheckedRowTotal(matrix, target), {}, {}};
  stats.recognition_rate = {matrix(target, target), stats.occurrences};
  for (PhoneId c = 0; c < static_cast<PhoneId>(matrix.size()); ++c) {
    if (c == target) continue;
    if (Count n = matrix(target, c); n > 0) {
      stats.substitutes.push_back({c, {n, stats.occurrences}});
    }
  }
  std::stable_sort(stats.substitutes.begin(), stats.substitutes.end(),
                   [](const Substitute& x, const Substitute& y) {
                     return x.rate.numerator > y.rate.numerator;
                   });
  return stats;
}

void WriteConfusionCsv(std::ostream& out, const ConfusionMatrix& matrix) {
  WriteLabelledGrid(out, *matrix.inventory(), [&](PhoneId r, PhoneId c) {
    return std::to_string(matrix(r, c));
  });
}

ConfusionMatrix ParseConfusionCsv(std::istream& in, InventoryPtr inventory) {
  auto counts = ParseLabelledGridAs<Count>(in, *inventory);
  return ConfusionMatrix(std::move(inventory), std::move(counts));
}

nlohmann::json ProfileToJson(const SpeakerProfile& profile) {
  const auto& m = profile.matrix;
  nlohmann::json rows = nlohmann::json::array();
  for (PhoneId r = 0; r < static_cast<PhoneId>(m.size()); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (PhoneId c = 0; c < static_cast<PhoneId>(m.size()); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return {
      {"speaker_id", profile.speaker_id},
      {"l1_label", profile.l1_label},
      {"utterance_count", profile.utterance_count},
      {"inventory", m.inventory()->symbols()},
      {"counts", std::move(rows)},
  };
}

SpeakerProfile ProfileFromJson(const nlohmann::json& j,
                               InventoryPtr inventory) {
  try {
    if (j.contains("inventory") &&
        j.at("inventory").get<std::vector<std::string>>() !=
            inventory->symbols()) {
      throw ValidationError("profile inventory differs from the configured one");
    }
    const auto& rows = j.at("counts");
    const std::size_t n = inventory->size();
    if (!rows.is_array() || rows.size() != n) {
      throw ValidationError(fmt::format("profile counts must have {} rows", n));
    }
    std::vector<Count> counts;
    counts.reserve(n * n);
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != n) {
        throw ValidationError(
            fmt::format("profile count rows must have {} cells", n));
      }
      for (const auto& cell : row) counts.push_back(cell.get<Count>());
    }
    SpeakerProfile profile(inventory, j.at("speaker_id").get<std::string>(),
                           j.value("l1_label", std::string()));
    profile.matrix = ConfusionMatrix(inventory, std::move(counts));
    profile.utterance_count = j.value("utterance_count", Count{0});
    return profile;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("bad profile JSON: {}", e.what()));
  }
}

}  // namespace phonerr
