#include "phonerr/cost_matrix.h"

#include <cmath>

#include <fmt/format.h>

#include "phonerr/csv_grid.h"
#include "phonerr/error.h"

namespace phonerr {

CostMatrix CostMatrix::Uniform(InventoryPtr inventory) {
  const std::size_t n = inventory->size();
  std::vector<double> costs(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) costs[i * n + i] = 0.0;
  return CostMatrix(std::move(inventory), std::move(costs));
}

CostMatrix::CostMatrix(InventoryPtr inventory, std::vector<double> costs)
    : inventory_(std::move(inventory)),
      n_(inventory_->size()),
      costs_(std::move(costs)) {
  if (costs_.size() != n_ * n_) {
    throw ValidationError(fmt::format("cost matrix needs {} entries, got {}",
                                      n_ * n_, costs_.size()));
  }
  const PhonemeInventory& inv = *inventory_;
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) {
      double v = costs_[r * n_ + c];
      const auto& rl = inv.Label(PhoneId(r));
      const auto& cl = inv.Label(PhoneId(c));
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError(
            fmt::format("cost({}, {}) = {} is not a non-negative number", rl,
                        cl, v));
      }
      if (r == c && !inv.IsEpsilon(PhoneId(r)) && v != 0.0) {
        throw ValidationError(
            fmt::format("cost({}, {}) must be 0, got {}", rl, cl, v));
      }
    }
  }
  auto eps = static_cast<std::size_t>(inv.epsilon());
  costs_[eps * n_ + eps] = 0.0;
}

CostMatrix CostMatrix::Transposed() const {
  std::vector<double> t(costs_.size());
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) t[c * n_ + r] = costs_[r * n_ + c];
  }
  return CostMatrix(inventory_, std::move(t));
}

bool CostMatrix::SatisfiesTriangleInequality() const {
  for (std::size_t x = 0; x < n_; ++x) {
    for (std::size_t y = 0; y < n_; ++y) {
      for (std::size_t z = 0; z < n_; ++z) {
        if (costs_[x * n_ + z] > costs_[x * n_ + y] + costs_[y * n_ + z]) {
          return false;
        }
      }
    }
  }
  return true;
}

CostMatrix ParseCostMatrix(std::istream& in, InventoryPtr inventory) {
  auto values = ParseLabelledGrid(in, *inventory);
  return CostMatrix(std::move(inventory), std::move(values));
}

void WriteCostMatrix(std::ostream& out, const CostMatrix& costs) {
  WriteLabelledGrid(out, *costs.inventory(), [&](PhoneId r, PhoneId c) {
    return FormatReal(costs(r, c));
  });
}

}  // namespace phonerr
