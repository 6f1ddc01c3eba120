// Edit-operation weights over the inventory, epsilon included.

#ifndef PHONERR_COST_MATRIX_H_
#define PHONERR_COST_MATRIX_H_

#include <istream>
#include <ostream>
#include <vector>

#include "phonerr/inventory.h"

namespace phonerr {

// costs(expected, observed). Row epsilon holds insertion costs, column
// epsilon deletion costs. Entries are finite and >= 0, the non-epsilon
// diagonal is 0, and (eps, eps) is stored as 0. Not necessarily symmetric.
class CostMatrix {
 public:
  // 1 off the diagonal, 0 on it: plain Levenshtein weights.
  static CostMatrix Uniform(InventoryPtr inventory);

  // `costs` is row-major in inventory order. Throws ValidationError.
  CostMatrix(InventoryPtr inventory, std::vector<double> costs);

  double operator()(PhoneId expected, PhoneId observed) const {
    return costs_[static_cast<std::size_t>(expected) * n_ + observed];
  }
  double Deletion(PhoneId expected) const {
    return (*this)(expected, inventory_->epsilon());
  }
  double Insertion(PhoneId observed) const {
    return (*this)(inventory_->epsilon(), observed);
  }

  CostMatrix Transposed() const;

  // c(x, z) <= c(x, y) + c(y, z) for all symbols, epsilon included.
  bool SatisfiesTriangleInequality() const;

  const InventoryPtr& inventory() const { return inventory_; }
  const std::vector<double>& values() const { return costs_; }

 private:
  InventoryPtr inventory_;
  std::size_t n_;
  std::vector<double> costs_;
};

CostMatrix ParseCostMatrix(std::istream& in, InventoryPtr inventory);
void WriteCostMatrix(std::ostream& out, const CostMatrix& costs);

}  // namespace phonerr

#endif  // PHONERR_COST_MATRIX_H_
