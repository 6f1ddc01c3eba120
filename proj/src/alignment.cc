#include "phonerr/alignment.h"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "phonerr/csv_grid.h"
#include "phonerr/error.h"

namespace phonerr {

std::string_view EditKindName(EditKind kind) {
  switch (kind) {
    case EditKind::kMatch: return "match";
    case EditKind::kSubstitute: return "substitute";
    case EditKind::kDelete: return "delete";
    case EditKind::kInsert: return "insert";
  }
  return "?";
}

TieBreak::TieBreak(std::array<Move, 3> order) : order_(order) {
  auto sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != std::array{Move::kDiagonal, Move::kDelete, Move::kInsert}) {
    throw ValidationError("tie-break order must be a permutation of diag,del,ins");
  }
}

TieBreak TieBreak::Parse(std::string_view spec) {
  std::array<Move, 3> order{};
  std::size_t count = 0;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    auto token = spec.substr(start, comma == std::string_view::npos
                                        ? std::string_view::npos
                                        : comma - start);
    Move m;
    if (token == "diag" || token == "sub") {
      m = Move::kDiagonal;
    } else if (token == "del") {
      m = Move::kDelete;
    } else if (token == "ins") {
      m = Move::kInsert;
    } else {
      throw ValidationError(fmt::format("unknown tie-break move '{}'", token));
    }
    if (count == 3) throw ValidationError("tie-break lists more than 3 moves");
    order[count++] = m;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (count != 3) throw ValidationError("tie-break must list diag, del and ins");
  return TieBreak(order);
}

std::string TieBreak::ToString() const {
  std::string out;
  for (Move m : order_) {
    if (!out.empty()) out += ',';
    out += m == Move::kDiagonal ? "diag" : m == Move::kDelete ? "del" : "ins";
  }
  return out;
}

namespace {

void CheckSequence(std::span<const PhoneId> seq, const PhonemeInventory& inv) {
  for (PhoneId p : seq) {
    if (!inv.Contains(p) || inv.IsEpsilon(p)) {
      throw ValidationError(fmt::format("invalid phone id {} in alignment input", p));
    }
  }
}

EditOp DiagonalOp(PhoneId a, PhoneId b, const CostMatrix& costs) {
  return {a == b ? EditKind::kMatch : EditKind::kSubstitute, a, b, costs(a, b)};
}

}  // namespace

Alignment Align(std::span<const PhoneId> expected,
                std::span<const PhoneId> observed, const CostMatrix& costs,
                const TieBreak& tie_break) {
  const PhonemeInventory& inv = *costs.inventory();
  CheckSequence(expected, inv);
  CheckSequence(observed, inv);
  const PhoneId eps = inv.epsilon();
  const std::size_t rows = expected.size() + 1;
  const std::size_t cols = observed.size() + 1;

  // dist[i * cols + j]: cheapest script turning expected[0, i) into
  // observed[0, j).
  std::vector<double> dist(rows * cols, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return dist[i * cols + j];
  };
  for (std::size_t i = 1; i < rows; ++i) {
    at(i, 0) = at(i - 1, 0) + costs(expected[i - 1], eps);
  }
  for (std::size_t j = 1; j < cols; ++j) {
    at(0, j) = at(0, j - 1) + costs(eps, observed[j - 1]);
  }
  for (std::size_t i = 1; i < rows; ++i) {
    const PhoneId a = expected[i - 1];
    for (std::size_t j = 1; j < cols; ++j) {
      const PhoneId b = observed[j - 1];
      at(i, j) = std::min({at(i - 1, j - 1) + costs(a, b),
                           at(i - 1, j) + costs(a, eps),
                           at(i, j - 1) + costs(eps, b)});
    }
  }

  Alignment result;
  result.total_cost = at(rows - 1, cols - 1);
  std::size_t i = rows - 1;
  std::size_t j = cols - 1;
  while (i > 0 || j > 0) {
    bool stepped = false;
    for (Move move : tie_break.order()) {
      if (move == Move::kDiagonal && i > 0 && j > 0) {
        EditOp op = DiagonalOp(expected[i - 1], observed[j - 1], costs);
        if (at(i - 1, j - 1) + op.cost == at(i, j)) {
          result.ops.push_back(op);
          --i, --j;
          stepped = true;
        }
      } else if (move == Move::kDelete && i > 0) {
        double c = costs(expected[i - 1], eps);
        if (at(i - 1, j) + c == at(i, j)) {
          result.ops.push_back({EditKind::kDelete, expected[i - 1], eps, c});
          --i;
          stepped = true;
        }
      } else if (move == Move::kInsert && j > 0) {
        double c = costs(eps, observed[j - 1]);
        if (at(i, j - 1) + c == at(i, j)) {
          result.ops.push_back({EditKind::kInsert, eps, observed[j - 1], c});
          --j;
          stepped = true;
        }
      }
      if (stepped) break;
    }
    if (!stepped) {
      // Unreachable: every cell value came from one of its predecessors.
      throw std::logic_error("alignment backtrace lost its path");
    }
  }
  std::reverse(result.ops.begin(), result.ops.end());
  return result;
}

namespace {

// Depth-first walk over every monotone script from (i, j) to the end.
class ScriptEnumerator {
 public:
  ScriptEnumerator(std::span<const PhoneId> expected,
                   std::span<const PhoneId> observed, const CostMatrix& costs,
                   bool keep_scripts)
      : expected_(expected),
        observed_(observed),
        costs_(costs),
        eps_(costs.inventory()->epsilon()),
        keep_scripts_(keep_scripts) {}

  void Run() { Walk(0, 0, 0.0); }

  double best() const { return best_; }
  std::vector<std::vector<EditOp>>& scripts() { return scripts_; }

 private:
  void Walk(std::size_t i, std::size_t j, double cost) {
    if (i == expected_.size() && j == observed_.size()) {
      if (cost < best_) {
        best_ = cost;
        scripts_.clear();
      }
      if (keep_scripts_ && cost == best_) scripts_.push_back(path_);
      return;
    }
    if (i < expected_.size() && j < observed_.size()) {
      Step(DiagonalOp(expected_[i], observed_[j], costs_), i + 1, j + 1, cost);
    }
    if (i < expected_.size()) {
      Step({EditKind::kDelete, expected_[i], eps_, costs_(expected_[i], eps_)},
           i + 1, j, cost);
    }
    if (j < observed_.size()) {
      Step({EditKind::kInsert, eps_, observed_[j], costs_(eps_, observed_[j])},
           i, j + 1, cost);
    }
  }

  void Step(const EditOp& op, std::size_t i, std::size_t j, double cost) {
    path_.push_back(op);
    Walk(i, j, cost + op.cost);
    path_.pop_back();
  }

  std::span<const PhoneId> expected_;
  std::span<const PhoneId> observed_;
  const CostMatrix& costs_;
  PhoneId eps_;
  bool keep_scripts_;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<EditOp> path_;
  std::vector<std::vector<EditOp>> scripts_;
};

void CheckBruteforceSize(std::size_t a, std::size_t b) {
  if (a + b > kBruteforceMaxLength) {
    throw ValidationError(fmt::format(
        "brute-force alignment limited to {} total phones, got {}",
        kBruteforceMaxLength, a + b));
  }
}

}  // namespace

double AlignBruteforce(std::span<const PhoneId> expected,
                       std::span<const PhoneId> observed,
                       const CostMatrix& costs) {
  CheckBruteforceSize(expected.size(), observed.size());
  ScriptEnumerator walker(expected, observed, costs, false);
  walker.Run();
  return walker.best();
}

std::vector<std::vector<EditOp>> OptimalScriptsBruteforce(
    std::span<const PhoneId> expected, std::span<const PhoneId> observed,
    const CostMatrix& costs) {
  CheckBruteforceSize(expected.size(), observed.size());
  ScriptEnumerator walker(expected, observed, costs, true);
  walker.Run();
  return std::move(walker.scripts());
}

VariantAlignment AlignMinVariant(const WordLattice& expected,
                                 std::span<const PhoneId> observed,
                                 const CostMatrix& costs,
                                 const TieBreak& tie_break,
                                 std::size_t max_combinations) {
  std::size_t combinations = 1;
  for (const auto& word : expected) {
    if (word.empty()) throw ValidationError("lattice word without variants");
    if (combinations > max_combinations / word.size()) {
      throw ValidationError(fmt::format(
          "pronunciation variant combinations exceed the cap of {}; use "
          "variant rule 'first'",
          max_combinations));
    }
    combinations *= word.size();
  }
  if (combinations > max_combinations) {
    throw ValidationError(fmt::format(
        "pronunciation variant combinations exceed the cap of {}; use "
        "variant rule 'first'",
        max_combinations));
  }

  std::vector<std::size_t> choice(expected.size(), 0);
  VariantAlignment best;
  bool have_best = false;
  std::vector<PhoneId> concatenated;
  for (std::size_t n = 0; n < combinations; ++n) {
    concatenated.clear();
    for (std::size_t w = 0; w < expected.size(); ++w) {
      const auto& phones = expected[w][choice[w]].phones;
      concatenated.insert(concatenated.end(), phones.begin(), phones.end());
    }
    Alignment candidate = Align(concatenated, observed, costs, tie_break);
    if (!have_best || candidate.total_cost < best.alignment.total_cost) {
      best.alignment = std::move(candidate);
      best.chosen = choice;
      have_best = true;
    }
    // Odometer increment, last word fastest.
    for (std::size_t w = expected.size(); w-- > 0;) {
      if (++choice[w] < expected[w].size()) break;
      choice[w] = 0;
    }
  }
  return best;
}

void WriteAlignment(std::ostream& out, const Alignment& alignment,
                    const PhonemeInventory& inventory) {
  for (const auto& op : alignment.ops) {
    out << inventory.Label(op.expected) << '\t' << inventory.Label(op.observed)
        << '\t' << EditKindName(op.kind) << '\t' << FormatReal(op.cost) << '\n';
  }
}

}  // namespace phonerr
