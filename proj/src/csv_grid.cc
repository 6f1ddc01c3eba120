#include "phonerr/csv_grid.h"

#include <charconv>
#include <optional>

#include <fmt/format.h>

#include "phonerr/error.h"

namespace phonerr {

namespace {

std::string Trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitCsv(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(Trim(line.substr(start)));
      break;
    }
    cells.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

PhoneId LabelId(const PhonemeInventory& inventory, const std::string& label,
                std::size_t line_no) {
  auto id = inventory.Find(label);
  if (!id) {
    throw ValidationError(
        fmt::format("line {}: unknown label '{}'", line_no, label));
  }
  return *id;
}

}  // namespace

template <typename T>
std::vector<T> ParseLabelledGridAs(std::istream& in,
                                   const PhonemeInventory& inventory) {
  const std::size_t n = inventory.size();
  std::string line;
  std::size_t line_no = 0;

  std::vector<PhoneId> columns;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto cells = SplitCsv(line);
    std::vector<bool> seen(n, false);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      PhoneId id = LabelId(inventory, cells[c], line_no);
      if (seen[id]) {
        throw ValidationError(
            fmt::format("duplicate column label '{}'", cells[c]));
      }
      seen[id] = true;
      columns.push_back(id);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) {
        throw ValidationError(fmt::format("missing column label '{}'",
                                          inventory.Label(PhoneId(i))));
      }
    }
    break;
  }
  if (columns.empty()) throw ParseError("grid has no header row");

  std::vector<T> values(n * n, T{});
  std::vector<bool> row_seen(n, false);
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto cells = SplitCsv(line);
    if (cells.size() != columns.size() + 1) {
      throw ParseError(fmt::format("line {}: expected {} cells, got {}",
                                   line_no, columns.size() + 1, cells.size()));
    }
    PhoneId row = LabelId(inventory, cells[0], line_no);
    if (row_seen[row]) {
      throw ValidationError(fmt::format("duplicate row label '{}'", cells[0]));
    }
    row_seen[row] = true;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string& text = cells[c + 1];
      T v{};
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(fmt::format("line {}: bad number '{}'", line_no, text));
      }
      values[static_cast<std::size_t>(row) * n + columns[c]] = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!row_seen[i]) {
      throw ValidationError(
          fmt::format("missing row label '{}'", inventory.Label(PhoneId(i))));
    }
  }
  return values;
}

template std::vector<double> ParseLabelledGridAs<double>(
    std::istream&, const PhonemeInventory&);
template std::vector<std::uint64_t> ParseLabelledGridAs<std::uint64_t>(
    std::istream&, const PhonemeInventory&);

void WriteLabelledGrid(
    std::ostream& out, const PhonemeInventory& inventory,
    const std::function<std::string(PhoneId, PhoneId)>& cell) {
  const auto n = static_cast<PhoneId>(inventory.size());
  out << "expected\\observed";
  for (PhoneId c = 0; c < n; ++c) out << ',' << inventory.Label(c);
  out << '\n';
  for (PhoneId r = 0; r < n; ++r) {
    out << inventory.Label(r);
    for (PhoneId c = 0; c < n; ++c) out << ',' << cell(r, c);
    out << '\n';
  }
}

std::string FormatReal(double value) { return fmt::format("{}", value); }

}  // namespace phonerr
