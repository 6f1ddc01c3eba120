#include "phonerr/inventory.h"

#include <fmt/format.h>

#include "phonerr/error.h"

namespace phonerr {

std::shared_ptr<const PhonemeInventory> PhonemeInventory::Arpabet() {
  static const auto inventory =
      std::make_shared<const PhonemeInventory>(std::vector<std::string>{
          "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
          "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
          "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
          "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH", "<eps>",
      });
  return inventory;
}

PhonemeInventory::PhonemeInventory(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.size() != kInventorySize) {
    throw ValidationError(fmt::format(
        "inventory must contain {} symbols, got {}", kInventorySize,
        symbols_.size()));
  }
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const std::string& s = symbols_[i];
    if (s.empty()) throw ValidationError("inventory contains an empty symbol");
    if (!index_.emplace(s, static_cast<PhoneId>(i)).second) {
      throw ValidationError(fmt::format("duplicate inventory symbol '{}'", s));
    }
    if (s == kEpsilonLabel) epsilon_ = static_cast<PhoneId>(i);
  }
  if (epsilon_ < 0) {
    throw ValidationError(
        fmt::format("inventory lacks the epsilon symbol {}", kEpsilonLabel));
  }
}

PhonemeInventory PhonemeInventory::Parse(std::istream& in) {
  std::vector<std::string> symbols;
  std::string line;
  while (std::getline(in, line)) {
    auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos || line[begin] == '#') continue;
    auto end = line.find_last_not_of(" \t\r");
    symbols.push_back(line.substr(begin, end - begin + 1));
  }
  return PhonemeInventory(std::move(symbols));
}

std::optional<PhoneId> PhonemeInventory::Find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

PhoneId PhonemeInventory::Require(std::string_view label) const {
  if (auto id = Find(label)) return *id;
  throw ValidationError(fmt::format("unknown phoneme '{}'", label));
}

std::string JoinLabels(const PhonemeInventory& inventory,
                       const std::vector<PhoneId>& phones) {
  std::string out;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    if (i) out += ' ';
    out += inventory.Label(phones[i]);
  }
  return out;
}

}  // namespace phonerr
