#include "phonerr/lexicon.h"

#include <cctype>
#include <charconv>
#include <sstream>

#include <fmt/format.h>

#include "phonerr/error.h"

namespace phonerr {

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !IsSpace(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) ||
         static_cast<unsigned char>(c) >= 0x80;
}

}  // namespace

Lexicon::Lexicon(InventoryPtr inventory) : inventory_(std::move(inventory)) {}

void Lexicon::Add(std::string_view word, PronunciationVariant variant) {
  std::string key = NormalizeWord(word);
  if (key.empty()) {
    throw ValidationError(fmt::format("word '{}' normalizes to nothing", word));
  }
  if (variant.phones.empty()) {
    throw ValidationError(fmt::format("empty pronunciation for '{}'", key));
  }
  for (PhoneId p : variant.phones) {
    if (!inventory_->Contains(p) || inventory_->IsEpsilon(p)) {
      throw ValidationError(
          fmt::format("invalid phone id {} in pronunciation of '{}'", p, key));
    }
  }
  entries_[key].push_back(std::move(variant));
}

const std::vector<PronunciationVariant>* Lexicon::Lookup(
    std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

PhoneId StripStress(std::string_view label, const PhonemeInventory& inventory) {
  std::string_view base = label;
  if (!base.empty() && base.back() >= '0' && base.back() <= '2') {
    base.remove_suffix(1);
  }
  auto id = inventory.Find(base);
  if (!id || inventory.IsEpsilon(*id)) {
    throw ValidationError(fmt::format("unknown phoneme '{}'", label));
  }
  return *id;
}

std::string NormalizeWord(std::string_view word) {
  std::size_t begin = 0;
  std::size_t end = word.size();
  while (begin < end && !IsWordChar(word[begin])) ++begin;
  while (end > begin && !IsWordChar(word[end - 1])) --end;
  return Upper(word.substr(begin, end - begin));
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::string cleaned(text);
  for (char& c : cleaned) {
    if (c != '\'' && std::ispunct(static_cast<unsigned char>(c))) c = ' ';
  }
  std::vector<std::string> tokens;
  for (auto piece : SplitWhitespace(cleaned)) {
    std::string word = NormalizeWord(piece);
    if (!word.empty()) tokens.push_back(std::move(word));
  }
  return tokens;
}

Lexicon ParseLexicon(std::istream& in, InventoryPtr inventory) {
  Lexicon lexicon(inventory);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind(";;;", 0) == 0) continue;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;

    std::string_view head = fields[0];
    // WORD(n) marks an alternative pronunciation. Headwords may themselves
    // start with a parenthesis, e.g. "(PAREN".
    auto open = head.rfind('(');
    if (open != std::string_view::npos && open > 0) {
      std::string_view digits =
          head.back() == ')' ? head.substr(open + 1, head.size() - open - 2)
                             : std::string_view();
      int index = 0;
      auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (digits.empty() || ec != std::errc() ||
          ptr != digits.data() + digits.size() || index < 1) {
        throw ParseError(fmt::format("line {}: malformed variant index in '{}'",
                                     line_no, head));
      }
      head = head.substr(0, open);
    }

    PronunciationVariant variant;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i].front() == '#') break;  // cmudict.dict trailing comment
      std::string label = Upper(fields[i]);
      try {
        variant.phones.push_back(StripStress(label, *inventory));
      } catch (const ValidationError&) {
        throw ParseError(
            fmt::format("line {}: unknown phoneme '{}'", line_no, fields[i]));
      }
    }
    if (variant.phones.empty()) {
      throw ParseError(
          fmt::format("line {}: no pronunciation for '{}'", line_no, head));
    }
    if (NormalizeWord(head).empty()) {
      throw ParseError(fmt::format("line {}: empty headword", line_no));
    }
    lexicon.Add(head, std::move(variant));
  }
  return lexicon;
}

Lexicon ParseLexicon(std::string_view text, InventoryPtr inventory) {
  std::istringstream in{std::string(text)};
  return ParseLexicon(in, std::move(inventory));
}

void WriteLexicon(std::ostream& out, const Lexicon& lexicon) {
  const PhonemeInventory& inv = *lexicon.inventory();
  for (const auto& [word, variants] : lexicon.entries()) {
    for (std::size_t v = 0; v < variants.size(); ++v) {
      out << word;
      if (v > 0) out << '(' << v << ')';
      out << ' ';
      for (PhoneId p : variants[v].phones) out << ' ' << inv.Label(p);
      out << '\n';
    }
  }
}

PhonemizeResult Phonemize(const std::vector<std::string>& tokens,
                          const Lexicon& lexicon, const OovPolicy& policy,
                          VariantRule rule) {
  PhonemizeResult result;
  for (const auto& token : tokens) {
    const auto* variants = lexicon.Lookup(token);
    if (!variants && policy.mode() == OovMode::kSupplementaryLexicon &&
        policy.supplementary() != nullptr) {
      variants = policy.supplementary()->Lookup(token);
      if (variants) result.supplemented.push_back(token);
    }
    if (!variants) {
      result.oov.push_back(token);
      continue;
    }
    const auto& first = variants->front().phones;
    result.phones.insert(result.phones.end(), first.begin(), first.end());
    if (rule == VariantRule::kAll) result.lattice.push_back(*variants);
  }
  if (!result.oov.empty()) {
    if (policy.mode() == OovMode::kSkipUtterance) {
      result.skipped = true;
      result.phones.clear();
      result.lattice.clear();
    } else {
      throw OovError(result.oov);
    }
  }
  return result;
}

}  // namespace phonerr
