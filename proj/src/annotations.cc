#include "phonerr/annotations.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>

#include <fmt/format.h>

#include "phonerr/error.h"
#include "phonerr/lexicon.h"

namespace phonerr {

std::string_view AnnotationKindName(AnnotationKind kind) {
  switch (kind) {
    case AnnotationKind::kCorrect: return "correct";
    case AnnotationKind::kSubstitution: return "substitution";
    case AnnotationKind::kDeletion: return "deletion";
    case AnnotationKind::kInsertion: return "insertion";
  }
  return "?";
}

void ValidateRecord(const AnnotationRecord& r, const PhonemeInventory& inv) {
  if (!inv.Contains(r.target) || !inv.Contains(r.observed)) {
    throw ValidationError("annotation phone outside the inventory");
  }
  const bool t_eps = inv.IsEpsilon(r.target);
  const bool o_eps = inv.IsEpsilon(r.observed);
  bool ok = false;
  switch (r.kind) {
    case AnnotationKind::kCorrect:
      ok = !t_eps && r.target == r.observed;
      break;
    case AnnotationKind::kSubstitution:
      ok = !t_eps && !o_eps && r.target != r.observed;
      break;
    case AnnotationKind::kDeletion:
      ok = !t_eps && o_eps;
      break;
    case AnnotationKind::kInsertion:
      ok = t_eps && !o_eps;
      break;
  }
  if (!ok) {
    throw ValidationError(fmt::format("{} -> {} is inconsistent with kind {}",
                                      inv.Label(r.target), inv.Label(r.observed),
                                      AnnotationKindName(r.kind)));
  }
}

namespace {

std::string Trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(Trim(s.substr(start, pos == std::string_view::npos
                                           ? std::string_view::npos
                                           : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<AnnotationKind> KindFromName(std::string_view name) {
  for (auto k : {AnnotationKind::kCorrect, AnnotationKind::kSubstitution,
                 AnnotationKind::kDeletion, AnnotationKind::kInsertion}) {
    if (AnnotationKindName(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

AnnotationSet ParseAnnotationCsv(std::istream& in,
                                 const PhonemeInventory& inventory,
                                 std::string speaker_id) {
  AnnotationSet set{std::move(speaker_id), {}};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::map<std::string, std::size_t, std::less<>> last_position;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto cells = Split(line, ',');
    if (!header_seen) {
      if (cells != std::vector<std::string>{"utterance", "position", "target",
                                            "observed", "kind"}) {
        throw ParseError(fmt::format(
            "line {}: expected header utterance,position,target,observed,kind",
            line_no));
      }
      header_seen = true;
      continue;
    }
    auto fail = [&](const std::string& what) {
      return ParseError(fmt::format("line {}: {}", line_no, what));
    };
    if (cells.size() != 5) throw fail("expected 5 fields");
    AnnotationRecord r;
    r.utterance_id = cells[0];
    if (r.utterance_id.empty()) throw fail("empty utterance id");
    const std::string& pos = cells[1];
    auto [ptr, ec] = std::from_chars(pos.data(), pos.data() + pos.size(), r.position);
    if (pos.empty() || ec != std::errc() || ptr != pos.data() + pos.size()) {
      throw fail(fmt::format("bad position '{}'", pos));
    }
    auto target = inventory.Find(cells[2]);
    if (!target) throw fail(fmt::format("unknown phoneme '{}'", cells[2]));
    auto observed = inventory.Find(cells[3]);
    if (!observed) throw fail(fmt::format("unknown phoneme '{}'", cells[3]));
    auto kind = KindFromName(cells[4]);
    if (!kind) throw fail(fmt::format("unknown kind '{}'", cells[4]));
    r.target = *target;
    r.observed = *observed;
    r.kind = *kind;
    try {
      ValidateRecord(r, inventory);
    } catch (const ValidationError& e) {
      throw fail(e.what());
    }
    auto [it, inserted] = last_position.try_emplace(r.utterance_id, r.position);
    if (!inserted) {
      if (r.position < it->second) {
        throw fail(fmt::format("position {} decreases within utterance {}",
                               r.position, r.utterance_id));
      }
      it->second = r.position;
    }
    set.records.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("annotation CSV has no header");
  return set;
}

void WriteAnnotationCsv(std::ostream& out, const AnnotationSet& set,
                        const PhonemeInventory& inventory) {
  out << "utterance,position,target,observed,kind\n";
  for (const auto& r : set.records) {
    out << r.utterance_id << ',' << r.position << ','
        << inventory.Label(r.target) << ',' << inventory.Label(r.observed)
        << ',' << AnnotationKindName(r.kind) << '\n';
  }
}

// ---------------------------------------------------------------------------
// TextGrid
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Type { kNumber, kString, kFlag } type;
  std::string text;
  std::size_t offset;
};

// Praat's text serialization is self-delimiting once labels ("xmin =",
// "item [1]:", ...) are discarded, and the remaining token stream is the
// same for the long and short forms.
std::vector<Token> TokenizeTextGrid(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < text.size()) {
    char c = text[i];
    if (c == '"') {
      std::size_t start = i++;
      std::string value;
      while (true) {
        if (i >= text.size()) {
          throw ParseError(
              fmt::format("TextGrid byte {}: unterminated string", start));
        }
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            value += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        value += text[i++];
      }
      tokens.push_back({Token::kString, std::move(value), start});
    } else if (c == '<') {
      std::size_t start = i;
      auto close = text.find('>', i);
      if (close == std::string_view::npos) {
        throw ParseError(fmt::format("TextGrid byte {}: unterminated flag", start));
      }
      tokens.push_back(
          {Token::kFlag, std::string(text.substr(i, close - i + 1)), start});
      i = close + 1;
    } else if (c == '[') {
      auto close = text.find(']', i);
      if (close == std::string_view::npos) {
        throw ParseError(fmt::format("TextGrid byte {}: unterminated index", i));
      }
      i = close + 1;
    } else if (c == '!') {
      // Comment to end of line.
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (is_digit(c) || ((c == '-' || c == '+' || c == '.') &&
                               i + 1 < text.size() &&
                               (is_digit(text[i + 1]) || text[i + 1] == '.'))) {
      std::size_t start = i++;
      while (i < text.size() &&
             (is_digit(text[i]) || text[i] == '.' || text[i] == 'e' ||
              text[i] == 'E' || text[i] == '-' || text[i] == '+')) {
        ++i;
      }
      tokens.push_back(
          {Token::kNumber, std::string(text.substr(start, i - start)), start});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '_')) {
        ++i;
      }
    } else {
      ++i;
    }
  }
  return tokens;
}

class TokenReader {
 public:
  TokenReader(std::vector<Token> tokens, std::size_t end_offset)
      : tokens_(std::move(tokens)), end_offset_(end_offset) {}

  const Token& Next(Token::Type type, std::string_view what) {
    if (pos_ >= tokens_.size()) {
      throw ParseError(fmt::format(
          "TextGrid byte {}: unexpected end of input, expected {}", end_offset_,
          what));
    }
    const Token& t = tokens_[pos_];
    if (t.type != type) {
      throw ParseError(fmt::format("TextGrid byte {}: expected {}, found '{}'",
                                   t.offset, what, t.text));
    }
    ++pos_;
    return t;
  }

  bool PeekIs(Token::Type type) const {
    return pos_ < tokens_.size() && tokens_[pos_].type == type;
  }

  double Number(std::string_view what) {
    const Token& t = Next(Token::kNumber, what);
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw ParseError(
          fmt::format("TextGrid byte {}: bad number '{}'", t.offset, t.text));
    }
    return v;
  }

  std::size_t Count(std::string_view what) {
    std::size_t offset = pos_ < tokens_.size() ? tokens_[pos_].offset : end_offset_;
    double v = Number(what);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ParseError(fmt::format("TextGrid byte {}: bad count for {}", offset, what));
    }
    return static_cast<std::size_t>(v);
  }

  std::string String(std::string_view what) {
    return Next(Token::kString, what).text;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t end_offset_;
  std::size_t pos_ = 0;
};

struct Tier {
  std::string name;
  bool interval = true;
  std::vector<std::string> labels;
};

std::vector<Tier> ReadTiers(std::string_view text) {
  TokenReader reader(TokenizeTextGrid(text), text.size());
  if (reader.String("file type") != "ooTextFile") {
    throw ParseError("TextGrid byte 0: file type is not ooTextFile");
  }
  if (reader.String("object class") != "TextGrid") {
    throw ParseError("TextGrid byte 0: object class is not TextGrid");
  }
  reader.Number("xmin");
  reader.Number("xmax");
  std::vector<Tier> tiers;
  if (reader.PeekIs(Token::kFlag)) {
    const Token& flag = reader.Next(Token::kFlag, "tiers flag");
    if (flag.text != "<exists>") return tiers;
  }
  std::size_t tier_count = reader.Count("tier count");
  for (std::size_t t = 0; t < tier_count; ++t) {
    Tier tier;
    const Token& cls = reader.Next(Token::kString, "tier class");
    if (cls.text != "IntervalTier" && cls.text != "TextTier") {
      throw ParseError(fmt::format("TextGrid byte {}: unknown tier class '{}'",
                                   cls.offset, cls.text));
    }
    tier.interval = cls.text == "IntervalTier";
    tier.name = reader.String("tier name");
    reader.Number("tier xmin");
    reader.Number("tier xmax");
    std::size_t n = reader.Count("item count");
    for (std::size_t k = 0; k < n; ++k) {
      reader.Number("time");
      if (tier.interval) reader.Number("interval xmax");
      tier.labels.push_back(reader.String("label"));
    }
    tiers.push_back(std::move(tier));
  }
  return tiers;
}

std::optional<PhoneId> LabelPhone(const std::string& label,
                                  const LabelConvention& convention,
                                  const PhonemeInventory& inventory) {
  if (convention.epsilon_spellings.count(label)) return inventory.epsilon();
  std::string upper = label;
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  try {
    return StripStress(upper, inventory);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

std::optional<AnnotationRecord> RecordFromLabel(
    const std::string& label, const LabelConvention& convention,
    const PhonemeInventory& inventory) {
  auto parts = Split(label, convention.separator);
  AnnotationRecord r;
  if (parts.size() == 1) {
    if (convention.epsilon_spellings.count(parts[0])) return std::nullopt;
    auto phone = LabelPhone(parts[0], convention, inventory);
    if (!phone) return std::nullopt;
    r.target = r.observed = *phone;
    r.kind = AnnotationKind::kCorrect;
  } else if (parts.size() == 3) {
    auto target = LabelPhone(parts[0], convention, inventory);
    auto observed = LabelPhone(parts[1], convention, inventory);
    if (!target || !observed) return std::nullopt;
    const std::string& code = parts[2];
    if (code == convention.substitution_code) {
      r.kind = AnnotationKind::kSubstitution;
    } else if (code == convention.deletion_code) {
      r.kind = AnnotationKind::kDeletion;
      observed = inventory.epsilon();
    } else if (code == convention.insertion_code) {
      r.kind = AnnotationKind::kInsertion;
      target = inventory.epsilon();
    } else {
      return std::nullopt;
    }
    r.target = *target;
    r.observed = *observed;
  } else {
    return std::nullopt;
  }
  try {
    ValidateRecord(r, inventory);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  return r;
}

}  // namespace

TextGridResult ParseTextGrid(std::string_view text, std::string_view tier_name,
                             const LabelConvention& convention,
                             const PhonemeInventory& inventory,
                             std::string utterance_id) {
  auto tiers = ReadTiers(text);
  auto it = std::find_if(tiers.begin(), tiers.end(),
                         [&](const Tier& t) { return t.name == tier_name; });
  if (it == tiers.end()) {
    std::string names;
    for (const auto& t : tiers) {
      if (!names.empty()) names += ", ";
      names += t.name;
    }
    throw ValidationError(fmt::format("tier '{}' not found; available tiers: {}",
                                      tier_name, names.empty() ? "(none)" : names));
  }
  TextGridResult result;
  std::size_t position = 0;
  for (const auto& raw : it->labels) {
    std::string label = Trim(raw);
    if (convention.ignored_labels.count(label)) continue;
    auto record = RecordFromLabel(label, convention, inventory);
    if (!record) {
      result.skipped_labels.push_back(label);
      continue;
    }
    record->utterance_id = utterance_id;
    record->position = position++;
    result.set.records.push_back(std::move(*record));
  }
  return result;
}

ConfusionMatrix AnnotationsToConfusion(const AnnotationSet& set,
                                       InventoryPtr inventory) {
  ConfusionMatrix matrix(std::move(inventory));
  for (const auto& r : set.records) matrix.Add(r.target, r.observed);
  return matrix;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

std::vector<PhoneId> LowestRecognitionTargets(const ConfusionMatrix& asr,
                                              std::size_t k,
                                              Count min_occurrences) {
  const auto& inv = *asr.inventory();
  std::vector<std::pair<Rate, PhoneId>> candidates;
  for (PhoneId p = 0; p < static_cast<PhoneId>(asr.size()); ++p) {
    if (inv.IsEpsilon(p)) continue;
    Count total = asr.RowTotal(p);
    if (total == 0 || total < min_occurrences) continue;
    candidates.push_back({RecognitionRate(asr, p), p});
  }
  // Compare a/b < c/d exactly as a*d < c*b.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& x, const auto& y) {
                     return x.first.numerator * y.first.denominator <
                            y.first.numerator * x.first.denominator;
                   });
  std::vector<PhoneId> out;
  for (std::size_t i = 0; i < candidates.size() && i < k; ++i) {
    out.push_back(candidates[i].second);
  }
  return out;
}

namespace {

void FillSide(const ConfusionMatrix& m, PhoneId target, std::optional<Rate>& rate,
              std::optional<Substitute>& mcs) {
  if (m.RowTotal(target) == 0) return;
  rate = RecognitionRate(m, target);
  mcs = MostCommonSubstitute(m, target);
}

}  // namespace

ComparisonTable Compare(const ConfusionMatrix& asr, const ConfusionMatrix* ha,
                        const TargetSelection& selection, std::string group) {
  if (ha && !SameInventory(asr.inventory(), ha->inventory())) {
    throw ValidationError("ASR and annotation matrices use different inventories");
  }
  ComparisonTable table;
  table.group = std::move(group);
  table.has_annotations = ha != nullptr;
  std::vector<PhoneId> targets =
      selection.targets.empty()
          ? LowestRecognitionTargets(asr, selection.top_k,
                                     selection.min_occurrences)
          : selection.targets;
  for (PhoneId t : targets) {
    if (!asr.inventory()->Contains(t) || asr.inventory()->IsEpsilon(t)) {
      throw ValidationError("comparison target must be a non-epsilon phoneme");
    }
    ComparisonRow row{t, {}, {}, {}, {}};
    FillSide(asr, t, row.asr_rate, row.asr_mcs);
    if (ha) FillSide(*ha, t, row.ha_rate, row.ha_mcs);
    table.rows.push_back(row);
  }
  return table;
}

namespace {

constexpr std::string_view kUndefined = "n/a";
constexpr std::string_view kAbsent = "absent";
constexpr std::string_view kNoSubstitute = "-";

std::vector<std::vector<std::string>> RenderCells(
    const ComparisonTable& table, const PhonemeInventory& inv, bool slashed) {
  auto phone = [&](PhoneId p) {
    return slashed ? "/" + inv.Label(p) + "/" : inv.Label(p);
  };
  auto rate = [&](const std::optional<Rate>& r, bool present) {
    if (!present) return std::string(kAbsent);
    return r ? FormatPercent(*r) : std::string(kUndefined);
  };
  auto mcs = [&](const std::optional<Rate>& r, const std::optional<Substitute>& s,
                 bool present) {
    if (!present) return std::string(kAbsent);
    if (!r) return std::string(kUndefined);
    return s ? phone(s->phone) : std::string(kNoSubstitute);
  };
  auto mcs_rate = [&](const std::optional<Rate>& r,
                      const std::optional<Substitute>& s, bool present) {
    if (!present) return std::string(kAbsent);
    if (!r) return std::string(kUndefined);
    return s ? FormatPercent(s->rate) : std::string(kNoSubstitute);
  };
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : table.rows) {
    bool ha = table.has_annotations;
    rows.push_back({table.group, phone(row.target), rate(row.asr_rate, true),
                    rate(row.ha_rate, ha), mcs(row.asr_rate, row.asr_mcs, true),
                    mcs(row.ha_rate, row.ha_mcs, ha),
                    mcs_rate(row.asr_rate, row.asr_mcs, true),
                    mcs_rate(row.ha_rate, row.ha_mcs, ha)});
  }
  return rows;
}

const std::vector<std::string> kHeader = {
    "group",       "target",     "rate_asr",        "rate_ha",
    "mcs_asr",     "mcs_ha",     "mcs_rate_asr",    "mcs_rate_ha"};

}  // namespace

void WriteComparisonCsv(std::ostream& out, const ComparisonTable& table,
                        const PhonemeInventory& inventory) {
  auto write = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  write(kHeader);
  for (const auto& row : RenderCells(table, inventory, false)) write(row);
}

void WriteComparisonText(std::ostream& out, const ComparisonTable& table,
                         const PhonemeInventory& inventory) {
  const std::vector<std::string> header = {
      "L1", "Target", "Rate (ASR)", "Rate (HA)",
      "MCS (ASR)", "MCS (HA)", "MCS Rate (ASR)", "MCS Rate (HA)"};
  auto rows = RenderCells(table, inventory, true);
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  auto write = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) line += "  ";
      line += cells[c];
      if (c + 1 < cells.size()) line.append(width[c] - cells[c].size(), ' ');
    }
    out << line << '\n';
  };
  write(header);
  for (const auto& row : rows) write(row);
}

}  // namespace phonerr
