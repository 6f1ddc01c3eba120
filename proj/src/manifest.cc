#include "phonerr/manifest.h"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "phonerr/error.h"

namespace phonerr {

namespace fs = std::filesystem;

bool IsSafeId(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' &&
        c != '.') {
      return false;
    }
  }
  return true;
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string TextField(const nlohmann::json& u, const std::string& inline_key,
                      const std::string& file_key, const fs::path& base_dir,
                      const std::string& context) {
  bool has_inline = u.contains(inline_key);
  bool has_file = u.contains(file_key);
  if (has_inline == has_file) {
    throw ValidationError(fmt::format("{}: give exactly one of '{}' or '{}'",
                                      context, inline_key, file_key));
  }
  if (has_inline) return u.at(inline_key).get<std::string>();
  fs::path p = base_dir / u.at(file_key).get<std::string>();
  if (!fs::exists(p)) {
    throw ValidationError(
        fmt::format("{}: file '{}' does not exist", context, p.string()));
  }
  return ReadTextFile(p);
}

}  // namespace

CorpusManifest ParseManifest(std::string_view json_text,
                             const fs::path& base_dir) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("manifest: {}", e.what()));
  }
  CorpusManifest manifest;
  try {
    std::set<std::string> speaker_ids;
    for (const auto& s : root.at("speakers")) {
      SpeakerEntry speaker;
      speaker.speaker_id = s.at("speaker_id").get<std::string>();
      speaker.l1_label = s.value("l1", std::string());
      if (!IsSafeId(speaker.speaker_id)) {
        throw ValidationError(
            fmt::format("speaker id '{}' is not a safe file name", speaker.speaker_id));
      }
      if (!speaker_ids.insert(speaker.speaker_id).second) {
        throw ValidationError(
            fmt::format("duplicate speaker id '{}'", speaker.speaker_id));
      }
      std::set<std::string> utterance_ids;
      for (const auto& u : s.at("utterances")) {
        UtteranceEntry utt;
        utt.utterance_id = u.at("id").get<std::string>();
        std::string context =
            fmt::format("speaker {} utterance {}", speaker.speaker_id, utt.utterance_id);
        if (!IsSafeId(utt.utterance_id)) {
          throw ValidationError(
              fmt::format("{}: id is not a safe file name", context));
        }
        if (!utterance_ids.insert(utt.utterance_id).second) {
          throw ValidationError(fmt::format("{}: duplicate utterance id", context));
        }
        utt.prompt_text = TextField(u, "prompt", "prompt_file", base_dir, context);
        utt.asr_text = TextField(u, "asr", "asr_file", base_dir, context);
        if (u.contains("annotation")) {
          fs::path p = base_dir / u.at("annotation").get<std::string>();
          if (!fs::exists(p)) {
            throw ValidationError(fmt::format(
                "{}: annotation '{}' does not exist", context, p.string()));
          }
          utt.annotation = p;
        }
        speaker.utterances.push_back(std::move(utt));
      }
      manifest.speakers.push_back(std::move(speaker));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("manifest: {}", e.what()));
  }
  return manifest;
}

CorpusManifest LoadManifest(const fs::path& path) {
  return ParseManifest(ReadTextFile(path), path.parent_path());
}

}  // namespace phonerr
