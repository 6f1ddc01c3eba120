// Corpus manifest: speakers, their L1 and per-utterance texts.
//
// {
//   "speakers": [
//     {
//       "speaker_id": "ABA",
//       "l1": "Arabic",                       (optional)
//       "utterances": [
//         {
//           "id": "arctic_a0001",
//           "prompt": "inline text"  | "prompt_file": "relative/path.txt",
//           "asr": "inline text"     | "asr_file": "relative/path.txt",
//           "annotation": "relative/path.csv" or ".TextGrid"   (optional)
//         }
//       ]
//     }
//   ]
// }
//
// Relative paths resolve against the manifest's directory.

#ifndef PHONERR_MANIFEST_H_
#define PHONERR_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace phonerr {

struct UtteranceEntry {
  std::string utterance_id;
  std::string prompt_text;
  std::string asr_text;
  std::optional<std::filesystem::path> annotation;
};

struct SpeakerEntry {
  std::string speaker_id;
  std::string l1_label;
  std::vector<UtteranceEntry> utterances;
};

struct CorpusManifest {
  std::vector<SpeakerEntry> speakers;
};

// Loads file-referenced texts eagerly. Throws ParseError for malformed JSON
// and ValidationError for duplicate ids, ids unusable as file names, or
// missing referenced files.
CorpusManifest ParseManifest(std::string_view json_text,
                             const std::filesystem::path& base_dir);
CorpusManifest LoadManifest(const std::filesystem::path& path);

// Letters, digits, '_', '-', '.'; not empty, not "." or "..".
bool IsSafeId(std::string_view id);

std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace phonerr

#endif  // PHONERR_MANIFEST_H_
