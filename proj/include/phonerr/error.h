// Error types shared across the library.

#ifndef PHONERR_ERROR_H_
#define PHONERR_ERROR_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace phonerr {

// Malformed input text (lexicon, CSV grid, TextGrid, manifest, ...).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input parsed but violates a domain constraint.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Words missing from every lexicon the policy allowed us to consult.
class OovError : public std::runtime_error {
 public:
  explicit OovError(std::vector<std::string> words);
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
};

// A rate was requested for a target that never occurred.
class UndefinedRateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phonerr

#endif  // PHONERR_ERROR_H_
