#include "phonerr/error.h"

#include <utility>

namespace phonerr {

namespace {

std::string OovMessage(const std::vector<std::string>& words) {
  std::string msg = "out-of-vocabulary words:";
  for (const auto& w : words) {
    msg += ' ';
    msg += w;
  }
  return msg;
}

}  // namespace

OovError::OovError(std::vector<std::string> words)
    : std::runtime_error(OovMessage(words)), words_(std::move(words)) {}

}  // namespace phonerr
