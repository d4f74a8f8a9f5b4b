#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sentinel {

enum class ErrorCode {
  // archive
  UnsupportedFormat,
  PathTraversal,
  LimitExceeded,
  CorruptArchive,
  // textfeat / features
  EmptyCorpus,
  TooFewExamples,
  // ml
  SingleClassData,
  NonfiniteLoss,
  WidthMismatch,
  BadMagic,
  VersionUnsupported,
  Corrupt,
  // eval
  ClassTooSmall,
  LengthMismatch,
  Empty,
  // general
  IoError,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace sentinel
