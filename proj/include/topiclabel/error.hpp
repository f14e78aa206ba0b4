#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topiclabel {

enum class ErrorCode {
  EmptyWord,
  EmptyTopic,
  InvalidVector,
  DimMismatch,
  ZeroVector,
  EmptyInput,
  BackendUnavailable,
  NetworkError,
  RateLimited,
  CacheMiss,
  EmptySeeds,
  EmptyGraph,
  EmptyTokens,
  EmptyReferences,
  MissingReferences,
  TopicMismatch,
  ParseError,
  DuplicateTopicId,
  EmptyDataset,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace topiclabel
