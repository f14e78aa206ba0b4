#include "topiclabel/core.hpp"

#include <cctype>
#include <cmath>

namespace topiclabel {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyWord: return "EmptyWord";
    case ErrorCode::EmptyTopic: return "EmptyTopic";
    case ErrorCode::InvalidVector: return "InvalidVector";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::CacheMiss: return "CacheMiss";
    case ErrorCode::EmptySeeds: return "EmptySeeds";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::EmptyTokens: return "EmptyTokens";
    case ErrorCode::EmptyReferences: return "EmptyReferences";
    case ErrorCode::MissingReferences: return "MissingReferences";
    case ErrorCode::TopicMismatch: return "TopicMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateTopicId: return "DuplicateTopicId";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string normalize_word(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    auto uc = static_cast<unsigned char>(c);
    if (c == '_' || std::isspace(uc)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyWord, "word is empty after normalization");
  return out;
}

Topic::Topic(std::string id, const std::vector<std::string>& words,
             std::vector<std::string> references)
    : id_(std::move(id)), references_(std::move(references)) {
  if (words.empty()) throw Error(ErrorCode::EmptyTopic, "topic '" + id_ + "' has no words");
  words_.reserve(words.size());
  for (const auto& w : words) words_.push_back(normalize_word(w));
}

EmbeddingVector::EmbeddingVector(std::vector<double> values, std::string model_id)
    : values_(std::move(values)), model_id_(std::move(model_id)) {
  if (values_.empty()) throw Error(ErrorCode::InvalidVector, "embedding has dimension 0");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidVector, "embedding has a non-finite component");
  }
}

std::string_view to_string(CandidateSource source) {
  return source == CandidateSource::TopicWord ? "topic_word" : "graph_node";
}

CandidateSource candidate_source_from_string(std::string_view text) {
  if (text == "topic_word") return CandidateSource::TopicWord;
  if (text == "graph_node") return CandidateSource::GraphNode;
  throw Error(ErrorCode::ParseError, "unknown candidate source '" + std::string(text) + "'");
}

}  // namespace topiclabel
