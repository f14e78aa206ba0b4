#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "topiclabel/core.hpp"

namespace topiclabel {

enum class DatasetFormat { TopicsJsonl, BhatiaCsv, NewsgroupsTsv };

std::string_view to_string(DatasetFormat format);
DatasetFormat dataset_format_from_string(std::string_view text);

struct DatasetSpec {
  std::string name;
  DatasetFormat format = DatasetFormat::TopicsJsonl;
  std::filesystem::path path;
};

/// Minimum average rating for a Bhatia label to count as a reference.
inline constexpr double kBhatiaMinRating = 2.0;
inline constexpr std::size_t kNewsgroupsWordsPerTopic = 10;

/// Loads and validates a topic file.
///
/// topics_jsonl: one {"id", "words", "references"} object per line; blank
///   lines are skipped.
/// bhatia_csv: columns topic_id, domain, terms (space separated), label,
///   avg_rating; one row per (topic, label) pair. A header row is optional.
///   Rows rated below 2.0 are dropped but their topic is still loaded.
/// newsgroups_tsv: label followed by exactly ten words, tab separated. Topic
///   ids are "ng-01", "ng-02", ... in file order.
///
/// References are trimmed and lowercased. Throws ParseError (with the line
/// number), DuplicateTopicId or EmptyDataset.
std::vector<Topic> load_topics(const DatasetSpec& spec);

std::vector<Topic> parse_topics_jsonl(std::string_view text);
std::vector<Topic> parse_bhatia_csv(std::string_view text);
std::vector<Topic> parse_newsgroups_tsv(std::string_view text);

std::string to_jsonl(const std::vector<Topic>& topics);

struct ValidationReport {
  std::size_t topic_count = 0;
  std::size_t reference_pairs = 0;
  std::vector<std::string> zero_reference_topics;
  std::map<std::size_t, std::size_t> words_per_topic;  // word count -> topics
};

ValidationReport validate_bhatia(const std::vector<Topic>& topics);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace topiclabel
