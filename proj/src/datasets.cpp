#include "topiclabel/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "topiclabel/io_util.hpp"

namespace topiclabel {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::TopicsJsonl: return "topics_jsonl";
    case DatasetFormat::BhatiaCsv: return "bhatia_csv";
    case DatasetFormat::NewsgroupsTsv: return "newsgroups_tsv";
  }
  return "unknown";
}

DatasetFormat dataset_format_from_string(std::string_view text) {
  if (text == "topics_jsonl") return DatasetFormat::TopicsJsonl;
  if (text == "bhatia_csv") return DatasetFormat::BhatiaCsv;
  if (text == "newsgroups_tsv") return DatasetFormat::NewsgroupsTsv;
  throw Error(ErrorCode::InvalidConfig, "unknown dataset format '" + std::string(text) + "'");
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string clean_reference(std::string_view raw) {
  std::string out = trim(raw);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t") == std::string_view::npos; }

void check_unique_and_nonempty(const std::vector<Topic>& topics) {
  if (topics.empty()) throw Error(ErrorCode::EmptyDataset, "dataset contains no topics");
  std::set<std::string_view> seen;
  for (const auto& t : topics) {
    if (!seen.insert(t.id()).second) throw Error(ErrorCode::DuplicateTopicId, "duplicate topic id '" + t.id() + "'");
  }
}

// Builds a Topic, turning core validation failures into line-numbered parse errors.
Topic make_topic(std::size_t line, std::string id, const std::vector<std::string>& words,
                 std::vector<std::string> references) {
  if (id.empty()) parse_error(line, "empty topic id");
  try {
    return Topic(std::move(id), words, std::move(references));
  } catch (const Error& e) {
    parse_error(line, e.what());
  }
}

}  // namespace

std::vector<Topic> parse_topics_jsonl(std::string_view text) {
  std::vector<Topic> topics;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (blank(lines[i])) continue;
    json obj;
    try {
      obj = json::parse(lines[i]);
    } catch (const json::exception& e) {
      parse_error(lineno, e.what());
    }
    if (!obj.is_object()) parse_error(lineno, "expected a JSON object");
    std::string id;
    std::vector<std::string> words;
    std::vector<std::string> refs;
    try {
      id = obj.at("id").get<std::string>();
      words = obj.at("words").get<std::vector<std::string>>();
      if (obj.contains("references")) {
        for (const auto& r : obj.at("references").get<std::vector<std::string>>()) {
          auto cleaned = clean_reference(r);
          if (cleaned.empty()) parse_error(lineno, "empty reference label");
          refs.push_back(std::move(cleaned));
        }
      }
    } catch (const json::exception& e) {
      parse_error(lineno, e.what());
    }
    topics.push_back(make_topic(lineno, std::move(id), words, std::move(refs)));
  }
  check_unique_and_nonempty(topics);
  return topics;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quoted field");
  return fields;
}

std::vector<Topic> parse_bhatia_csv(std::string_view text) {
  struct Pending {
    std::size_t line;
    std::vector<std::string> words;
    std::vector<std::string> refs;
  };
  std::vector<std::string> order;
  std::map<std::string, Pending> by_id;

  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (blank(lines[i])) continue;
    std::vector<std::string> cols;
    try {
      cols = split_csv_line(lines[i]);
    } catch (const Error& e) {
      parse_error(lineno, e.what());
    }
    if (cols.size() != 5) parse_error(lineno, "expected 5 columns, found " + std::to_string(cols.size()));
    const std::string id = trim(cols[0]);
    if (order.empty() && id == "topic_id") continue;  // header

    const std::string rating_text = trim(cols[4]);
    double rating = 0.0;
    auto [ptr, ec] = std::from_chars(rating_text.data(), rating_text.data() + rating_text.size(), rating);
    if (ec != std::errc() || ptr != rating_text.data() + rating_text.size()) {
      parse_error(lineno, "avg_rating '" + rating_text + "' is not a number");
    }

    std::vector<std::string> words;
    std::istringstream terms(cols[2]);
    for (std::string w; terms >> w;) words.push_back(std::move(w));
    if (words.empty()) parse_error(lineno, "topic has no terms");

    auto [it, fresh] = by_id.try_emplace(id, Pending{lineno, words, {}});
    if (fresh) {
      order.push_back(id);
    } else if (it->second.words != words) {
      parse_error(lineno, "terms for topic '" + id + "' differ from line " + std::to_string(it->second.line));
    }
    if (rating >= kBhatiaMinRating) {
      auto label = clean_reference(cols[3]);
      if (label.empty()) parse_error(lineno, "empty label");
      it->second.refs.push_back(std::move(label));
    }
  }

  std::vector<Topic> topics;
  topics.reserve(order.size());
  for (const auto& id : order) {
    auto& p = by_id.at(id);
    topics.push_back(make_topic(p.line, id, p.words, std::move(p.refs)));
  }
  check_unique_and_nonempty(topics);
  return topics;
}

std::vector<Topic> parse_newsgroups_tsv(std::string_view text) {
  std::vector<Topic> topics;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (blank(lines[i])) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      auto tab = lines[i].find('\t', start);
      cols.push_back(trim(std::string_view(lines[i]).substr(start, tab == std::string::npos ? std::string::npos : tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 1 + kNewsgroupsWordsPerTopic) {
      parse_error(lineno, "expected a label and " + std::to_string(kNewsgroupsWordsPerTopic) + " words, found " +
                              std::to_string(cols.size()) + " columns");
    }
    auto label = clean_reference(cols[0]);
    if (label.empty()) parse_error(lineno, "empty label");
    char id[16];
    std::snprintf(id, sizeof id, "ng-%02zu", topics.size() + 1);
    topics.push_back(make_topic(lineno, id, {cols.begin() + 1, cols.end()}, {std::move(label)}));
  }
  check_unique_and_nonempty(topics);
  return topics;
}

std::vector<Topic> load_topics(const DatasetSpec& spec) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(spec.path, ec)) {
    throw Error(ErrorCode::Io, "dataset file '" + spec.path.string() + "' does not exist");
  }
  const std::string text = read_file(spec.path);
  switch (spec.format) {
    case DatasetFormat::TopicsJsonl: return parse_topics_jsonl(text);
    case DatasetFormat::BhatiaCsv: return parse_bhatia_csv(text);
    case DatasetFormat::NewsgroupsTsv: return parse_newsgroups_tsv(text);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown dataset format");
}

std::string to_jsonl(const std::vector<Topic>& topics) {
  std::string out;
  for (const auto& t : topics) {
    ordered_json obj{{"id", t.id()}, {"words", t.words()}, {"references", t.references()}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

ValidationReport validate_bhatia(const std::vector<Topic>& topics) {
  ValidationReport report;
  report.topic_count = topics.size();
  for (const auto& t : topics) {
    report.reference_pairs += t.references().size();
    if (t.references().empty()) report.zero_reference_topics.push_back(t.id());
    ++report.words_per_topic[t.words().size()];
  }
  return report;
}

}  // namespace topiclabel
