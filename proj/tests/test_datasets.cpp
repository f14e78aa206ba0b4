#include <random>

#include "doctest.h"
#include "test_support.hpp"
#include "topiclabel/datasets.hpp"
#include "topiclabel/io_util.hpp"

using namespace topiclabel;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("datasets") {
  TEST_CASE("minimal JSONL topic") {
    const auto topics = parse_topics_jsonl(R"({"id":"t1","words":["a","b"],"references":["x"]})");
    REQUIRE(topics.size() == 1);
    CHECK(topics[0].id() == "t1");
    CHECK(topics[0].words() == std::vector<std::string>{"a", "b"});
    CHECK(topics[0].references() == std::vector<std::string>{"x"});
  }

  TEST_CASE("JSONL skips blank lines, normalizes and reports line numbers") {
    const auto topics = parse_topics_jsonl("\n{\"id\":\"t1\",\"words\":[\" Hockey \"]}\n\n{\"id\":\"t2\",\"words\":[\"b\"],"
                                           "\"references\":[\" Ice Hockey \"]}\n");
    REQUIRE(topics.size() == 2);
    CHECK(topics[0].words() == std::vector<std::string>{"hockey"});
    CHECK(topics[0].references().empty());
    CHECK(topics[1].references() == std::vector<std::string>{"ice hockey"});

    const std::string bad = "{\"id\":\"t1\",\"words\":[\"a\"]}\n{\"id\":\"t2\",\"words\":[]}\n";
    CHECK(code_of([&] { parse_topics_jsonl(bad); }) == ErrorCode::ParseError);
    CHECK(message_of([&] { parse_topics_jsonl(bad); }).find("line 2") != std::string::npos);
    CHECK(message_of([&] { parse_topics_jsonl("{\"id\":\"t\"}\n"); }).find("line 1") != std::string::npos);
    CHECK(code_of([&] { parse_topics_jsonl("[1,2]"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { parse_topics_jsonl("{\"id\":\"t\",\"words\":[\"a\"],\"references\":[\"  \"]}"); }) ==
          ErrorCode::ParseError);
  }

  TEST_CASE("duplicate ids and empty datasets are rejected") {
    const std::string dup = "{\"id\":\"t\",\"words\":[\"a\"]}\n{\"id\":\"t\",\"words\":[\"b\"]}\n";
    CHECK(code_of([&] { parse_topics_jsonl(dup); }) == ErrorCode::DuplicateTopicId);
    CHECK(code_of([&] { parse_topics_jsonl("\n\n"); }) == ErrorCode::EmptyDataset);
    CHECK(code_of([&] { parse_bhatia_csv("topic_id,domain,terms,label,avg_rating\n"); }) == ErrorCode::EmptyDataset);
    CHECK(code_of([&] { parse_newsgroups_tsv(""); }) == ErrorCode::EmptyDataset);
  }

  TEST_CASE("Bhatia CSV filters low-rated labels but keeps the topic") {
    const auto topics = load_topics({"bhatia", DatasetFormat::BhatiaCsv, testing::fixture_dir() / "bhatia_sample.csv"});
    REQUIRE(topics.size() == 3);
    CHECK(topics[0].id() == "b1");
    CHECK(topics[0].words() == std::vector<std::string>{"election", "vote", "party", "campaign", "poll"});
    CHECK(topics[0].references() == std::vector<std::string>{"election", "politics, voting"});
    CHECK(topics[1].references() == std::vector<std::string>{"gene expression"});
    CHECK(topics[2].references().empty());

    const auto report = validate_bhatia(topics);
    CHECK(report.topic_count == 3);
    CHECK(report.reference_pairs == 3);
    CHECK(report.zero_reference_topics == std::vector<std::string>{"b3"});
    CHECK(report.words_per_topic == std::map<std::size_t, std::size_t>{{4, 2}, {5, 1}});
  }

  TEST_CASE("Bhatia rating threshold is inclusive; header is optional") {
    const auto topics = parse_bhatia_csv("t1,d,a b,exact,2.0\nt1,d,a b,below,1.99\nt2,d,c,other,0\n");
    REQUIRE(topics.size() == 2);
    CHECK(topics[0].references() == std::vector<std::string>{"exact"});
    const auto report = validate_bhatia(topics);
    CHECK(report.reference_pairs == 1);
    CHECK(report.zero_reference_topics == std::vector<std::string>{"t2"});
  }

  TEST_CASE("Bhatia CSV errors carry line numbers") {
    CHECK(message_of([] { parse_bhatia_csv("t1,d,a b,x,2.5\nt1,d,a b,x\n"); }).find("line 2") != std::string::npos);
    CHECK(message_of([] { parse_bhatia_csv("t1,d,a b,x,high\n"); }).find("line 1") != std::string::npos);
    CHECK(message_of([] { parse_bhatia_csv("t1,d,a b,x,2\nt1,d,a c,y,3\n"); }).find("line 2") != std::string::npos);
    CHECK(code_of([] { parse_bhatia_csv("t1,d,,x,2\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_bhatia_csv("t1,d,\"a b,x,2\n"); }) == ErrorCode::ParseError);
  }

  TEST_CASE("split_csv_line honours quoting") {
    CHECK(split_csv_line("a,\"b,c\",\"d \"\"e\"\"\",") == std::vector<std::string>{"a", "b,c", "d \"e\"", ""});
    CHECK(split_csv_line("") == std::vector<std::string>{""});
  }

  TEST_CASE("newsgroups sample has 20 topics of 10 words") {
    const auto topics =
        load_topics({"newsgroups", DatasetFormat::NewsgroupsTsv, testing::fixture_dir() / "newsgroups_sample.tsv"});
    REQUIRE(topics.size() == 20);
    CHECK(topics[0].id() == "ng-01");
    CHECK(topics[19].id() == "ng-20");
    CHECK(topics[10].references() == std::vector<std::string>{"hockey"});
    for (const auto& t : topics) {
      CHECK(t.words().size() == kNewsgroupsWordsPerTopic);
      CHECK(t.references().size() == 1);
    }
  }

  TEST_CASE("newsgroups rows must have exactly ten words") {
    CHECK(message_of([] { parse_newsgroups_tsv("x\ta\tb\n"); }).find("line 1") != std::string::npos);
    CHECK(code_of([] { parse_newsgroups_tsv("\ta\tb\tc\td\te\tf\tg\th\ti\tj\n"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_newsgroups_tsv("x\ta\tb\tc\td\te\tf\tg\th\ti\t\n"); }) == ErrorCode::ParseError);
  }

  TEST_CASE("missing files and unknown formats") {
    CHECK(code_of([] { load_topics({"x", DatasetFormat::TopicsJsonl, "/nonexistent/topics.jsonl"}); }) == ErrorCode::Io);
    CHECK(dataset_format_from_string("bhatia_csv") == DatasetFormat::BhatiaCsv);
    CHECK(to_string(DatasetFormat::NewsgroupsTsv) == "newsgroups_tsv");
    CHECK(code_of([] { dataset_format_from_string("xml"); }) == ErrorCode::InvalidConfig);
  }

  TEST_CASE("JSONL export round-trips every format") {
    const auto bhatia = load_topics({"b", DatasetFormat::BhatiaCsv, testing::fixture_dir() / "bhatia_sample.csv"});
    const auto ng = load_topics({"n", DatasetFormat::NewsgroupsTsv, testing::fixture_dir() / "newsgroups_sample.tsv"});
    CHECK(parse_topics_jsonl(to_jsonl(bhatia)) == bhatia);
    CHECK(parse_topics_jsonl(to_jsonl(ng)) == ng);

    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Topic> topics;
      const auto n = 1 + trial % 7;
      for (int i = 0; i < n; ++i) {
        topics.emplace_back("id-" + std::to_string(i), testing::random_words(rng, 1, 12),
                            testing::random_words(rng, 0, 3));
      }
      const auto text = to_jsonl(topics);
      CHECK(parse_topics_jsonl(text) == topics);
      CHECK(to_jsonl(parse_topics_jsonl(text)) == text);
    }
  }
}
