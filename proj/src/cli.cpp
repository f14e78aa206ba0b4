#include "topiclabel/cli.hpp"

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "topiclabel/conceptnet.hpp"
#include "topiclabel/datasets.hpp"
#include "topiclabel/embedding.hpp"
#include "topiclabel/evaluation.hpp"
#include "topiclabel/graph.hpp"
#include "topiclabel/io_util.hpp"
#include "topiclabel/labeling.hpp"
#include "topiclabel/parallel.hpp"

namespace topiclabel {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct EmbedderOptions {
  std::string kind = "test-hash";
  std::string url;
  std::string model;
  std::size_t batch_size = 32;
  int timeout_ms = 30000;

  void attach(CLI::App& app) {
    app.add_option("--embedder", kind, "Embedding backend")->check(CLI::IsMember({"test-hash", "http"}));
    app.add_option("--embedder-url", url, "Embedding service base URL (selects the http backend)");
    app.add_option("--model", model, "Embedding model id");
    app.add_option("--batch-size", batch_size, "Texts per embedding request")->check(CLI::PositiveNumber);
    app.add_option("--timeout-ms", timeout_ms, "Embedding request timeout")->check(CLI::PositiveNumber);
  }

  EmbedderConfig config(const std::optional<fs::path>& cache_dir) const {
    EmbedderConfig c;
    const bool http = kind == "http" || !url.empty() || !env_or("TOPICLABEL_EMBED_URL", "").empty();
    c.backend = http ? EmbedderBackendKind::Http : EmbedderBackendKind::TestHash;
    c.endpoint_url = url;
    c.model_id = model.empty() ? (http ? "all-MiniLM-L6-v2" : "test-hash") : model;
    c.batch_size = batch_size;
    c.timeout_ms = timeout_ms;
    c.cache_dir = cache_dir;
    return c;
  }
};

struct ExpansionOptions {
  ExpansionConfig expansion;
  bool keep_expanding = false;
  bool offline = false;
  double rate = 2.0;

  void attach(CLI::App& app) {
    app.add_option("--hops", expansion.max_hops, "Maximum expansion rounds")->check(CLI::PositiveNumber);
    app.add_option("--edge-limit", expansion.per_term_edge_limit, "Edges requested per term")
        ->check(CLI::Range(1, 1000));
    app.add_option("--max-nodes", expansion.max_nodes, "Node cap for one graph")->check(CLI::PositiveNumber);
    app.add_flag("--no-stop-when-connected", keep_expanding, "Keep expanding after the seeds connect");
    app.add_flag("--offline", offline, "Serve ConceptNet only from the cache directory");
    app.add_option("--rate", rate, "ConceptNet requests per second")->check(CLI::PositiveNumber);
  }

  ExpansionConfig config() const {
    auto c = expansion;
    c.stop_when_connected = !keep_expanding;
    return c;
  }

  ConceptNetConfig client_config(const std::optional<fs::path>& cache_dir) const {
    ConceptNetConfig c;
    c.cache_dir = cache_dir;
    c.offline = offline;
    c.requests_per_second = rate;
    return c;
  }
};

std::optional<fs::path> resolve_cache_dir(const std::string& flag) {
  auto dir = flag.empty() ? env_or("TOPICLABEL_CACHE_DIR", "") : flag;
  if (dir.empty()) return std::nullopt;
  return fs::path(dir);
}

ordered_json embedder_json(const EmbedderConfig& c) {
  return {{"backend", c.backend == EmbedderBackendKind::Http ? "http" : "test-hash"},
          {"endpoint_url", c.endpoint_url},
          {"model_id", c.model_id},
          {"batch_size", c.batch_size}};
}

ordered_json expansion_json(const ExpansionConfig& c, const ConceptNetConfig& client) {
  return {{"max_hops", c.max_hops},
          {"per_term_edge_limit", c.per_term_edge_limit},
          {"max_nodes", c.max_nodes},
          {"stop_when_connected", c.stop_when_connected},
          {"offline", client.offline},
          {"conceptnet_url", env_or("TOPICLABEL_CONCEPTNET_URL", client.base_url)}};
}

// Writes <out>.manifest.json next to an output file.
void write_manifest(const fs::path& out, const std::string& command, const std::vector<std::string>& args,
                    ordered_json config, const std::vector<fs::path>& inputs) {
  ordered_json inputs_json = ordered_json::array();
  for (const auto& in : inputs) {
    inputs_json.push_back({{"path", in.string()}, {"fnv1a64", to_hex(fnv1a64(read_file(in)))}});
  }
  ordered_json doc{{"tool", "topiclabel"},
                   {"version", kVersion},
                   {"command", command},
                   {"args", std::vector<std::string>(args.begin() + 1, args.end())},
                   {"config", std::move(config)},
                   {"inputs", std::move(inputs_json)}};
  auto path = out;
  path += ".manifest.json";
  atomic_write_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct LabelCommand {
  std::string algorithm = "dsl";
  std::string input;
  std::string format = "topics_jsonl";
  std::string out_path;
  std::string cache_dir;
  std::size_t parallelism = 4;
  EmbedderOptions embedder;
  ExpansionOptions expansion;

  int run(const std::vector<std::string>& args, std::ostream& err) const {
    const auto cache = resolve_cache_dir(cache_dir);
    const auto topics = load_topics({input, dataset_format_from_string(format), input});
    Embedder emb(embedder.config(cache));
    const auto exp_config = expansion.config();
    const auto client_config = expansion.client_config(cache);
    std::unique_ptr<ConceptNetClient> client;
    if (algorithm == "gel") {
      exp_config.validate();
      client = std::make_unique<ConceptNetClient>(client_config);
    }

    std::vector<std::string> lines(topics.size());
    std::vector<char> failed(topics.size(), 0);
    parallel_for_each_index(topics.size(), parallelism, [&](std::size_t i) {
      try {
        const auto result = algorithm == "gel" ? gel(topics[i], emb, exp_config, *client) : dsl(topics[i], emb);
        lines[i] = to_json_line(result);
      } catch (const std::exception& e) {
        failed[i] = 1;
        lines[i] = ordered_json{{"topic_id", topics[i].id()}, {"error", e.what()}}.dump();
      }
    });

    std::string body;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      body += lines[i];
      body += '\n';
      if (failed[i]) {
        ++failures;
        err << "topic " << topics[i].id() << " failed\n";
      }
    }
    atomic_write_file(out_path, body);

    ordered_json config{{"algorithm", algorithm},
                        {"format", format},
                        {"parallelism", parallelism},
                        {"embedder", embedder_json(emb.config())}};
    if (algorithm == "gel") config["expansion"] = expansion_json(exp_config, client_config);
    write_manifest(out_path, "label", args, std::move(config), {input});

    err << "labeled " << (topics.size() - failures) << "/" << topics.size() << " topics -> " << out_path << "\n";
    return failures == 0 ? kExitOk : kExitPartial;
  }
};

std::vector<LabelResult> read_results(const fs::path& path, std::ostream& err) {
  std::vector<LabelResult> results;
  std::istringstream in(read_file(path));
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded()) throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(lineno));
    if (obj.contains("error")) {
      err << "skipping failed topic " << obj.value("topic_id", "?") << "\n";
      continue;
    }
    results.push_back(label_result_from_json(line));
  }
  return results;
}

struct EvalCommand {
  std::string results_path;
  std::string input;
  std::string format = "topics_jsonl";
  std::string mode = "cosine";
  std::string out_path;
  std::string external;
  std::string external_scores;
  std::string cache_dir;
  std::size_t parallelism = 4;
  EmbedderOptions embedder;

  int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) const {
    const auto eval_mode = eval_mode_from_string(mode);
    const auto topics = load_topics({input, dataset_format_from_string(format), input});
    const auto results = read_results(results_path, err);

    EvalReport report;
    ordered_json config{{"mode", mode}, {"format", format}};
    if (!external.empty()) {
      if (eval_mode != EvalMode::BertScore) throw Error(ErrorCode::InvalidConfig, "--external needs --mode bertscore");
      const auto pairs = make_external_pairs(results, topics);
      if (external_scores.empty()) {
        atomic_write_file(external, external_pairs_json(pairs));
        err << "wrote " << pairs.size() << " pairs to " << external << "; score them and rerun with --external-scores\n";
        return kExitOk;
      }
      report = ingest_external_scores(pairs, read_file(external_scores));
      config["external_scores"] = external_scores;
    } else {
      const auto cache = resolve_cache_dir(cache_dir);
      Embedder emb(embedder.config(cache));
      report = evaluate_corpus(results, topics, eval_mode, emb, parallelism);
      config["embedder"] = embedder_json(emb.config());
    }

    out << report.to_table();
    if (!out_path.empty()) {
      atomic_write_file(out_path, report.to_json());
      std::vector<fs::path> inputs{results_path, input};
      if (!external_scores.empty()) inputs.emplace_back(external_scores);
      write_manifest(out_path, "eval", args, std::move(config), inputs);
    }
    return kExitOk;
  }
};

struct GraphExpandCommand {
  std::string seeds;
  std::string input;
  std::string format = "topics_jsonl";
  std::string topic_id;
  std::string out_path;
  std::string cache_dir;
  ExpansionOptions expansion;

  std::vector<std::string> seed_list() const {
    if (!seeds.empty()) {
      std::vector<std::string> out;
      std::istringstream in(seeds);
      for (std::string s; std::getline(in, s, ',');) {
        if (s.find_first_not_of(" \t") != std::string::npos) out.push_back(normalize_word(s));
      }
      if (out.empty()) throw Error(ErrorCode::EmptySeeds, "--seeds is empty");
      return out;
    }
    if (input.empty()) throw Error(ErrorCode::EmptySeeds, "give --seeds or --input");
    const auto topics = load_topics({input, dataset_format_from_string(format), input});
    if (topic_id.empty()) return topics.front().words();
    for (const auto& t : topics) {
      if (t.id() == topic_id) return t.words();
    }
    throw Error(ErrorCode::TopicMismatch, "no topic '" + topic_id + "' in " + input);
  }

  int run(const std::vector<std::string>& args, std::ostream& out) const {
    const auto cache = resolve_cache_dir(cache_dir);
    const auto seed_terms = seed_list();
    const auto client_config = expansion.client_config(cache);
    ConceptNetClient client(client_config);
    const auto exp_config = expansion.config();
    const auto graph = expand_graph(seed_terms, exp_config, client);
    const auto components = connected_components(graph);

    if (!out_path.empty()) {
      atomic_write_file(out_path, graph.to_json());
      ordered_json config{{"seeds", seed_terms}, {"expansion", expansion_json(exp_config, client_config)}};
      std::vector<fs::path> inputs;
      if (!input.empty() && seeds.empty()) inputs.emplace_back(input);
      write_manifest(out_path, "graph expand", args, std::move(config), inputs);
    }
    out << "seeds: " << graph.seed_terms().size() << "\n"
        << "rounds: " << graph.query_rounds().size() << "\n"
        << "nodes: " << graph.node_count() << "\n"
        << "edges: " << graph.edges().size() << "\n"
        << "components: " << components.size() << "\n"
        << "seeds connected: " << (seeds_connected(graph) ? "yes" : "no") << "\n";
    return kExitOk;
  }
};

struct DatasetCommand {
  std::string from = "bhatia_csv";
  std::string to = "topics_jsonl";
  std::string input;
  std::string out_path;

  int convert() const {
    if (to != "topics_jsonl") throw Error(ErrorCode::InvalidConfig, "only topics_jsonl output is supported");
    const auto topics = load_topics({input, dataset_format_from_string(from), input});
    atomic_write_file(out_path, to_jsonl(topics));
    return kExitOk;
  }

  int stats(std::ostream& out) const {
    const auto topics = load_topics({input, dataset_format_from_string(from), input});
    const auto report = validate_bhatia(topics);
    out << "topics: " << report.topic_count << "\n"
        << "reference pairs: " << report.reference_pairs << "\n"
        << "topics without references: " << report.zero_reference_topics.size() << "\n";
    for (const auto& id : report.zero_reference_topics) out << "  " << id << "\n";
    out << "words per topic:\n";
    for (const auto& [words, count] : report.words_per_topic) out << "  " << words << ": " << count << "\n";
    return kExitOk;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topic labeling from topic-model word lists", "topiclabel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  LabelCommand label;
  auto* label_cmd = app.add_subcommand("label", "Label every topic in a dataset");
  label_cmd->add_option("--algorithm", label.algorithm, "dsl or gel")->check(CLI::IsMember({"dsl", "gel"}));
  label_cmd->add_option("--input", label.input, "Topic file")->required();
  label_cmd->add_option("--format", label.format, "topics_jsonl, bhatia_csv or newsgroups_tsv");
  label_cmd->add_option("--out", label.out_path, "Output JSONL")->required();
  label_cmd->add_option("--cache-dir", label.cache_dir, "Cache directory (default $TOPICLABEL_CACHE_DIR)");
  label_cmd->add_option("--parallelism", label.parallelism, "Topics labeled concurrently")->check(CLI::PositiveNumber);
  label.embedder.attach(*label_cmd);
  label.expansion.attach(*label_cmd);

  EvalCommand eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score labels against gold references");
  eval_cmd->add_option("--results", eval.results_path, "Output of `label`")->required();
  eval_cmd->add_option("--input", eval.input, "Topic file with references")->required();
  eval_cmd->add_option("--format", eval.format, "topics_jsonl, bhatia_csv or newsgroups_tsv");
  eval_cmd->add_option("--mode", eval.mode, "cosine or bertscore")->check(CLI::IsMember({"cosine", "bertscore"}));
  eval_cmd->add_option("--out", eval.out_path, "JSON report");
  eval_cmd->add_option("--external", eval.external, "Pairs file for an external BERTScore scorer");
  eval_cmd->add_option("--external-scores", eval.external_scores, "Scores produced by the external scorer");
  eval_cmd->add_option("--cache-dir", eval.cache_dir, "Cache directory (default $TOPICLABEL_CACHE_DIR)");
  eval_cmd->add_option("--parallelism", eval.parallelism, "Topics scored concurrently")->check(CLI::PositiveNumber);
  eval.embedder.attach(*eval_cmd);

  GraphExpandCommand graph;
  auto* graph_cmd = app.add_subcommand("graph", "Knowledge-graph tools");
  graph_cmd->require_subcommand(1);
  auto* expand_cmd = graph_cmd->add_subcommand("expand", "Expand seed terms through ConceptNet");
  expand_cmd->add_option("--seeds", graph.seeds, "Comma-separated seed terms");
  expand_cmd->add_option("--input", graph.input, "Take seeds from a topic file");
  expand_cmd->add_option("--format", graph.format, "Format of --input");
  expand_cmd->add_option("--topic", graph.topic_id, "Topic id within --input (default: first)");
  expand_cmd->add_option("--out", graph.out_path, "Graph JSON export");
  expand_cmd->add_option("--cache-dir", graph.cache_dir, "Cache directory (default $TOPICLABEL_CACHE_DIR)");
  graph.expansion.attach(*expand_cmd);

  DatasetCommand dataset;
  auto* dataset_cmd = app.add_subcommand("dataset", "Dataset tools");
  dataset_cmd->require_subcommand(1);
  auto* convert_cmd = dataset_cmd->add_subcommand("convert", "Convert a dataset to topics_jsonl");
  convert_cmd->add_option("--from", dataset.from, "Source format");
  convert_cmd->add_option("--to", dataset.to, "Target format (topics_jsonl)");
  convert_cmd->add_option("--input", dataset.input, "Source file")->required();
  convert_cmd->add_option("--out", dataset.out_path, "Destination file")->required();
  auto* stats_cmd = dataset_cmd->add_subcommand("stats", "Count topics, references and words per topic");
  stats_cmd->add_option("--from", dataset.from, "Source format");
  stats_cmd->add_option("--input", dataset.input, "Source file")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (*label_cmd) return label.run(args, err);
    if (*eval_cmd) return eval.run(args, out, err);
    if (*expand_cmd) return graph.run(args, out);
    if (*convert_cmd) return dataset.convert();
    if (*stats_cmd) return dataset.stats(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace topiclabel
