#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topicmine/corpus.hpp"
#include "topicmine/error.hpp"
#include "topicmine/experiment.hpp"
#include "topicmine/export.hpp"
#include "topicmine/synthetic.hpp"
#include "topicmine/version.hpp"

namespace {

using namespace topicmine;

enum ExitCode { kOk = 0, kConfigError = 1, kCorpusError = 2, kPartialFailure = 3 };

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ConfigError("bad " + what + " '" + s + "'");
  return v;
}

// "2,3,4", "2..6" or a mix such as "2..4,8".
std::vector<int> parse_k_list(const std::string& spec) {
  std::vector<int> ks;
  for (const auto& item : split(spec, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      ks.push_back(parse_int(item, "k value"));
      continue;
    }
    const int lo = parse_int(item.substr(0, dots), "k range");
    const int hi = parse_int(item.substr(dots + 2), "k range");
    if (lo > hi) throw ConfigError("empty k range '" + item + "'");
    for (int k = lo; k <= hi; ++k) ks.push_back(k);
  }
  return ks;
}

void apply_filter(MetadataFilter& filter, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--filter expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  if (key == "year") {
    filter.year_min = filter.year_max = parse_int(value, "year");
  } else if (key == "year_min") {
    filter.year_min = parse_int(value, "year");
  } else if (key == "year_max") {
    filter.year_max = parse_int(value, "year");
  } else if (key == "category") {
    filter.category = value;
  } else if (key == "report_type") {
    filter.report_type = value;
  } else {
    throw ConfigError("unknown filter key '" + key + "'");
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
}

struct RunFlags {
  std::string config;
  std::string corpus;
  std::string format;
  std::string manifest;
  std::string methods;
  std::string k;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> min_df;
  std::string out;
  std::vector<std::string> filters;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> keyword_n;
  std::optional<double> margin;
};

RunConfig resolve(const RunFlags& flags) {
  RunConfig config = flags.config.empty() ? RunConfig{} : config_from_json(read_json_file(flags.config));
  if (!flags.corpus.empty()) config.corpus = flags.corpus;
  if (!flags.format.empty()) config.format = parse_corpus_format(flags.format);
  if (!flags.manifest.empty()) config.manifest = flags.manifest;
  if (!flags.methods.empty()) {
    config.methods.clear();
    for (const auto& m : split(flags.methods, ',')) config.methods.push_back(parse_method(m));
  }
  if (!flags.k.empty()) config.k_values = parse_k_list(flags.k);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.min_df) config.min_df = *flags.min_df;
  if (!flags.out.empty()) config.out = flags.out;
  for (const auto& f : flags.filters) apply_filter(config.filter, f);
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.keyword_n) config.keyword_n = *flags.keyword_n;
  if (flags.margin) config.selection_margin = *flags.margin;
  return config;
}

int run(const RunFlags& flags) {
  const RunConfig config = resolve(flags);
  const RunManifest manifest = run_experiment(config);

  for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "documents " << manifest.documents_used << " companies " << manifest.companies
            << " terms " << manifest.vocabulary_size << '\n';
  for (const auto& cell : manifest.cells) {
    const auto& s = cell.summary;
    std::cout << to_string(s.method) << " k=" << s.k << ' ';
    if (s.error) {
      std::cout << "FAILED " << *s.error << '\n';
      continue;
    }
    std::cout << "silhouette=" << (s.silhouette ? format_number(*s.silhouette) : "-")
              << " keyword_match=" << (s.keyword_match ? format_number(*s.keyword_match) : "-")
              << " decisiveness=" << (s.decisiveness ? format_number(*s.decisiveness) : "-") << '\n';
  }
  for (const auto& choice : manifest.selection.per_method) {
    if (choice.k == 0) continue;
    std::cout << "best " << to_string(choice.method) << " k=" << choice.k << '\n';
  }
  if (manifest.selection.overall) {
    std::cout << "best overall " << to_string(manifest.selection.overall->method)
              << " k=" << manifest.selection.overall->k << '\n';
  }
  std::cout << "wrote " << config.out.string() << '\n';
  return manifest.partial_failure() ? kPartialFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic model comparison over a document/company corpus"};
  app.set_version_flag("--version", std::string(topicmine::kVersion));
  app.require_subcommand(1);

  RunFlags flags;
  auto* run_cmd = app.add_subcommand("run", "Sweep K for each method, evaluate and write results");
  run_cmd->add_option("--config", flags.config, "JSON config file; flags override it");
  run_cmd->add_option("--corpus", flags.corpus, "Corpus file (jsonl) or directory (text-dir)");
  run_cmd->add_option("--format", flags.format, "jsonl or text-dir");
  run_cmd->add_option("--manifest", flags.manifest, "doc_id,company_id CSV for text-dir corpora");
  run_cmd->add_option("--methods", flags.methods, "Comma list from lda,nmf,ntf");
  run_cmd->add_option("--k", flags.k, "K values, e.g. 2..6 or 2,4,8");
  run_cmd->add_option("--seed", flags.seed, "Random seed");
  run_cmd->add_option("--min-df", flags.min_df, "Drop terms found in fewer documents");
  run_cmd->add_option("--out", flags.out, "Output directory");
  run_cmd->add_option("--filter", flags.filters,
                      "Metadata filter key=value (year, year_min, year_max, category, report_type)");
  run_cmd->add_option("--jobs", flags.jobs, "Cells to run in parallel");
  run_cmd->add_option("--keyword-n", flags.keyword_n, "Keywords compared per topic");
  run_cmd->add_option("--margin", flags.margin, "Silhouette margin for K candidates");

  topicmine::PlantedSpec spec;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a planted-topic JSONL corpus");
  synth_cmd->add_option("--out", synth_out, "Output file")->required();
  synth_cmd->add_option("--docs", spec.n_docs);
  synth_cmd->add_option("--topics", spec.n_topics);
  synth_cmd->add_option("--companies", spec.n_companies);
  synth_cmd->add_option("--words-per-topic", spec.words_per_topic);
  synth_cmd->add_option("--share", spec.topic_share, "Fraction of words from the document's topic");
  synth_cmd->add_option("--seed", spec.seed);

  std::string input;
  auto* pre_cmd = app.add_subcommand("preprocess", "Print the stems of a text (stdin by default)");
  pre_cmd->add_option("text", input, "Text to process");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run_cmd) return run(flags);
    if (*synth_cmd) {
      const auto corpus = topicmine::make_planted_corpus(spec);
      topicmine::write_file_atomic(synth_out, topicmine::to_jsonl(corpus.documents));
      return kOk;
    }
    if (*pre_cmd) {
      if (input.empty()) input.assign(std::istreambuf_iterator<char>(std::cin), {});
      topicmine::RawDocument doc{"stdin", "-", input, {}, {}, {}};
      const auto result = topicmine::preprocess(doc, topicmine::StopwordList::defaults());
      for (std::size_t i = 0; i < result.tokens.size(); ++i) {
        std::cout << (i ? " " : "") << result.tokens[i];
      }
      std::cout << '\n';
      return kOk;
    }
  } catch (const topicmine::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const topicmine::CorpusError& e) {
    std::cerr << "corpus error: " << e.what() << '\n';
    return kCorpusError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCorpusError;
  }
  return kOk;
}
