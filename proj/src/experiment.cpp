#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <string>

#include "parallel.hpp"
#include "topicmine/error.hpp"
#include "topicmine/experiment.hpp"
#include "topicmine/export.hpp"
#include "topicmine/version.hpp"

namespace topicmine {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

ojson optional_number(const std::optional<double>& v) {
  return v ? ojson(output_rounded(*v)) : ojson(nullptr);
}

std::string optional_field(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::vector<double> rounded_trace(const std::vector<double>& trace) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (double v : trace) out.push_back(output_rounded(v));
  return out;
}

// Rows scaled to sum to one; zero rows stay zero.
Matrix l1_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double sum = out.row(r).sum();
    if (sum > 0.0) out.row(r) /= sum;
  }
  return out;
}

std::size_t distinct_labels(const std::vector<int>& labels) {
  return std::set<int>(labels.begin(), labels.end()).size();
}

SilhouetteSummary evaluate_silhouette(const Matrix& weights, const Assignment& assignment, int k,
                                      const std::string& what, SilhouetteResult& detail) {
  SilhouetteSummary s;
  if (k < 2) {
    s.notice = "K<2: silhouette needs at least two topics";
  } else if (assignment.labels.size() < 2) {
    s.notice = "fewer than two " + what;
  } else if (distinct_labels(assignment.labels) < 2) {
    s.notice = "every " + what.substr(0, what.size() - 1) + " has the same topic; silhouette undefined";
  } else {
    detail = silhouette(l1_rows(weights), assignment.labels);
    s.mean = detail.mean;
  }
  return s;
}

template <typename T>
void require_distinct(const std::vector<T>& values, const std::string& what) {
  std::set<T> seen;
  for (const auto& v : values) {
    if (!seen.insert(v).second) throw ConfigError("duplicate entry in " + what);
  }
}

const std::set<std::string>& known_keys(const std::string& section) {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"corpus", "format", "manifest", "filters", "extra_stopwords", "min_df", "methods",
            "k_values", "seed", "out", "jobs", "keyword_n", "selection_margin", "lda", "nmf", "ntf"}},
      {"filters", {"year_min", "year_max", "category", "report_type"}},
      {"lda", {"alpha", "beta", "max_iter", "tol", "e_step_tol", "e_step_max_iter", "jobs"}},
      {"nmf", {"max_iter", "tol", "epsilon"}},
      {"ntf", {"max_sweeps", "tol"}},
  };
  return keys.at(section);
}

void check_keys(const json& j, const std::string& section) {
  if (!j.is_object()) {
    throw ConfigError((section.empty() ? std::string("config") : section) + " must be an object");
  }
  const auto& allowed = known_keys(section);
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown config key '" + (section.empty() ? "" : section + ".") + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::string silhouette_csv(const CellResult& cell) {
  std::ostringstream out;
  out << "entity,id,label,silhouette\n";
  const auto rows = [&](const char* entity, const Assignment& a, const SilhouetteResult& s) {
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
      out << entity << ',' << csv_field(a.entity_ids[i]) << ',' << a.labels[i] << ','
          << (s.per_sample.empty() ? "" : format_number(s.per_sample[i])) << '\n';
    }
  };
  rows("document", cell.doc_assignment, cell.doc_silhouette);
  if (cell.company_assignment && cell.company_silhouette) {
    rows("company", *cell.company_assignment, *cell.company_silhouette);
  }
  return out.str();
}

std::string keywords_csv(const CellResult& cell) {
  std::ostringstream out;
  out << "topic,rank,keyword,group_term\n";
  for (std::size_t t = 0; t < cell.keywords.size(); ++t) {
    const auto& group = cell.group_terms.terms[t];
    for (std::size_t r = 0; r < cell.keywords[t].size(); ++r) {
      out << t << ',' << r + 1 << ',' << csv_field(cell.keywords[t][r]) << ','
          << (r < group.size() ? csv_field(group[r]) : "") << '\n';
    }
  }
  return out.str();
}

CellSummary summarize(const CellResult& cell) {
  CellSummary s;
  s.method = cell.method;
  s.k = cell.k;
  s.silhouette = cell.report.doc_silhouette.mean;
  if (cell.report.company_silhouette) s.company_silhouette = cell.report.company_silhouette->mean;
  s.keyword_match = cell.report.keyword_match.mean;
  if (cell.report.decisiveness) s.decisiveness = cell.report.decisiveness->value;
  return s;
}

// Missing values rank below every present one.
bool less_optional(const std::optional<double>& a, const std::optional<double>& b) {
  if (!b) return false;
  if (!a) return true;
  return *a < *b;
}

std::string status(const CellSummary& s) { return s.error ? "failed" : "ok"; }

}  // namespace

void RunConfig::validate() const {
  if (methods.empty()) throw ConfigError("no methods selected");
  require_distinct(methods, "methods");
  if (k_values.empty()) throw ConfigError("no k values given");
  require_distinct(k_values, "k_values");
  for (int k : k_values) {
    if (k < 1) throw ConfigError("k values must be >= 1, got " + std::to_string(k));
  }
  if (min_df < 1) throw ConfigError("min_df must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (keyword_n < 1) throw ConfigError("keyword_n must be >= 1");
  if (!(selection_margin >= 0.0)) throw ConfigError("selection_margin must be >= 0");
  if (out.empty()) throw ConfigError("output directory is empty");
}

StopwordList RunConfig::stopwords() const {
  StopwordList list = StopwordList::defaults();
  if (extra_stopwords) list.extra = {extra_stopwords->begin(), extra_stopwords->end()};
  return list;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    check_keys(j, "");
    if (j.contains("corpus")) c.corpus = j.at("corpus").get<std::string>();
    if (j.contains("format")) c.format = parse_corpus_format(j.at("format").get<std::string>());
    if (j.contains("manifest") && !j.at("manifest").is_null()) {
      c.manifest = std::filesystem::path(j.at("manifest").get<std::string>());
    }
    if (j.contains("filters")) {
      const json& f = j.at("filters");
      check_keys(f, "filters");
      read(f, "year_min", c.filter.year_min);
      read(f, "year_max", c.filter.year_max);
      read(f, "category", c.filter.category);
      read(f, "report_type", c.filter.report_type);
    }
    read(j, "extra_stopwords", c.extra_stopwords);
    read(j, "min_df", c.min_df);
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    read(j, "k_values", c.k_values);
    read(j, "seed", c.seed);
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    read(j, "jobs", c.jobs);
    read(j, "keyword_n", c.keyword_n);
    read(j, "selection_margin", c.selection_margin);
    if (j.contains("lda")) {
      const json& s = j.at("lda");
      check_keys(s, "lda");
      read(s, "alpha", c.lda.alpha);
      read(s, "beta", c.lda.beta);
      read(s, "max_iter", c.lda.max_iter);
      read(s, "tol", c.lda.tol);
      read(s, "e_step_tol", c.lda.e_step_tol);
      read(s, "e_step_max_iter", c.lda.e_step_max_iter);
      read(s, "jobs", c.lda.jobs);
    }
    if (j.contains("nmf")) {
      const json& s = j.at("nmf");
      check_keys(s, "nmf");
      read(s, "max_iter", c.nmf.max_iter);
      read(s, "tol", c.nmf.tol);
      read(s, "epsilon", c.nmf.epsilon);
    }
    if (j.contains("ntf")) {
      const json& s = j.at("ntf");
      check_keys(s, "ntf");
      read(s, "max_sweeps", c.ntf.max_sweeps);
      read(s, "tol", c.ntf.tol);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

ojson to_json(const RunConfig& c) {
  ojson j;
  j["corpus"] = c.corpus.string();
  j["format"] = to_string(c.format);
  j["manifest"] = c.manifest ? ojson(c.manifest->string()) : ojson(nullptr);
  ojson f;
  f["year_min"] = c.filter.year_min ? ojson(*c.filter.year_min) : ojson(nullptr);
  f["year_max"] = c.filter.year_max ? ojson(*c.filter.year_max) : ojson(nullptr);
  f["category"] = c.filter.category ? ojson(*c.filter.category) : ojson(nullptr);
  f["report_type"] = c.filter.report_type ? ojson(*c.filter.report_type) : ojson(nullptr);
  j["filters"] = f;
  const StopwordList stops = c.stopwords();
  j["extra_stopwords"] = std::vector<std::string>(stops.extra.begin(), stops.extra.end());
  j["min_df"] = c.min_df;
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.emplace_back(to_string(m));
  j["methods"] = methods;
  j["k_values"] = c.k_values;
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  j["jobs"] = c.jobs;
  j["keyword_n"] = c.keyword_n;
  j["selection_margin"] = output_rounded(c.selection_margin);
  ojson lda;
  lda["alpha"] = c.lda.alpha ? ojson(output_rounded(*c.lda.alpha)) : ojson("1/K");
  lda["beta"] = c.lda.beta ? ojson(output_rounded(*c.lda.beta)) : ojson("1/K");
  lda["max_iter"] = c.lda.max_iter;
  lda["tol"] = output_rounded(c.lda.tol);
  lda["e_step_tol"] = output_rounded(c.lda.e_step_tol);
  lda["e_step_max_iter"] = c.lda.e_step_max_iter;
  j["lda"] = lda;
  ojson nmf;
  nmf["max_iter"] = c.nmf.max_iter;
  nmf["tol"] = output_rounded(c.nmf.tol);
  nmf["epsilon"] = output_rounded(c.nmf.epsilon);
  j["nmf"] = nmf;
  ojson ntf;
  ntf["max_sweeps"] = c.ntf.max_sweeps;
  ntf["tol"] = output_rounded(c.ntf.tol);
  j["ntf"] = ntf;
  return j;
}

PreparedCorpus prepare_corpus(std::span<const RawDocument> docs, const RunConfig& config) {
  PreparedCorpus p;
  p.loaded = docs.size();
  if (docs.empty()) throw CorpusError("corpus has no documents");
  const std::vector<RawDocument> kept = filter_documents(docs, config.filter);
  p.after_filter = kept.size();
  if (kept.empty()) throw CorpusError("no documents left after metadata filtering");

  std::vector<TokenizedDocument> tokenized = preprocess_all(kept, config.stopwords(), config.jobs);
  std::vector<TokenizedDocument> nonempty;
  for (const auto& doc : tokenized) {
    if (!doc.empty) nonempty.push_back(doc);
  }
  if (nonempty.empty()) throw CorpusError("no document has any tokens after preprocessing");
  p.vocab = build_vocabulary(nonempty, config.min_df);

  std::map<std::string, std::string> company_of;
  for (const auto& doc : kept) company_of.emplace(doc.doc_id, doc.company_id);
  for (auto& doc : tokenized) {
    const bool used = std::any_of(doc.tokens.begin(), doc.tokens.end(),
                                  [&](const std::string& t) { return p.vocab.find(t) >= 0; });
    if (!used) {
      p.excluded.push_back(doc.doc_id);
      continue;
    }
    p.doc_ids.push_back(doc.doc_id);
    p.docs.push_back(std::move(doc));
  }
  if (!p.excluded.empty()) {
    p.warnings.push_back(std::to_string(p.excluded.size()) +
                         " document(s) have no in-vocabulary tokens and were left out");
  }
  p.tf = tf_matrix(p.docs, p.vocab);
  p.tfidf = tfidf_matrix(p.docs, p.vocab);
  p.tensor = build_tensor(p.docs, p.vocab, company_of);
  return p;
}

CellResult run_cell(const PreparedCorpus& corpus, Method method, int k, const RunConfig& config) {
  CellResult cell;
  cell.method = method;
  cell.k = k;
  ojson info;
  info["method"] = to_string(method);
  info["k"] = k;
  info["seed"] = config.seed;

  switch (method) {
    case Method::kLda: {
      LdaConfig lda = config.lda;
      lda.k = k;
      lda.seed = config.seed;
      LdaModel model = fit_lda(corpus.tf, lda);
      info["input"] = "tf";
      info["alpha"] = output_rounded(lda.resolved_alpha());
      info["beta"] = output_rounded(lda.resolved_beta());
      info["max_iter"] = lda.max_iter;
      info["tol"] = output_rounded(lda.tol);
      info["iterations"] = model.iterations;
      info["converged"] = model.converged;
      info["elbo_trace"] = rounded_trace(model.elbo_trace);
      cell.doc_topic = std::move(model.doc_topic);
      cell.topic_term = std::move(model.topic_term);
      break;
    }
    case Method::kNmf: {
      NmfOptions options = config.nmf;
      options.seed = config.seed;
      NmfModel model = fit_nmf(corpus.tfidf, k, options);
      normalize_topic_rows(model);
      info["input"] = "tfidf";
      info["init"] = "nndsvd";
      info["max_iter"] = options.max_iter;
      info["tol"] = output_rounded(options.tol);
      info["epsilon"] = output_rounded(options.epsilon);
      info["iterations"] = model.iterations;
      info["converged"] = model.converged;
      info["objective_trace"] = rounded_trace(model.objective_trace);
      cell.doc_topic = std::move(model.doc_topic);
      cell.topic_term = std::move(model.topic_term);
      break;
    }
    case Method::kNtf: {
      NtfOptions options = config.ntf;
      options.seed = config.seed;
      NtfModel model = fit_ntf(corpus.tensor, k, options);
      info["input"] = "tf tensor";
      info["solver"] = "hals";
      info["max_sweeps"] = options.max_sweeps;
      info["tol"] = output_rounded(options.tol);
      info["sweeps"] = model.sweeps;
      info["converged"] = model.converged;
      info["error_trace"] = rounded_trace(model.error_trace);
      ojson rescued = ojson::array();
      for (const auto& [mode, column] : model.rescued_columns) rescued.push_back({mode, column});
      info["rescued_columns"] = rescued;
      cell.doc_topic = std::move(model.doc_factor);
      cell.topic_term = model.term_factor.transpose();
      cell.company_topic = std::move(model.company_factor);
      break;
    }
  }
  cell.model_info = std::move(info);

  EvaluationReport& report = cell.report;
  report.method = method;
  report.k = k;
  report.n_docs = static_cast<std::int64_t>(corpus.doc_ids.size());
  cell.doc_assignment = argmax_assign(cell.doc_topic, corpus.doc_ids);
  report.doc_silhouette =
      evaluate_silhouette(cell.doc_topic, cell.doc_assignment, k, "documents", cell.doc_silhouette);
  report.topic_sizes = cell.doc_assignment.topic_sizes();

  if (cell.company_topic) {
    cell.company_assignment = argmax_assign(*cell.company_topic, corpus.tensor.company_ids);
    SilhouetteResult detail;
    report.company_silhouette =
        evaluate_silhouette(*cell.company_topic, *cell.company_assignment, k, "companies", detail);
    cell.company_silhouette = detail;
    report.company_topic_sizes = cell.company_assignment->topic_sizes();
  }

  std::size_t n = config.keyword_n;
  if (n > corpus.vocab.size()) {
    n = corpus.vocab.size();
    report.notices.push_back("keyword list shortened to the vocabulary size " + std::to_string(n));
  }
  report.keyword_n = n;
  cell.keywords = top_keywords(cell.topic_term, corpus.vocab, n);
  cell.group_terms = group_frequent_terms(corpus.tf, cell.doc_assignment, corpus.vocab, n);
  report.keyword_match = keyword_match_ratio(cell.keywords, cell.group_terms.terms);
  for (std::size_t t = 0; t < cell.group_terms.empty.size(); ++t) {
    if (cell.group_terms.empty[t]) {
      report.notices.push_back("topic " + std::to_string(t) + " has no documents");
    }
  }

  if (k < 2) {
    report.decisiveness_notice = "K<2: decisiveness needs at least two topics";
  } else if ((cell.doc_topic.array() == 0.0).rowwise().all().all()) {
    report.decisiveness_notice = "every document row is zero";
  } else {
    report.decisiveness = decisiveness(cell.doc_topic);
  }

  report.company_ids = corpus.tensor.company_ids;
  report.crosstab = company_topic_crosstab(corpus.tensor.doc_company, corpus.tensor.companies,
                                           cell.doc_assignment);
  return cell;
}

void write_cell(const std::filesystem::path& out, const PreparedCorpus& corpus, const CellResult& cell) {
  const std::filesystem::path dir =
      out / std::string(to_string(cell.method)) / ("k" + std::to_string(cell.k));
  std::vector<std::string> topics;
  for (int t = 0; t < cell.k; ++t) topics.push_back(std::to_string(t));

  write_file_atomic(dir / "doc_topic.csv", matrix_csv(cell.doc_topic, corpus.doc_ids, "doc_id", "topic"));
  write_file_atomic(dir / "topic_term.csv",
                    matrix_csv(cell.topic_term, topics, "topic", corpus.vocab.index_to_term));
  if (cell.company_topic) {
    write_file_atomic(dir / "company_topic.csv",
                      matrix_csv(*cell.company_topic, corpus.tensor.company_ids, "company_id", "topic"));
  }
  write_file_atomic(dir / "report.json", to_json(cell.report).dump(2) + "\n");
  write_file_atomic(dir / "model.json", cell.model_info.dump(2) + "\n");
  write_file_atomic(dir / "silhouette.csv", silhouette_csv(cell));
  write_file_atomic(dir / "keywords.csv", keywords_csv(cell));
}

Selection select_best(std::span<const CellSummary> summaries, double margin) {
  if (summaries.empty()) throw InputError("select_best: no results to choose from");

  std::vector<Method> methods;
  for (const auto& s : summaries) {
    if (std::find(methods.begin(), methods.end(), s.method) == methods.end()) methods.push_back(s.method);
  }

  Selection selection;
  for (Method method : methods) {
    std::vector<const CellSummary*> cells;
    for (const auto& s : summaries) {
      if (s.method == method && !s.error) cells.push_back(&s);
    }
    std::sort(cells.begin(), cells.end(), [](auto* a, auto* b) { return a->k < b->k; });

    MethodChoice choice;
    choice.method = method;
    if (cells.empty()) {
      choice.notices.push_back("every cell failed");
      selection.per_method.push_back(choice);
      continue;
    }
    if (cells.size() == 1) choice.notices.push_back("no sweep: only one K was run");

    std::optional<double> best_silhouette;
    for (const auto* c : cells) {
      if (less_optional(best_silhouette, c->silhouette)) best_silhouette = c->silhouette;
    }
    if (!best_silhouette) {
      choice.notices.push_back("no silhouette available; all Ks are candidates");
    }
    const CellSummary* winner = nullptr;
    for (const auto* c : cells) {
      if (best_silhouette && !(c->silhouette && *c->silhouette >= *best_silhouette - margin)) continue;
      choice.candidates.push_back(c->k);
      if (winner == nullptr || less_optional(winner->keyword_match, c->keyword_match)) winner = c;
    }
    choice.k = winner->k;
    choice.silhouette = winner->silhouette;
    choice.keyword_match = winner->keyword_match;
    selection.per_method.push_back(choice);
  }

  for (const auto& choice : selection.per_method) {
    if (choice.k == 0) continue;
    if (!selection.overall) {
      selection.overall = choice;
      continue;
    }
    const auto& best = *selection.overall;
    const bool better =
        less_optional(best.silhouette, choice.silhouette) ||
        (!less_optional(choice.silhouette, best.silhouette) && less_optional(best.keyword_match, choice.keyword_match));
    if (better) selection.overall = choice;
  }
  return selection;
}

ojson to_json(const Selection& selection) {
  const auto choice_json = [](const MethodChoice& c) {
    ojson j;
    j["method"] = to_string(c.method);
    j["k"] = c.k == 0 ? ojson(nullptr) : ojson(c.k);
    j["silhouette"] = optional_number(c.silhouette);
    j["keyword_match"] = optional_number(c.keyword_match);
    j["candidates"] = c.candidates;
    j["notices"] = c.notices;
    return j;
  };
  ojson j;
  j["per_method"] = ojson::array();
  for (const auto& c : selection.per_method) j["per_method"].push_back(choice_json(c));
  j["overall"] = selection.overall ? choice_json(*selection.overall) : ojson(nullptr);
  return j;
}

bool RunManifest::partial_failure() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellRecord& c) { return c.summary.error.has_value(); });
}

ojson to_json(const RunManifest& m) {
  ojson j;
  j["tool_version"] = m.version;
  j["config"] = to_json(m.config);
  ojson digest;
  digest["documents_loaded"] = m.documents_loaded;
  digest["documents_after_filter"] = m.documents_after_filter;
  digest["documents_used"] = m.documents_used;
  digest["excluded_documents"] = m.excluded_documents;
  digest["companies"] = m.companies;
  digest["vocabulary_size"] = m.vocabulary_size;
  digest["tf_nnz"] = m.tf_nnz;
  j["corpus"] = digest;
  ojson cells = ojson::array();
  for (const auto& c : m.cells) {
    ojson cell;
    cell["method"] = to_string(c.summary.method);
    cell["k"] = c.summary.k;
    cell["status"] = status(c.summary);
    if (c.summary.error) cell["error"] = *c.summary.error;
    cell["seconds"] = output_rounded(c.seconds);
    cells.push_back(cell);
  }
  j["cells"] = cells;
  j["selection"] = to_json(m.selection);
  j["warnings"] = m.warnings;
  return j;
}

std::string silhouette_by_k_csv(std::span<const CellSummary> cells) {
  std::ostringstream out;
  out << "method,k,doc_silhouette,company_silhouette,status\n";
  for (const auto& c : cells) {
    out << to_string(c.method) << ',' << c.k << ',' << optional_field(c.silhouette) << ','
        << optional_field(c.company_silhouette) << ',' << status(c) << '\n';
  }
  return out.str();
}

std::string keyword_match_by_k_csv(std::span<const CellSummary> cells) {
  std::ostringstream out;
  out << "method,k,keyword_match,status\n";
  for (const auto& c : cells) {
    out << to_string(c.method) << ',' << c.k << ',' << optional_field(c.keyword_match) << ','
        << status(c) << '\n';
  }
  return out.str();
}

std::string decisiveness_by_method_csv(std::span<const CellSummary> cells, const Selection& selection) {
  std::ostringstream out;
  out << "method,k,decisiveness,selected,status\n";
  for (const auto& c : cells) {
    bool selected = false;
    for (const auto& choice : selection.per_method) {
      if (choice.method == c.method && choice.k == c.k) selected = true;
    }
    out << to_string(c.method) << ',' << c.k << ',' << optional_field(c.decisiveness) << ','
        << (selected ? 1 : 0) << ',' << status(c) << '\n';
  }
  return out.str();
}

RunManifest run_experiment(std::span<const RawDocument> docs, const RunConfig& config) {
  config.validate();
  const PreparedCorpus corpus = prepare_corpus(docs, config);

  RunManifest manifest;
  manifest.config = config;
  manifest.version = std::string(kVersion);
  manifest.documents_loaded = corpus.loaded;
  manifest.documents_after_filter = corpus.after_filter;
  manifest.documents_used = corpus.doc_ids.size();
  manifest.excluded_documents = corpus.excluded;
  manifest.companies = corpus.tensor.company_ids.size();
  manifest.vocabulary_size = corpus.vocab.size();
  manifest.tf_nnz = static_cast<std::size_t>(corpus.tf.values.nonZeros());
  manifest.warnings = corpus.warnings;

  std::vector<int> ks = config.k_values;
  std::sort(ks.begin(), ks.end());
  for (Method method : config.methods) {
    for (int k : ks) {
      CellRecord record;
      record.summary.method = method;
      record.summary.k = k;
      manifest.cells.push_back(record);
    }
  }

  detail::parallel_for(manifest.cells.size(), config.jobs, [&](std::size_t i) {
    CellRecord& record = manifest.cells[i];
    const Method method = record.summary.method;
    const int k = record.summary.k;
    const auto start = std::chrono::steady_clock::now();
    try {
      const CellResult cell = run_cell(corpus, method, k, config);
      write_cell(config.out, corpus, cell);
      record.summary = summarize(cell);
    } catch (const std::exception& e) {
      record.summary.error = std::string(to_string(method)) + " k=" + std::to_string(k) + ": " + e.what();
    }
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  std::vector<CellSummary> summaries;
  for (const auto& c : manifest.cells) summaries.push_back(c.summary);
  manifest.selection = select_best(summaries, config.selection_margin);

  const std::filesystem::path summary_dir = config.out / "summary";
  write_file_atomic(summary_dir / "silhouette_by_k.csv", silhouette_by_k_csv(summaries));
  write_file_atomic(summary_dir / "keyword_match_by_k.csv", keyword_match_by_k_csv(summaries));
  write_file_atomic(summary_dir / "decisiveness_by_method.csv",
                    decisiveness_by_method_csv(summaries, manifest.selection));
  write_file_atomic(summary_dir / "selection.json", to_json(manifest.selection).dump(2) + "\n");
  write_file_atomic(summary_dir / "manifest.json", to_json(manifest).dump(2) + "\n");
  return manifest;
}

RunManifest run_experiment(const RunConfig& config) {
  config.validate();
  if (config.corpus.empty()) throw ConfigError("no corpus path given");
  const Corpus corpus = load_corpus(config.corpus, config.format, config.manifest);
  RunManifest manifest = run_experiment(corpus.documents, config);
  if (!corpus.warnings.empty()) {
    manifest.warnings.insert(manifest.warnings.begin(), corpus.warnings.begin(), corpus.warnings.end());
    write_file_atomic(config.out / "summary" / "manifest.json", to_json(manifest).dump(2) + "\n");
  }
  return manifest;
}

}  // namespace topicmine
