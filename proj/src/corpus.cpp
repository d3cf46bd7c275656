#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "topicmine/corpus.hpp"
#include "topicmine/error.hpp"

namespace topicmine {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string required_string(const json& record, const char* key, std::size_t line) {
  const auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw CorpusError("line " + std::to_string(line) + ": missing or non-string field '" + key +
                      "'");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& record, const char* key, std::size_t line) {
  const auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw CorpusError("line " + std::to_string(line) + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

void validate(const RawDocument& doc, std::unordered_set<std::string>& seen,
              const std::string& where) {
  if (doc.doc_id.empty()) throw CorpusError(where + ": empty doc_id");
  if (doc.company_id.empty()) {
    throw CorpusError(where + ": empty company_id for document '" + doc.doc_id + "'");
  }
  if (trim(doc.text).empty()) {
    throw CorpusError(where + ": document '" + doc.doc_id + "' has empty text");
  }
  if (!seen.insert(doc.doc_id).second) {
    throw CorpusError(where + ": duplicate doc_id '" + doc.doc_id + "'");
  }
}

Corpus load_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read " + path.string());

  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!record.is_object()) {
      throw CorpusError("line " + std::to_string(line_no) + ": record is not a JSON object");
    }
    RawDocument doc;
    doc.doc_id = required_string(record, "doc_id", line_no);
    doc.company_id = required_string(record, "company_id", line_no);
    doc.text = required_string(record, "text", line_no);
    if (const auto it = record.find("year"); it != record.end() && !it->is_null()) {
      if (!it->is_number_integer()) {
        throw CorpusError("line " + std::to_string(line_no) + ": field 'year' must be an integer");
      }
      doc.year = it->get<int>();
    }
    doc.report_type = optional_string(record, "report_type", line_no);
    doc.category = optional_string(record, "category", line_no);
    validate(doc, seen, "line " + std::to_string(line_no));
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) {
    corpus.warnings.push_back("corpus " + path.string() + " contains no documents");
  }
  return corpus;
}

std::map<std::string, std::string> load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read manifest " + path.string());
  std::map<std::string, std::string> companies;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos) {
      throw CorpusError(path.string() + " line " + std::to_string(line_no) +
                        ": expected doc_id,company_id");
    }
    const std::string doc_id(trim(row.substr(0, comma)));
    const std::string company_id(trim(row.substr(comma + 1)));
    if (line_no == 1 && doc_id == "doc_id" && company_id == "company_id") continue;
    if (!companies.emplace(doc_id, company_id).second) {
      throw CorpusError(path.string() + " line " + std::to_string(line_no) +
                        ": duplicate doc_id '" + doc_id + "'");
    }
  }
  return companies;
}

Corpus load_text_dir(const fs::path& dir, const std::optional<fs::path>& manifest) {
  if (!fs::is_directory(dir)) throw CorpusError(dir.string() + " is not a directory");
  const auto companies = load_manifest(manifest.value_or(dir / "manifest.csv"));

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  std::unordered_set<std::string> seen;
  for (const auto& file : files) {
    RawDocument doc;
    doc.doc_id = file.stem().string();
    const auto company = companies.find(doc.doc_id);
    if (company == companies.end()) {
      throw CorpusError(file.string() + ": no company_id in manifest for '" + doc.doc_id + "'");
    }
    doc.company_id = company->second;
    doc.text = read_file(file);
    validate(doc, seen, file.string());
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) {
    corpus.warnings.push_back("directory " + dir.string() + " contains no .txt documents");
  }
  return corpus;
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "text-dir") return CorpusFormat::kTextDir;
  throw ConfigError("unknown corpus format '" + std::string(name) + "' (expected jsonl or text-dir)");
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::kJsonl ? "jsonl" : "text-dir";
}

Corpus load_corpus(const fs::path& path, CorpusFormat format,
                   const std::optional<fs::path>& manifest) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw CorpusError("corpus path " + path.string() + " does not exist");
  return format == CorpusFormat::kJsonl ? load_jsonl(path) : load_text_dir(path, manifest);
}

bool MetadataFilter::matches(const RawDocument& doc) const {
  if (year_min || year_max) {
    if (!doc.year) return false;
    if (year_min && *doc.year < *year_min) return false;
    if (year_max && *doc.year > *year_max) return false;
  }
  if (category && doc.category != category) return false;
  if (report_type && doc.report_type != report_type) return false;
  return true;
}

std::vector<RawDocument> filter_documents(std::span<const RawDocument> docs,
                                          const MetadataFilter& filter) {
  std::vector<RawDocument> kept;
  std::copy_if(docs.begin(), docs.end(), std::back_inserter(kept),
               [&](const RawDocument& d) { return filter.matches(d); });
  return kept;
}

}  // namespace topicmine
