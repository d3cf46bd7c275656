#include <cctype>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "topicmine/error.hpp"
#include "topicmine/synthetic.hpp"

namespace topicmine {
namespace {

constexpr const char* kConsonants = "bdfgklmnprstvz";
constexpr const char* kVowels = "aeiou";

std::string pseudo_word(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> syllables(2, 4);
  std::uniform_int_distribution<int> consonant(0, 13);
  std::uniform_int_distribution<int> vowel(0, 4);
  std::string w;
  for (int s = syllables(rng); s > 0; --s) {
    w += kConsonants[consonant(rng)];
    w += kVowels[vowel(rng)];
  }
  return w;
}

}  // namespace

PlantedCorpus make_planted_corpus(const PlantedSpec& spec) {
  if (spec.n_docs < 1 || spec.n_topics < 1 || spec.n_companies < 1 || spec.words_per_topic < 1 ||
      spec.min_length < 1) {
    throw ConfigError("planted corpus sizes must be positive");
  }
  if (spec.n_topics > spec.n_companies) throw ConfigError("need at least one company per topic");
  if (spec.min_length > spec.max_length) throw ConfigError("min_length exceeds max_length");
  if (!(spec.topic_share > 0.0 && spec.topic_share <= 1.0)) {
    throw ConfigError("topic_share must lie in (0, 1]");
  }

  std::mt19937_64 rng(spec.seed);
  const StopwordList stops = StopwordList::defaults();
  PlantedCorpus out;

  std::set<std::string> stems;
  out.topic_words.resize(static_cast<std::size_t>(spec.n_topics));
  for (auto& words : out.topic_words) {
    while (static_cast<int>(words.size()) < spec.words_per_topic) {
      std::string w = pseudo_word(rng);
      if (stops.contains(w)) continue;
      std::string s = stem(w);
      if (s.size() < 3 || !stems.insert(s).second) continue;
      words.push_back(std::move(w));
    }
  }

  std::vector<double> zipf(static_cast<std::size_t>(spec.words_per_topic));
  for (std::size_t i = 0; i < zipf.size(); ++i) zipf[i] = 1.0 / static_cast<double>(i + 1);
  std::discrete_distribution<int> pick_word(zipf.begin(), zipf.end());
  std::uniform_int_distribution<int> length(spec.min_length, spec.max_length);
  std::uniform_int_distribution<int> other_topic(0, std::max(0, spec.n_topics - 2));
  std::bernoulli_distribution own(spec.topic_share);
  std::bernoulli_distribution filler(0.3);
  std::bernoulli_distribution stop_sentence(0.12);
  const std::vector<std::string> fillers{"the", "of", "and", "in", "to", "with", "for", "on",
                                         "was", "area", "report", "within"};
  std::uniform_int_distribution<std::size_t> pick_filler(0, fillers.size() - 1);

  for (int d = 0; d < spec.n_docs; ++d) {
    const int company = d % spec.n_companies;
    const int topic = company % spec.n_topics;
    RawDocument doc;
    char id[32];
    std::snprintf(id, sizeof id, "doc%03d", d);
    doc.doc_id = id;
    std::snprintf(id, sizeof id, "company%02d", company);
    doc.company_id = id;
    doc.year = 2000 + d % 10;
    doc.report_type = d % 2 == 0 ? "annual" : "final";

    std::string text;
    bool sentence_start = true;
    const int n = length(rng);
    for (int i = 0; i < n; ++i) {
      int t = topic;
      if (spec.n_topics > 1 && !own(rng)) {
        t = other_topic(rng);
        if (t >= topic) ++t;
      }
      std::string word = out.topic_words[static_cast<std::size_t>(t)][static_cast<std::size_t>(pick_word(rng))];
      if (filler(rng)) word = fillers[pick_filler(rng)] + " " + word;
      if (sentence_start) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
      if (!text.empty()) text += ' ';
      text += word;
      sentence_start = stop_sentence(rng);
      if (sentence_start) text += '.';
    }
    text += '.';
    doc.text = std::move(text);
    out.documents.push_back(std::move(doc));
    out.topic_of_doc.push_back(topic);
  }
  return out;
}

std::string to_jsonl(const std::vector<RawDocument>& docs) {
  std::ostringstream out;
  for (const auto& doc : docs) {
    nlohmann::ordered_json j;
    j["doc_id"] = doc.doc_id;
    j["company_id"] = doc.company_id;
    j["text"] = doc.text;
    if (doc.year) j["year"] = *doc.year;
    if (doc.report_type) j["report_type"] = *doc.report_type;
    if (doc.category) j["category"] = *doc.category;
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace topicmine
