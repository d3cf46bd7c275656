#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topicmine/corpus.hpp"

namespace topicmine {

/// Corpus with known topics, used by tests and the `synth` command.
/// Document d belongs to company d mod n_companies, and company c writes
/// about topic c mod n_topics. Topic vocabularies are disjoint (also after
/// stemming) and Zipf-weighted; each document draws `topic_share` of its
/// content words from its own topic and the rest uniformly from the other
/// topics. Stop-words and punctuation are mixed in as filler.
struct PlantedSpec {
  int n_docs = 60;
  int n_topics = 4;
  int n_companies = 8;
  int words_per_topic = 40;
  int min_length = 80;
  int max_length = 120;
  double topic_share = 0.8;
  std::uint64_t seed = 7;
};

struct PlantedCorpus {
  std::vector<RawDocument> documents;
  std::vector<int> topic_of_doc;
  /// Topic vocabularies as generated (unstemmed).
  std::vector<std::vector<std::string>> topic_words;
};

/// Throws ConfigError for non-positive sizes, n_topics > n_companies,
/// min_length > max_length or a share outside (0, 1].
PlantedCorpus make_planted_corpus(const PlantedSpec& spec = {});

/// One JSON object per document, ready for load_corpus.
std::string to_jsonl(const std::vector<RawDocument>& docs);

}  // namespace topicmine
