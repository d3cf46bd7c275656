#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "topicmine/corpus.hpp"
#include "topicmine/types.hpp"

namespace topicmine {

/// Term <-> index bijection. Indices are ordered by descending corpus
/// frequency, ties broken lexicographically.
struct Vocabulary {
  std::unordered_map<std::string, std::size_t> term_to_index;
  std::vector<std::string> index_to_term;
  std::vector<std::int64_t> doc_freq;
  std::vector<std::int64_t> term_freq;

  std::size_t size() const { return index_to_term.size(); }
  /// Index of `term`, or -1 when it is out of vocabulary.
  std::ptrdiff_t find(const std::string& term) const;
};

/// Throws ConfigError when min_df < 1 and CorpusError when no document has
/// tokens.
Vocabulary build_vocabulary(std::span<const TokenizedDocument> docs, std::int64_t min_df = 1);

enum class Weighting { kTf, kTfIdf };

std::string_view to_string(Weighting w);

/// Sparse D x V document-term matrix, tagged with its weighting.
struct DocTermMatrix {
  SparseMatrix values;
  Weighting weighting = Weighting::kTf;

  Eigen::Index docs() const { return values.rows(); }
  Eigen::Index terms() const { return values.cols(); }
};

/// Raw counts. Out-of-vocabulary tokens are skipped.
DocTermMatrix tf_matrix(std::span<const TokenizedDocument> docs, const Vocabulary& vocab);

/// tf * (ln((1 + D) / (1 + df)) + 1), then each row scaled to unit L2 norm.
/// Document frequencies are taken from `docs`, not from the vocabulary.
DocTermMatrix tfidf_matrix(std::span<const TokenizedDocument> docs, const Vocabulary& vocab);

/// Sparse D x C x V tensor in coordinate form, entries sorted by (doc,
/// company, term). Each document occupies exactly one company slice.
struct DocCompanyTermTensor {
  struct Entry {
    std::int64_t doc;
    std::int64_t company;
    std::int64_t term;
    double value;
  };

  std::int64_t docs = 0;
  std::int64_t companies = 0;
  std::int64_t terms = 0;
  std::vector<Entry> entries;
  /// Company ids in index order (sorted lexicographically).
  std::vector<std::string> company_ids;
  std::map<std::string, std::int64_t> company_index;
  /// Company index of each document.
  std::vector<std::int64_t> doc_company;

  std::size_t nnz() const { return entries.size(); }
  double squared_norm() const;
};

/// Builds the tensor from TF counts. `company_of` maps doc_id to company_id;
/// a document missing from it raises CorpusError.
DocCompanyTermTensor build_tensor(std::span<const TokenizedDocument> docs, const Vocabulary& vocab,
                                  const std::map<std::string, std::string>& company_of);

/// Sums the company axis back into a D x V matrix.
SparseMatrix marginalize_companies(const DocCompanyTermTensor& tensor);

/// Sparse text format: "dims D V", then "row col value" lines sorted by
/// (row, col). Values use 12 significant digits.
void write_sparse(std::ostream& out, const DocTermMatrix& m);

/// Tensor variant: "dims D V C", then "doc term company value" lines sorted
/// lexicographically.
void write_sparse(std::ostream& out, const DocCompanyTermTensor& t);

}  // namespace topicmine
