#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "topicmine/error.hpp"
#include "topicmine/export.hpp"
#include "topicmine/vectorize.hpp"

namespace topicmine {
namespace {

using Triplet = Eigen::Triplet<double>;

// (term index, count) pairs for one document, sorted by term index.
std::vector<std::pair<std::size_t, std::int64_t>> count_terms(const TokenizedDocument& doc,
                                                              const Vocabulary& vocab) {
  std::map<std::size_t, std::int64_t> counts;
  for (const auto& token : doc.tokens) {
    const auto it = vocab.term_to_index.find(token);
    if (it != vocab.term_to_index.end()) ++counts[it->second];
  }
  return {counts.begin(), counts.end()};
}

}  // namespace

std::ptrdiff_t Vocabulary::find(const std::string& term) const {
  const auto it = term_to_index.find(term);
  return it == term_to_index.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

Vocabulary build_vocabulary(std::span<const TokenizedDocument> docs, std::int64_t min_df) {
  if (min_df < 1) throw ConfigError("min_df must be at least 1");
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> stats;  // term -> (df, tf)
  bool any_tokens = false;
  for (const auto& doc : docs) {
    std::set<std::string_view> seen;
    for (const auto& token : doc.tokens) {
      any_tokens = true;
      auto& entry = stats[token];
      ++entry.second;
      if (seen.insert(token).second) ++entry.first;
    }
  }
  if (!any_tokens) throw CorpusError("cannot build a vocabulary from an empty corpus");

  std::vector<std::tuple<std::string, std::int64_t, std::int64_t>> kept;
  for (const auto& [term, s] : stats) {
    if (s.first >= min_df) kept.emplace_back(term, s.first, s.second);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
    return std::get<0>(a) < std::get<0>(b);
  });

  Vocabulary vocab;
  vocab.index_to_term.reserve(kept.size());
  for (auto& [term, df, tf] : kept) {
    vocab.term_to_index.emplace(term, vocab.index_to_term.size());
    vocab.index_to_term.push_back(term);
    vocab.doc_freq.push_back(df);
    vocab.term_freq.push_back(tf);
  }
  return vocab;
}

std::string_view to_string(Weighting w) { return w == Weighting::kTf ? "tf" : "tfidf"; }

DocTermMatrix tf_matrix(std::span<const TokenizedDocument> docs, const Vocabulary& vocab) {
  std::vector<Triplet> triplets;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& [term, count] : count_terms(docs[d], vocab)) {
      triplets.emplace_back(static_cast<int>(d), static_cast<int>(term), static_cast<double>(count));
    }
  }
  DocTermMatrix m;
  m.weighting = Weighting::kTf;
  m.values.resize(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(vocab.size()));
  m.values.setFromTriplets(triplets.begin(), triplets.end());
  m.values.makeCompressed();
  return m;
}

DocTermMatrix tfidf_matrix(std::span<const TokenizedDocument> docs, const Vocabulary& vocab) {
  DocTermMatrix m = tf_matrix(docs, vocab);
  const auto n_docs = static_cast<double>(docs.size());

  std::vector<double> df(vocab.size(), 0.0);
  for (Eigen::Index d = 0; d < m.values.outerSize(); ++d) {
    for (SparseMatrix::InnerIterator it(m.values, d); it; ++it) df[static_cast<std::size_t>(it.col())] += 1.0;
  }
  std::vector<double> idf(vocab.size());
  for (std::size_t t = 0; t < idf.size(); ++t) idf[t] = std::log((1.0 + n_docs) / (1.0 + df[t])) + 1.0;

  for (Eigen::Index d = 0; d < m.values.outerSize(); ++d) {
    double sq = 0.0;
    for (SparseMatrix::InnerIterator it(m.values, d); it; ++it) {
      it.valueRef() *= idf[static_cast<std::size_t>(it.col())];
      sq += it.value() * it.value();
    }
    if (sq > 0.0) {
      const double norm = std::sqrt(sq);
      for (SparseMatrix::InnerIterator it(m.values, d); it; ++it) it.valueRef() /= norm;
    }
  }
  m.weighting = Weighting::kTfIdf;
  return m;
}

double DocCompanyTermTensor::squared_norm() const {
  double total = 0.0;
  for (const auto& e : entries) total += e.value * e.value;
  return total;
}

DocCompanyTermTensor build_tensor(std::span<const TokenizedDocument> docs, const Vocabulary& vocab,
                                  const std::map<std::string, std::string>& company_of) {
  DocCompanyTermTensor t;
  t.docs = static_cast<std::int64_t>(docs.size());
  t.terms = static_cast<std::int64_t>(vocab.size());

  std::vector<std::string> doc_companies;
  doc_companies.reserve(docs.size());
  for (const auto& doc : docs) {
    const auto it = company_of.find(doc.doc_id);
    if (it == company_of.end()) {
      throw CorpusError("document '" + doc.doc_id + "' has no company");
    }
    doc_companies.push_back(it->second);
    t.company_index.emplace(it->second, 0);
  }
  for (auto& [id, index] : t.company_index) {
    index = static_cast<std::int64_t>(t.company_ids.size());
    t.company_ids.push_back(id);
  }
  t.companies = static_cast<std::int64_t>(t.company_ids.size());

  for (std::size_t d = 0; d < docs.size(); ++d) {
    const std::int64_t company = t.company_index.at(doc_companies[d]);
    t.doc_company.push_back(company);
    for (const auto& [term, count] : count_terms(docs[d], vocab)) {
      t.entries.push_back({static_cast<std::int64_t>(d), company, static_cast<std::int64_t>(term),
                           static_cast<double>(count)});
    }
  }
  return t;
}

SparseMatrix marginalize_companies(const DocCompanyTermTensor& tensor) {
  std::vector<Triplet> triplets;
  triplets.reserve(tensor.entries.size());
  for (const auto& e : tensor.entries) {
    triplets.emplace_back(static_cast<int>(e.doc), static_cast<int>(e.term), e.value);
  }
  SparseMatrix m(tensor.docs, tensor.terms);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

void write_sparse(std::ostream& out, const DocTermMatrix& m) {
  out << "dims " << m.docs() << ' ' << m.terms() << '\n';
  for (Eigen::Index d = 0; d < m.values.outerSize(); ++d) {
    for (SparseMatrix::InnerIterator it(m.values, d); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << format_number(it.value()) << '\n';
    }
  }
}

void write_sparse(std::ostream& out, const DocCompanyTermTensor& t) {
  out << "dims " << t.docs << ' ' << t.terms << ' ' << t.companies << '\n';
  std::vector<DocCompanyTermTensor::Entry> sorted = t.entries;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.doc, a.term, a.company) < std::tie(b.doc, b.term, b.company);
  });
  for (const auto& e : sorted) {
    out << e.doc << ' ' << e.term << ' ' << e.company << ' ' << format_number(e.value) << '\n';
  }
}

}  // namespace topicmine
