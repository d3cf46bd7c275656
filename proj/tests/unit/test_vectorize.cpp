#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "topicmine/error.hpp"
#include "topicmine/vectorize.hpp"

using namespace topicmine;

namespace {

TokenizedDocument doc(std::string id, std::vector<std::string> tokens) {
  return {std::move(id), std::move(tokens), false};
}

std::map<std::string, std::string> round_robin_companies(const std::vector<TokenizedDocument>& docs,
                                                         int n_companies) {
  std::map<std::string, std::string> out;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    out[docs[d].doc_id] = "co" + std::to_string(static_cast<int>(d) % n_companies);
  }
  return out;
}

}  // namespace

TEST_CASE("vocabulary counts and min_df") {
  const std::vector<TokenizedDocument> docs{doc("a", {"coal", "seam"}), doc("b", {"coal"})};
  Vocabulary v = build_vocabulary(docs, 1);
  REQUIRE(v.size() == 2);
  CHECK(v.index_to_term[0] == "coal");
  CHECK(v.doc_freq[static_cast<std::size_t>(v.find("coal"))] == 2);
  CHECK(v.doc_freq[static_cast<std::size_t>(v.find("seam"))] == 1);
  CHECK(v.find("basin") == -1);

  v = build_vocabulary(docs, 2);
  REQUIRE(v.size() == 1);
  CHECK(v.index_to_term[0] == "coal");

  CHECK_THROWS_AS(build_vocabulary(docs, 0), ConfigError);
  const std::vector<TokenizedDocument> none{doc("a", {})};
  CHECK_THROWS_AS(build_vocabulary(none, 1), CorpusError);
}

TEST_CASE("vocabulary order is frequency then lexicographic") {
  const std::vector<TokenizedDocument> docs{doc("a", {"zeta", "beta", "beta", "alpha"}),
                                            doc("b", {"zeta", "gamma"})};
  const Vocabulary v = build_vocabulary(docs);
  CHECK(v.index_to_term == std::vector<std::string>{"beta", "zeta", "alpha", "gamma"});
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.term_to_index.at(v.index_to_term[i]) == i);
}

TEST_CASE("tf rows") {
  const std::vector<TokenizedDocument> docs{doc("a", {"coal", "coal", "seam"}), doc("b", {"coal"}),
                                            doc("c", {})};
  const Vocabulary v = build_vocabulary(docs);
  const DocTermMatrix tf = tf_matrix(docs, v);
  CHECK(tf.weighting == Weighting::kTf);
  CHECK(tf.values.coeff(0, 0) == 2.0);
  CHECK(tf.values.coeff(0, 1) == 1.0);
  CHECK(tf.values.row(2).sum() == 0.0);
}

TEST_CASE("tf row sums match a recount on random corpora") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto docs = oracle::random_corpus(rng, 20, 50);
    const Vocabulary v = build_vocabulary(docs);
    const DocTermMatrix tf = tf_matrix(docs, v);
    const auto ref = oracle::tf(docs, v.index_to_term);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      CHECK(tf.values.row(static_cast<Eigen::Index>(d)).sum() == static_cast<double>(docs[d].tokens.size()));
      for (std::size_t t = 0; t < v.size(); ++t) {
        CHECK(tf.values.coeff(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) == ref[d][t]);
      }
    }
  }
}

TEST_CASE("tf-idf special cases") {
  const std::vector<TokenizedDocument> one{doc("a", {"coal", "coal", "seam"})};
  const Vocabulary v1 = build_vocabulary(one);
  const DocTermMatrix x = tfidf_matrix(one, v1);
  CHECK(x.weighting == Weighting::kTfIdf);
  CHECK(x.values.coeff(0, 0) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-15));
  CHECK(x.values.coeff(0, 1) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-15));

  // A term in every document keeps idf 1, so it is not dropped.
  const std::vector<TokenizedDocument> docs{doc("a", {"coal", "seam"}), doc("b", {"coal"}),
                                            doc("c", {})};
  const Vocabulary v = build_vocabulary(docs);
  const DocTermMatrix y = tfidf_matrix(docs, v);
  CHECK(y.values.coeff(1, 0) == doctest::Approx(1.0));
  CHECK(y.values.row(2).sum() == 0.0);
}

TEST_CASE("tf-idf matches the reference formula") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto docs = oracle::random_corpus(rng, 5, 12);
    const Vocabulary v = build_vocabulary(docs);
    const DocTermMatrix x = tfidf_matrix(docs, v);
    const auto ref = oracle::tfidf(docs, v.index_to_term);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      double sq = 0.0;
      for (std::size_t t = 0; t < v.size(); ++t) {
        const double got = x.values.coeff(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t));
        CHECK(std::abs(got - ref[d][t]) <= 1e-12);
        sq += got * got;
      }
      CHECK(std::abs(sq - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("tensor slices and marginalization") {
  const std::vector<TokenizedDocument> docs{doc("a", {"coal", "coal"}), doc("b", {"seam"})};
  const Vocabulary v = build_vocabulary(docs);
  const DocCompanyTermTensor t = build_tensor(docs, v, {{"a", "zinc"}, {"b", "acme"}});
  CHECK(t.docs == 2);
  CHECK(t.companies == 2);
  CHECK(t.terms == 2);
  CHECK(t.company_ids == std::vector<std::string>{"acme", "zinc"});
  REQUIRE(t.nnz() == 2);
  CHECK(t.entries[0].doc == 0);
  CHECK(t.entries[0].company == 1);
  CHECK(t.entries[0].value == 2.0);
  CHECK(t.entries[1].company == 0);
  CHECK(t.squared_norm() == 5.0);
  CHECK_THROWS_AS(build_tensor(docs, v, {{"a", "zinc"}}), CorpusError);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto corpus = oracle::random_corpus(rng, 20, 50);
    const Vocabulary vocab = build_vocabulary(corpus);
    const auto tensor = build_tensor(corpus, vocab, round_robin_companies(corpus, 3));
    const DocTermMatrix tf = tf_matrix(corpus, vocab);
    CHECK(tensor.nnz() == static_cast<std::size_t>(tf.values.nonZeros()));
    CHECK(Eigen::MatrixXd(marginalize_companies(tensor)) == Eigen::MatrixXd(tf.values));
    for (const auto& e : tensor.entries) CHECK(e.company == tensor.doc_company[static_cast<std::size_t>(e.doc)]);
  }
}

TEST_CASE("sparse text export") {
  const std::vector<TokenizedDocument> docs{doc("a", {"coal", "coal", "seam"}), doc("b", {"seam"})};
  const Vocabulary v = build_vocabulary(docs);
  std::ostringstream m;
  write_sparse(m, tf_matrix(docs, v));
  CHECK(m.str() == "dims 2 2\n0 0 2\n0 1 1\n1 1 1\n");

  std::ostringstream t;
  write_sparse(t, build_tensor(docs, v, {{"a", "y"}, {"b", "x"}}));
  CHECK(t.str() == "dims 2 2 2\n0 0 1 2\n0 1 1 1\n1 1 0 1\n");
}

TEST_CASE("rebuilding is deterministic") {
  std::mt19937_64 rng(2);
  const auto docs = oracle::random_corpus(rng, 20, 50);
  std::ostringstream a, b;
  write_sparse(a, tfidf_matrix(docs, build_vocabulary(docs)));
  write_sparse(b, tfidf_matrix(docs, build_vocabulary(docs)));
  CHECK(a.str() == b.str());
}
