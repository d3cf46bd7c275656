#include <doctest.h>

#include <chrono>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "topicmine/corpus.hpp"
#include "topicmine/error.hpp"
#include "topicmine/export.hpp"

using namespace topicmine;
using Tokens = std::vector<std::string>;

namespace {

std::filesystem::path write_jsonl(const std::string& name, const std::string& body) {
  const auto dir = oracle::scratch_dir("corpus_" + name);
  const auto path = dir / "corpus.jsonl";
  write_file_atomic(path, body);
  return path;
}

std::string join(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

}  // namespace

TEST_CASE("jsonl with two records loads both in order") {
  const auto path = write_jsonl("two",
                                "{\"doc_id\":\"r1\",\"company_id\":\"c1\",\"text\":\"coal seam\"}\n"
                                "{\"doc_id\":\"r2\",\"company_id\":\"c2\",\"text\":\"basin\",\"year\":2011,"
                                "\"report_type\":\"annual\",\"category\":\"coal\"}\n");
  const Corpus c = load_corpus(path, CorpusFormat::kJsonl);
  REQUIRE(c.documents.size() == 2);
  CHECK(c.documents[0].doc_id == "r1");
  CHECK(c.documents[1].company_id == "c2");
  CHECK(c.documents[1].year == 2011);
  CHECK(c.documents[1].report_type == "annual");
  CHECK(c.documents[1].category == "coal");
  CHECK_FALSE(c.documents[0].year.has_value());
  CHECK(c.warnings.empty());
}

TEST_CASE("duplicate doc_id is rejected and named") {
  const auto path = write_jsonl("dup",
                                "{\"doc_id\":\"r1\",\"company_id\":\"c1\",\"text\":\"a\"}\n"
                                "{\"doc_id\":\"r1\",\"company_id\":\"c1\",\"text\":\"b\"}\n");
  try {
    load_corpus(path, CorpusFormat::kJsonl);
    FAIL("expected CorpusError");
  } catch (const CorpusError& e) {
    CHECK(std::string(e.what()).find("'r1'") != std::string::npos);
  }
}

TEST_CASE("empty jsonl gives an empty corpus and a warning") {
  const auto path = write_jsonl("empty", "");
  const Corpus c = load_corpus(path, CorpusFormat::kJsonl);
  CHECK(c.documents.empty());
  CHECK(c.warnings.size() == 1);
}

TEST_CASE("malformed records report their line") {
  const auto path = write_jsonl("bad",
                                "{\"doc_id\":\"r1\",\"company_id\":\"c1\",\"text\":\"a\"}\n"
                                "\n"
                                "{\"doc_id\":\"r2\",\"company_id\":\"c1\",\"text\":\n");
  try {
    load_corpus(path, CorpusFormat::kJsonl);
    FAIL("expected CorpusError");
  } catch (const CorpusError& e) {
    CHECK(std::string(e.what()).rfind("line 3", 0) == 0);
  }
  CHECK_THROWS_AS(load_corpus(write_jsonl("nofield", "{\"doc_id\":\"r1\",\"text\":\"a\"}\n"),
                              CorpusFormat::kJsonl),
                  CorpusError);
  CHECK_THROWS_AS(load_corpus(write_jsonl("blank", "{\"doc_id\":\"r1\",\"company_id\":\"c\",\"text\":\" \\n\\t\"}\n"),
                              CorpusFormat::kJsonl),
                  CorpusError);
  CHECK_THROWS_AS(load_corpus(write_jsonl("nocompany", "{\"doc_id\":\"r1\",\"company_id\":\"\",\"text\":\"x\"}\n"),
                              CorpusFormat::kJsonl),
                  CorpusError);
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl", CorpusFormat::kJsonl), CorpusError);
}

TEST_CASE("text-dir corpus reads files in name order with a manifest") {
  const auto dir = oracle::scratch_dir("textdir");
  write_file_atomic(dir / "b.txt", "second text");
  write_file_atomic(dir / "a.txt", "first text");
  write_file_atomic(dir / "notes.md", "ignored");
  write_file_atomic(dir / "manifest.csv", "doc_id,company_id\na,acme\nb,bolt\n");
  const Corpus c = load_corpus(dir, CorpusFormat::kTextDir);
  REQUIRE(c.documents.size() == 2);
  CHECK(c.documents[0].doc_id == "a");
  CHECK(c.documents[0].company_id == "acme");
  CHECK(c.documents[1].text == "second text");

  write_file_atomic(dir / "c.txt", "orphan");
  CHECK_THROWS_AS(load_corpus(dir, CorpusFormat::kTextDir), CorpusError);
  CHECK(to_string(parse_corpus_format("text-dir")) == "text-dir");
  CHECK_THROWS_AS(parse_corpus_format("docx"), ConfigError);
}

TEST_CASE("metadata filters") {
  std::vector<RawDocument> docs{{"a", "c", "t", 2010, "annual", "coal"},
                                {"b", "c", "t", 2015, "final", "coal"},
                                {"c", "c", "t", std::nullopt, std::nullopt, std::nullopt}};
  MetadataFilter f;
  CHECK(filter_documents(docs, f).size() == 3);
  f.year_min = 2012;
  auto kept = filter_documents(docs, f);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].doc_id == "b");
  f = {};
  f.report_type = "annual";
  CHECK(filter_documents(docs, f).size() == 1);
}

TEST_CASE("tokenize") {
  CHECK(tokenize("The Coal-Seam, 2020!") == Tokens{"the", "coal", "seam"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("ab AB abc ABC") == Tokens{"abc", "abc"});
  CHECK(tokenize("2nd quarter x86 drill") == Tokens{"quarter", "drill"});
  CHECK(tokenize("Café naïve ÉTUDE") == Tokens{"café", "naïve", "étude"});
  CHECK(tokenize("über\xff" "coal") == Tokens{"über", "coal"});
  CHECK(tokenize("it's o'clock") == Tokens{"clock"});
}

TEST_CASE("tokenize is idempotent on random text") {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcXYZ 09-,.!\t\nçé";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (int i = 0; i < 80; ++i) text += alphabet[pick(rng)];
    const Tokens once = tokenize(text);
    CHECK(tokenize(join(once)) == once);
    for (const auto& t : once) {
      CHECK(t.find_first_of("0123456789 -,.!ABCXYZ") == std::string::npos);
    }
  }
}

TEST_CASE("stop-word lists") {
  CHECK(english_stopwords().size() == 179);
  const Tokens extras{"appendix", "area", "australia", "fax", "figure", "ltd", "map",
                      "page", "phone", "project", "report", "year", "within"};
  CHECK(default_extra_stopwords() == extras);
  const StopwordList stops = StopwordList::defaults();
  CHECK(stops.extra.size() == 13);
  CHECK(stops.contains("the"));
  CHECK(stops.contains("within"));
  CHECK_FALSE(stops.contains("coal"));

  CHECK(remove_stopwords(Tokens{"the", "coal", "report"}, stops) == Tokens{"coal"});
  CHECK(remove_stopwords(Tokens{}, stops).empty());
  CHECK(remove_stopwords(Tokens{"project", "area", "seam"}, stops) == Tokens{"seam"});
}

TEST_CASE("stop-word removal and the length filter commute") {
  const StopwordList stops = StopwordList::defaults();
  const std::string text = "An ox and the big area of coal in a seam at it by us";
  const Tokens filtered_first = remove_stopwords(tokenize(text), stops);
  Tokens raw;
  for (const auto& piece : Tokens{"an", "ox", "and", "the", "big", "area", "of", "coal", "in", "a",
                                  "seam", "at", "it", "by", "us"}) {
    raw.push_back(piece);
  }
  Tokens stops_first = remove_stopwords(raw, stops);
  Tokens then_length;
  for (const auto& t : stops_first) {
    if (t.size() >= 3) then_length.push_back(t);
  }
  CHECK(filtered_first == then_length);
}

TEST_CASE("stem examples") {
  CHECK(stem("programming") == "program");
  CHECK(stem("a") == "a");
  CHECK(stem("geological") == "geolog");
  CHECK(stem("caresses") == "caress");
  CHECK(stem("ponies") == "poni");
  CHECK(stem("relational") == "relat");
  CHECK(stem("generalizations") == "gener");
  CHECK(stem("café") == "café");
  CHECK(stem("programming") == stem("programming"));
}

TEST_CASE("stemmer matches the frozen reference vocabulary") {
  std::ifstream in(std::string(TOPICMINE_TEST_DATA) + "/porter_reference.txt");
  REQUIRE(in);
  std::string word, expected;
  std::size_t total = 0, wrong = 0;
  while (in >> word >> expected) {
    ++total;
    if (stem(word) != expected) {
      if (++wrong <= 10) MESSAGE(word << " -> " << stem(word) << ", expected " << expected);
    }
  }
  CHECK(total > 10000);
  CHECK(wrong == 0);
}

TEST_CASE("preprocess composes the three stages") {
  const StopwordList stops = StopwordList::defaults();
  RawDocument doc{"d", "c", "Geological programs in the project area", {}, {}, {}};
  TokenizedDocument out = preprocess(doc, stops);
  CHECK(out.tokens == Tokens{"geolog", "program"});
  CHECK_FALSE(out.empty);

  doc.text = "the and of within report";
  out = preprocess(doc, stops);
  CHECK(out.tokens.empty());
  CHECK(out.empty);

  // "reporting" is not a stop-word, so its stem survives.
  doc.text = "Reports reporting report";
  out = preprocess(doc, stops);
  CHECK(out.tokens == Tokens{"report", "report"});
}

TEST_CASE("stored tokens satisfy the stage invariants") {
  const StopwordList stops = StopwordList::defaults();
  std::vector<RawDocument> docs;
  std::mt19937_64 rng(3);
  const Tokens words{"The", "geological", "SURVEY", "of", "coal-seams", "in", "2019", "drilling",
                     "area", "Reporting", "is", "ab", "within", "explorations", "basins", "x1"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (int d = 0; d < 40; ++d) {
    std::string text;
    for (int i = 0; i < 25; ++i) text += words[pick(rng)] + (i % 5 == 4 ? ". " : " ");
    docs.push_back({"d" + std::to_string(d), "c", text, {}, {}, {}});
  }
  const auto serial = preprocess_all(docs, stops, 1);
  const auto threaded = preprocess_all(docs, stops, 4);
  REQUIRE(serial.size() == docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    CHECK(serial[d].doc_id == threaded[d].doc_id);
    CHECK(serial[d].tokens == threaded[d].tokens);
    // Rebuild the pre-stem stream and check each stage.
    Tokens pre = remove_stopwords(tokenize(docs[d].text), stops);
    REQUIRE(pre.size() == serial[d].tokens.size());
    for (std::size_t i = 0; i < pre.size(); ++i) {
      CHECK(pre[i].size() >= 3);
      CHECK_FALSE(stops.contains(pre[i]));
      CHECK(stem(pre[i]) == serial[d].tokens[i]);
      CHECK(serial[d].tokens[i].find_first_not_of("abcdefghijklmnopqrstuvwxyz") == std::string::npos);
    }
  }
}
