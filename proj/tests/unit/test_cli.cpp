#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + TOPICMINE_CLI + "\" " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("synth then run produces the output tree") {
  const fs::path dir = oracle::scratch_dir("cli_ok");
  const fs::path corpus = dir / "planted.jsonl";
  REQUIRE(run("synth --out " + q(corpus)) == 0);
  REQUIRE(fs::exists(corpus));
  CHECK(run("run --corpus " + q(corpus) + " --methods lda,nmf --k 2..3 --out " + q(dir / "out")) == 0);
  for (const char* f : {"silhouette_by_k.csv", "keyword_match_by_k.csv", "decisiveness_by_method.csv",
                        "selection.json", "manifest.json"}) {
    CHECK(fs::exists(dir / "out" / "summary" / f));
  }
  CHECK(fs::exists(dir / "out" / "nmf" / "k3" / "topic_term.csv"));
  CHECK_FALSE(fs::exists(dir / "out" / "ntf"));
  const std::string sil = oracle::slurp(dir / "out" / "summary" / "silhouette_by_k.csv");
  CHECK(std::count(sil.begin(), sil.end(), '\n') == 5);
}

TEST_CASE("config file with flag overrides") {
  const fs::path dir = oracle::scratch_dir("cli_config");
  const fs::path corpus = dir / "planted.jsonl";
  REQUIRE(run("synth --out " + q(corpus) + " --docs 24") == 0);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({"methods": ["nmf"], "k_values": [2, 3, 4]})";
  }
  CHECK(run("run --config " + q(dir / "config.json") + " --corpus " + q(corpus) + " --k 2,3 --out " +
            q(dir / "out")) == 0);
  const std::string sil = oracle::slurp(dir / "out" / "summary" / "silhouette_by_k.csv");
  // The flag wins over the file's k_values; the file's methods survive.
  CHECK(std::count(sil.begin(), sil.end(), '\n') == 3);
  CHECK(sil.find("nmf,3,") != std::string::npos);
  CHECK(sil.find("nmf,4,") == std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path dir = oracle::scratch_dir("cli_codes");
  const fs::path corpus = dir / "planted.jsonl";
  REQUIRE(run("synth --out " + q(corpus)) == 0);

  // Bad configuration.
  CHECK(run("run --corpus " + q(corpus) + " --k 0 --out " + q(dir / "a")) == 1);
  CHECK(run("run --corpus " + q(corpus) + " --methods plsa --k 2 --out " + q(dir / "a")) == 1);
  CHECK(run("run --corpus " + q(corpus) + " --k 2 --filter colour=red --out " + q(dir / "a")) == 1);
  CHECK(run("run --no-such-flag") == 1);
  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"kvalues": [2]})";
  }
  CHECK(run("run --config " + q(dir / "bad.json") + " --corpus " + q(corpus) + " --out " + q(dir / "a")) == 1);

  // Missing or unusable corpus.
  CHECK(run("run --corpus " + q(dir / "missing.jsonl") + " --k 2 --out " + q(dir / "b")) == 2);
  CHECK(run("run --corpus " + q(corpus) + " --k 2 --filter year_min=3000 --out " + q(dir / "b")) == 2);

  // Eight companies cannot carry nine tensor components.
  CHECK(run("run --corpus " + q(corpus) + " --methods nmf,ntf --k 3,9 --out " + q(dir / "c")) == 3);
  CHECK(fs::exists(dir / "c" / "nmf" / "k9" / "report.json"));
  CHECK(fs::exists(dir / "c" / "summary" / "manifest.json"));
}

TEST_CASE("preprocess prints stems") {
  const fs::path dir = oracle::scratch_dir("cli_pre");
  const std::string cmd = std::string("\"") + TOPICMINE_CLI + "\" preprocess \"Drilling of the gold deposits\" > " +
                          q(dir / "out.txt");
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(oracle::slurp(dir / "out.txt") == "drill gold deposit\n");
}
