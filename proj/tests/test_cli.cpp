/* Copyright 2026 The aggdec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aggdec/cli.hpp"
#include "aggdec/scripted_scorer.hpp"

using namespace aggdec;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("aggdec_cli_" + std::to_string(std::rand()) + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kCorpus =
    "the cat sat on the mat .\n"
    "a dog barks at night\n"
    "she go to school every day .\n"
    "\n"
    "it is more advance than the past time .\n";

}  // namespace

TEST_CASE("emit_trace renders one bracket per iteration") {
  const Vocab v({"a", "b", "c", "d", "X"});
  const TokenId a = v.id("a"), b = v.id("b"), c = v.id("c"), d = v.id("d"), X = v.id("X");
  const auto identity = identity_scorer(v.size());
  DecodeConfig cfg;
  cfg.mode = DecodeMode::kAggressive;
  CHECK(emit_trace(decode(*identity, prepare_input({a, b, c}, v), cfg), v) == "[a b c <eos>]_0(agg)");

  const auto scripted = scripted_edit_scorer(v.size(), {{{a, b, c, d}, {a, b, X, d}}});
  CHECK(emit_trace(decode(*scripted, prepare_input({a, b, c, d}, v), cfg), v) ==
        "[a b X]_0(agg) [d]_1(ar) [<eos>]_2(agg)");

  cfg.mode = DecodeMode::kGreedy;
  CHECK(emit_trace(decode(*scripted, prepare_input({a, b}, v), cfg), v) == "[a]_0(ar) [b]_1(ar) [<eos>]_2(ar)");
}

TEST_CASE("decode with the identity scorer returns the input lines") {
  TempDir dir;
  const auto corpus = dir.write("corpus.txt", kCorpus);
  const auto r = cli({"decode", "--scorer", "identity", "--input", corpus, "--mode", "aggressive", "--format", "text"});
  CHECK(r.code == 0);
  CHECK(r.out == kCorpus);
}

TEST_CASE("decode with scripted pairs and traces") {
  TempDir dir;
  const auto src = dir.write("src.txt", "a b c d\nx y\n");
  const auto tgt = dir.write("tgt.txt", "a b X d\nx y\n");
  const auto r = cli({"decode", "--scorer", "scripted", "--scripted-pairs", src, tgt, "--trace"});
  CHECK(r.code == 0);
  CHECK(r.out == "a b X d\t[a b X]_0(agg) [d]_1(ar) [<eos>]_2(agg)\nx y\t[x y <eos>]_0(agg)\n");

  const auto j = cli({"decode", "--scorer", "scripted", "--scripted-pairs", src, tgt, "--mode", "greedy", "--format",
                      "json"});
  REQUIRE(j.code == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed.size() == 2);
  CHECK(parsed[0]["output"] == "a b X d");
  CHECK(parsed[0]["iterations"] == 5);

  const auto mismatched = dir.write("short.txt", "a b X d\n");
  CHECK(cli({"decode", "--scorer", "scripted", "--scripted-pairs", src, mismatched}).code != 0);
}

TEST_CASE("check reports zero mismatches") {
  TempDir dir;
  const auto corpus = dir.write("corpus.txt", kCorpus);
  const auto r = cli({"check", "--scorer", "ngram", "--corpus", corpus, "--lmax", "1,5,unlimited"});
  CHECK(r.code == 0);
  CHECK(r.out == "0 mismatches / 5 sentences\n");

  const auto j = cli({"check", "--scorer", "identity", "--corpus", corpus, "--format", "json"});
  CHECK(j.code == 0);
  CHECK(nlohmann::json::parse(j.out)["mismatches"] == 0);
}

TEST_CASE("sweep-lmax emits nonincreasing iteration counts") {
  TempDir dir;
  const auto corpus = dir.write("corpus.txt", kCorpus);
  const auto r = cli({"sweep-lmax", "--scorer", "identity", "--corpus", corpus, "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "l_max,aggressive_iters,positions_scored,tokens_emitted,outputs_match_greedy");
  long previous = -1;
  int rows = 0;
  while (std::getline(lines, line)) {
    const auto first = line.find(',');
    const long iters = std::stol(line.substr(first + 1, line.find(',', first + 1) - first - 1));
    if (previous >= 0) CHECK(iters <= previous);
    previous = iters;
    CHECK(line.substr(line.rfind(',') + 1) == "true");
    ++rows;
  }
  CHECK(rows == 8);
}

TEST_CASE("bench and sweep-depth produce reports") {
  TempDir dir;
  const auto corpus = dir.write("corpus.txt", kCorpus);
  const auto cfg = dir.write("tiny.cfg", "encoder_layers = 2\ndecoder_layers = 1\nmodel_dim = 16\nheads = 2\nffn_dim = 32\n");
  const auto b = cli({"bench", "--scorer", "transformer", "--transformer-config", cfg, "--seed", "3", "--corpus",
                      corpus, "--repetitions", "1", "--warmup", "0", "--format", "csv", "--max-len", "12"});
  REQUIRE(b.code == 0);
  CHECK(b.out.rfind("index,input_len,edit_ratio,greedy_iters,aggressive_iters,iteration_speedup,wall_speedup,", 0) == 0);
  CHECK(b.out.find(",unlimited,2,1\n") != std::string::npos);

  const auto j = cli({"bench", "--scorer", "identity", "--corpus", corpus, "--repetitions", "1", "--format", "json"});
  REQUIRE(j.code == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["sentences"] == 5);
  CHECK(parsed["per_sentence"].size() == 5);

  const auto d = cli({"sweep-depth", "--transformer-config", cfg, "--seed", "3", "--corpus", corpus, "--depths",
                      "1+2,2+1", "--repetitions", "1", "--warmup", "0", "--format", "csv", "--max-len", "8"});
  REQUIRE(d.code == 0);
  CHECK(d.out.rfind("enc_layers,dec_layers,", 0) == 0);
  CHECK(d.out.find("\n1,2,") != std::string::npos);
  CHECK(d.out.find("\n2,1,") != std::string::npos);
}

TEST_CASE("config file entries override flags") {
  TempDir dir;
  const auto corpus = dir.write("corpus.txt", kCorpus);
  const auto conf = dir.write("run.cfg", "# sweep settings\nlmax = 1,unlimited\nformat = csv\n");
  const auto r = cli({"sweep-lmax", "--scorer", "identity", "--corpus", corpus, "--lmax", "2", "--format", "text",
                      "--config", conf});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("l_max,aggressive_iters", 0) == 0);
  CHECK(r.out.find("\n1,") != std::string::npos);
  CHECK(r.out.find("\nunlimited,") != std::string::npos);
}

TEST_CASE("identical runs write identical files") {
  TempDir dir;
  const auto corpus = dir.write("corpus.txt", kCorpus);
  for (const std::string sub : {"decode", "check", "sweep-lmax"}) {
    const auto a = dir.path(sub + "_a.json");
    const auto b = dir.path(sub + "_b.json");
    for (const auto& path : {a, b}) {
      REQUIRE(cli({sub, "--scorer", "ngram", "--corpus", corpus, "--format", "json", "--output", path}).code == 0);
    }
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());
  }
  const auto t1 = dir.path("t1.txt");
  const auto t2 = dir.path("t2.txt");
  for (const auto& path : {t1, t2}) {
    REQUIRE(cli({"decode", "--scorer", "transformer", "--seed", "11", "--corpus", corpus, "--max-len", "10",
                 "--output", path, "--trace"})
                .code == 0);
  }
  CHECK(slurp(t1) == slurp(t2));
}

TEST_CASE("usage errors exit nonzero with a diagnostic") {
  TempDir dir;
  const auto corpus = dir.write("corpus.txt", kCorpus);
  auto r = cli({"decode", "--scorer", "identity", "--corpus", corpus, "--bogus"});
  CHECK(r.code != 0);
  CHECK_FALSE(r.err.empty());

  r = cli({"decode", "--scorer", "identity", "--corpus", dir.path("missing.txt")});
  CHECK(r.code != 0);
  CHECK_FALSE(r.err.empty());

  r = cli({"decode", "--scorer", "transformer", "--corpus", corpus});
  CHECK(r.code != 0);
  CHECK(r.err.find("seed") != std::string::npos);

  r = cli({"check", "--scorer", "identity", "--corpus", corpus, "--lmax", "0"});
  CHECK(r.code != 0);

  const auto broken = dir.write("broken.cfg", "encoder_layers 3\n");
  r = cli({"decode", "--scorer", "transformer", "--seed", "1", "--transformer-config", broken, "--corpus", corpus});
  CHECK(r.code != 0);

  r = cli({"frobnicate", "--corpus", corpus});
  CHECK(r.code != 0);
}

TEST_CASE("the installed binary runs") {
  TempDir dir;
  const auto corpus = dir.write("corpus.txt", kCorpus);
  const auto out = dir.path("out.txt");
  const std::string cmd = std::string(AGGDEC_CLI_PATH) + " check --scorer identity --corpus " + corpus +
                          " --output " + out;
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(out) == "0 mismatches / 5 sentences\n");
}
