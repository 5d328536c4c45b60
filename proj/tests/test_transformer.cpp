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

#include <random>
#include <sstream>

#include "aggdec/decode.hpp"
#include "aggdec/transformer.hpp"
#include "support.hpp"

using namespace aggdec;

namespace {

constexpr std::size_t V = 24;

TransformerConfig small_config(std::size_t enc, std::size_t dec, std::uint64_t seed = 1) {
  TransformerConfig c;
  c.encoder_layers = enc;
  c.decoder_layers = dec;
  c.model_dim = 32;
  c.heads = 4;
  c.ffn_dim = 64;
  c.seed = seed;
  return c;
}

TokenSequence random_input(std::mt19937_64& rng, std::size_t max_len) {
  const auto raw = testing::random_sentence(rng, 1 + rng() % max_len, V);
  std::vector<TokenId> ids{Vocab::kBos};
  ids.insert(ids.end(), raw.begin(), raw.end());
  ids.push_back(Vocab::kPad);
  return TokenSequence(ids);
}

std::vector<TokenId> random_prefix(std::mt19937_64& rng, std::size_t len) {
  std::vector<TokenId> p{Vocab::kBos};
  const auto body = testing::random_sentence(rng, len, V);
  p.insert(p.end(), body.begin(), body.end());
  return p;
}

}  // namespace

TEST_CASE("transformer config validation") {
  TransformerConfig c = small_config(2, 2);
  CHECK_NOTHROW(c.validate());
  c.seed.reset();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config(0, 2);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config(2, 0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config(2, 2);
  c.heads = 5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(tiny_transformer(c, V), std::invalid_argument);
}

TEST_CASE("transformer config file parsing") {
  std::istringstream in("# shallow decoder\nencoder_layers = 9\ndecoder_layers=3\nmodel_dim = 64\nheads = 8\n"
                        "ffn_dim = 128\nseed = 42  # fixed\n");
  const auto c = parse_transformer_config(in);
  CHECK(c.encoder_layers == 9);
  CHECK(c.decoder_layers == 3);
  CHECK(c.heads == 8);
  CHECK(c.seed == 42u);
  CHECK(c.depth_label() == "9+3");

  std::istringstream bad_key("layers = 3\n");
  CHECK_THROWS_AS(parse_transformer_config(bad_key), std::invalid_argument);
  std::istringstream bad_value("heads = four\n");
  CHECK_THROWS_AS(parse_transformer_config(bad_value), std::invalid_argument);
}

TEST_CASE("decoder step cost scales with decoder depth only") {
  const auto base = small_config(6, 6);
  const auto shallow = small_config(9, 3);
  CHECK(shallow.decoder_step_cost() / base.decoder_step_cost() == doctest::Approx(0.5));
}

TEST_CASE("decoder is causal") {
  const TransformerScorer<double> scorer(small_config(2, 2), V);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_input(rng, 12);
    auto prefix = random_prefix(rng, 10);
    auto altered = prefix;
    const std::size_t j = rng() % prefix.size();
    for (std::size_t p = j + 1; p < altered.size(); ++p) altered[p] = static_cast<TokenId>(4 + (altered[p] + 1) % (V - 4));
    const Logits a = scorer.encode(x)->score(prefix, 0);
    const Logits b = scorer.encode(x)->score(altered, 0);
    for (Eigen::Index r = 0; r <= static_cast<Eigen::Index>(j); ++r) CHECK(a.row(r) == b.row(r));
  }
}

TEST_CASE("encode is pure and PAD is never the argmax") {
  const TransformerScorer<double> scorer(small_config(2, 1), V);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_input(rng, 15);
    const auto prefix = random_prefix(rng, 6);
    const Logits a = scorer.encode(x)->score(prefix, 0);
    const Logits b = scorer.encode(x)->score(prefix, 0);
    CHECK(a == b);
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      CHECK(a(r, Vocab::kPad) == kMaskedLogit);
      CHECK(argmax_with_tiebreak({a.data() + r * a.cols(), V}) != Vocab::kPad);
    }
  }
}

TEST_CASE("joint and one-at-a-time scoring agree at argmax level") {
  const TransformerScorer<double> scorer(small_config(3, 2, 9), V);
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto x = random_input(rng, 20);
    const auto prefix = random_prefix(rng, 1 + rng() % 20);
    const Logits joint = scorer.encode(x)->score(prefix, 0);
    auto session = scorer.encode(x);
    for (std::size_t j = 0; j < prefix.size(); ++j) {
      const Logits single = session->score(std::span(prefix).first(j + 1), j);
      const auto r = static_cast<Eigen::Index>(j);
      CHECK(argmax_with_tiebreak({single.data(), V}) == argmax_with_tiebreak({joint.data() + r * joint.cols(), V}));
      const auto finite = [](double v) { return std::isfinite(v) ? v : 0.0; };
      worst = std::max(worst, (single.row(0).unaryExpr(finite) - joint.row(r).unaryExpr(finite)).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("cached decoding matches recomputation from scratch") {
  const TransformerScorer<double> scorer(small_config(2, 3, 5), V);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto x = random_input(rng, 15);
    auto cached = scorer.encode(x);
    std::vector<TokenId> o{Vocab::kBos};
    std::vector<TokenId> fresh_o{Vocab::kBos};
    for (int step = 0; step < 25; ++step) {
      const Logits a = cached->score(o, o.size() - 1);
      o.push_back(argmax_with_tiebreak({a.data(), V}));
      const Logits b = scorer.encode(x)->score(fresh_o, 0);
      fresh_o.push_back(argmax_with_tiebreak({b.data() + (b.rows() - 1) * b.cols(), V}));
    }
    CHECK(o == fresh_o);
  }
}

TEST_CASE("session reuses the shared prefix after a rejected window") {
  const TransformerScorer<float> scorer(small_config(1, 2, 3), V);
  std::mt19937_64 rng(10);
  const auto x = random_input(rng, 10);
  auto session = scorer.encode(x);
  auto window = random_prefix(rng, 8);
  session->score(window, 0);
  // Keep three tokens, change the fourth: rows from position 3 on must
  // match a fresh session's.
  auto next = std::vector<TokenId>(window.begin(), window.begin() + 4);
  next[3] = static_cast<TokenId>(4 + (next[3] + 3) % (V - 4));
  next.push_back(5);
  const Logits reused = session->score(next, 3);
  const Logits fresh = scorer.encode(x)->score(next, 3);
  REQUIRE(reused.rows() == 2);
  for (Eigen::Index r = 0; r < 2; ++r) {
    CHECK(argmax_with_tiebreak({reused.data() + r * reused.cols(), V}) ==
          argmax_with_tiebreak({fresh.data() + r * fresh.cols(), V}));
  }
}

TEST_CASE("float and double transformers share weights") {
  const TransformerScorer<float> f(small_config(2, 2, 12), V);
  const TransformerScorer<double> d(small_config(2, 2, 12), V);
  std::mt19937_64 rng(12);
  const auto x = random_input(rng, 10);
  const auto prefix = random_prefix(rng, 5);
  const Logits lf = f.encode(x)->score(prefix, 0);
  const Logits ld = d.encode(x)->score(prefix, 0);
  const auto finite = [](double v) { return std::isfinite(v) ? v : 0.0; };
  CHECK((lf.unaryExpr(finite) - ld.unaryExpr(finite)).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("transformer greedy and aggressive agree") {
  std::mt19937_64 rng(14);
  for (const auto& cfg : {small_config(6, 6, 21), small_config(9, 3, 22)}) {
    const TransformerScorer<double> scorer(cfg, V);
    for (int t = 0; t < 15; ++t) {
      const auto x = random_input(rng, 20);
      DecodeConfig dc;
      const auto greedy = greedy_decode(scorer, x, dc);
      dc.mode = DecodeMode::kAggressive;
      CHECK(aggressive_decode(scorer, x, dc).output == greedy.output);
    }
  }
}
