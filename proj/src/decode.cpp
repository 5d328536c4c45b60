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

#include "aggdec/decode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace aggdec {

namespace {

std::span<const double> row_span(const Logits& logits, Eigen::Index r) {
  return {logits.data() + r * logits.cols(), static_cast<std::size_t>(logits.cols())};
}

double log_normalizer(std::span<const double> row) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : row) peak = std::max(peak, v);
  double sum = 0.0;
  for (double v : row) {
    if (v != kMaskedLogit) sum += std::exp(v - peak);
  }
  return peak + std::log(sum);
}

void check_input(const TokenSequence& x, const DecodeConfig& cfg) {
  cfg.validate();
  raw_input(x);
}

void check_trace(const DecodeResult& result) {
  if (auto violation = validate_trace(result.trace, result.length())) {
    throw std::logic_error("malformed decode trace: " + *violation);
  }
}

IterationRecord single_step_record() {
  IterationRecord rec;
  rec.mode = IterationMode::kAutoregressive;
  rec.positions_scored = 1;
  rec.accepted = 1;
  return rec;
}

}  // namespace

TokenId argmax_with_tiebreak(std::span<const double> logits) {
  std::size_t best = logits.size();
  for (std::size_t v = 0; v < logits.size(); ++v) {
    if (logits[v] == kMaskedLogit) continue;
    if (best == logits.size() || logits[v] > logits[best]) best = v;
  }
  if (best == logits.size()) throw std::invalid_argument("all logits are masked");
  return static_cast<TokenId>(best);
}

std::optional<SuffixMatch> find_suffix_match(std::span<const TokenId> o, const TokenSequence& x) {
  if (o.empty()) throw std::invalid_argument("suffix matching needs a nonempty output");
  if (x.size() < 2) throw std::invalid_argument("suffix matching needs a prepared input");
  const std::size_t n = x.size() - 2;
  const std::size_t j = o.size() - 1;

  // End indices i in x_{0..n} with x_{i-q..i} == o_{j-q..j}.
  std::vector<std::size_t> ends;
  for (std::size_t i = 0; i <= n; ++i) {
    if (x[i] == o[j]) ends.push_back(i);
  }
  for (std::size_t q = 0;; ++q) {
    if (ends.empty()) return std::nullopt;
    if (ends.size() == 1) return SuffixMatch{ends.front(), q};
    if (q == j) return std::nullopt;
    std::erase_if(ends, [&](std::size_t i) { return i < q + 1 || x[i - q - 1] != o[j - q - 1]; });
  }
}

std::optional<std::size_t> find_bifurcation(std::span<const TokenId> predictions,
                                            std::span<const TokenId> copied) {
  if (predictions.empty() || predictions.size() != copied.size()) {
    throw std::invalid_argument("bifurcation search needs equal, nonzero lengths");
  }
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    if (predictions[k] != copied[k]) return k + 1;
  }
  return std::nullopt;
}

DecodeResult greedy_decode(const Scorer& scorer, const TokenSequence& x, const DecodeConfig& cfg) {
  check_input(x, cfg);
  const std::size_t max_len = cfg.effective_max_len(x.size() - 2);
  auto session = scorer.encode(x);

  DecodeResult result;
  result.output.push_back(Vocab::kBos);
  while (result.output.back() != Vocab::kEos && result.length() < max_len) {
    const Logits logits = session->score(result.output.span(), result.output.size() - 1);
    const auto row = row_span(logits, 0);
    const TokenId next = argmax_with_tiebreak(row);
    result.score += row[static_cast<std::size_t>(next)] - log_normalizer(row);
    result.output.push_back(next);
    result.positions_scored += 1;
    result.trace.iterations.push_back(single_step_record());
  }
  check_trace(result);
  return result;
}

DecodeResult beam_decode(const Scorer& scorer, const TokenSequence& x, const DecodeConfig& cfg) {
  check_input(x, cfg);
  const std::size_t max_len = cfg.effective_max_len(x.size() - 2);
  const std::size_t beam = cfg.beam_size;

  struct Hypothesis {
    std::vector<TokenId> tokens;
    double score = 0.0;
    std::unique_ptr<DecoderSession> session;
  };
  struct Candidate {
    double score;
    std::size_t parent;
    TokenId token;
  };

  std::vector<Hypothesis> alive;
  alive.push_back({{Vocab::kBos}, 0.0, scorer.encode(x)});
  std::vector<Hypothesis> finished;
  std::size_t positions = 0;

  auto normalized = [&](const Hypothesis& h) {
    const double len = static_cast<double>(h.tokens.size() - 1);
    return cfg.length_penalty == 0.0 ? h.score : h.score / std::pow(len, cfg.length_penalty);
  };
  // True once `beam` finished hypotheses are at least as good as anything
  // a live hypothesis can still reach. Scores only fall as tokens are added.
  auto settled = [&] {
    if (finished.size() < beam || alive.empty()) return alive.empty();
    std::vector<double> done;
    for (const auto& h : finished) done.push_back(normalized(h));
    std::nth_element(done.begin(), done.begin() + static_cast<std::ptrdiff_t>(beam - 1), done.end(),
                     std::greater<>());
    double best_live = alive.front().score;
    for (const auto& h : alive) best_live = std::max(best_live, h.score);
    const double bound = cfg.length_penalty == 0.0
                             ? best_live
                             : best_live / std::pow(static_cast<double>(max_len), cfg.length_penalty);
    return done[beam - 1] >= bound;
  };

  for (std::size_t step = 0; step < max_len && !settled(); ++step) {
    std::vector<Candidate> candidates;
    for (std::size_t b = 0; b < alive.size(); ++b) {
      auto& hyp = alive[b];
      const Logits logits = hyp.session->score(hyp.tokens, hyp.tokens.size() - 1);
      ++positions;
      const auto row = row_span(logits, 0);
      const double norm = log_normalizer(row);
      for (std::size_t v = 0; v < row.size(); ++v) {
        if (row[v] == kMaskedLogit) continue;
        candidates.push_back({hyp.score + (row[v] - norm), b, static_cast<TokenId>(v)});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.token < b.token;
    });

    std::vector<Hypothesis> next;
    for (const auto& c : candidates) {
      if (next.size() == beam) break;
      const auto& parent = alive[c.parent];
      Hypothesis hyp;
      hyp.tokens = parent.tokens;
      hyp.tokens.push_back(c.token);
      hyp.score = c.score;
      if (c.token == Vocab::kEos) {
        finished.push_back(std::move(hyp));
      } else {
        hyp.session = parent.session->clone();
        next.push_back(std::move(hyp));
      }
    }
    alive = std::move(next);
  }

  // Unfinished hypotheses compete only when MAX_LEN cut the search short.
  if (!settled())
    for (auto& hyp : alive) finished.push_back(std::move(hyp));
  const auto best = std::max_element(finished.begin(), finished.end(), [&](const Hypothesis& a, const Hypothesis& b) {
    return normalized(a) < normalized(b);
  });

  DecodeResult result;
  result.output = TokenSequence(best->tokens);
  result.score = best->score;
  result.positions_scored = positions;
  for (std::size_t t = 0; t < result.length(); ++t) result.trace.iterations.push_back(single_step_record());
  check_trace(result);
  return result;
}

DecodeResult aggressive_decode(const Scorer& scorer, const TokenSequence& x, const DecodeConfig& cfg) {
  check_input(x, cfg);
  const std::size_t n = x.size() - 2;
  const std::size_t max_len = cfg.effective_max_len(n);
  auto session = scorer.encode(x);

  DecodeResult result;
  TokenSequence& o = result.output;
  o.push_back(Vocab::kBos);
  std::vector<TokenId> inputs;

  while (o.back() != Vocab::kEos && result.length() < max_len) {
    const std::size_t j = o.size() - 1;
    const auto match = find_suffix_match(o.span(), x);
    if (!match) {
      const Logits logits = session->score(o.span(), j);
      const auto row = row_span(logits, 0);
      const TokenId next = argmax_with_tiebreak(row);
      result.score += row[static_cast<std::size_t>(next)] - log_normalizer(row);
      o.push_back(next);
      result.positions_scored += 1;
      result.trace.iterations.push_back(single_step_record());
      continue;
    }

    // Copy x_{i+1..i+w}; the decoder sees o followed by x_{i+1..i+w-1}.
    std::size_t w = std::min(n + 1 - match->i, max_len - result.length());
    if (cfg.l_max) w = std::min(w, *cfg.l_max);
    const auto copied = x.span().subspan(match->i + 1, w);
    inputs.assign(o.begin(), o.end());
    inputs.insert(inputs.end(), copied.begin(), copied.end() - 1);

    const Logits logits = session->score(inputs, j);
    std::vector<TokenId> predictions(w);
    for (std::size_t k = 0; k < w; ++k) {
      predictions[k] = argmax_with_tiebreak(row_span(logits, static_cast<Eigen::Index>(k)));
    }
    const auto bifurcation = find_bifurcation(predictions, copied);
    const std::size_t accept = bifurcation.value_or(w);
    for (std::size_t k = 0; k < accept; ++k) {
      const auto row = row_span(logits, static_cast<Eigen::Index>(k));
      result.score += row[static_cast<std::size_t>(predictions[k])] - log_normalizer(row);
      o.push_back(predictions[k]);
    }
    result.positions_scored += w;

    IterationRecord rec;
    rec.mode = IterationMode::kAggressive;
    rec.positions_scored = w;
    rec.accepted = accept;
    rec.suffix_match = match;
    if (bifurcation) rec.bifurcation = j + *bifurcation;
    result.trace.iterations.push_back(rec);
  }
  check_trace(result);
  return result;
}

DecodeResult decode(const Scorer& scorer, const TokenSequence& x, const DecodeConfig& cfg) {
  switch (cfg.mode) {
    case DecodeMode::kGreedy: return greedy_decode(scorer, x, cfg);
    case DecodeMode::kBeam: return beam_decode(scorer, x, cfg);
    case DecodeMode::kAggressive: return aggressive_decode(scorer, x, cfg);
  }
  throw std::invalid_argument("unknown decode mode");
}

}  // namespace aggdec
