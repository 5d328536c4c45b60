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

#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aggdec/core.hpp"
#include "aggdec/decode.hpp"
#include "aggdec/scorer.hpp"
#include "aggdec/transformer.hpp"

namespace aggdec {

using Seconds = std::chrono::duration<double>;

/// Token-level edit distance with unit insert/delete/substitute costs.
std::size_t levenshtein(std::span<const TokenId> a, std::span<const TokenId> b);

/// levenshtein(input, output) / |input|. Normalized by the input only, so it
/// is not symmetric. Throws std::invalid_argument on an empty input.
double edit_ratio(const TokenSequence& input, const TokenSequence& output);

/// Rank correlation with average ranks for ties. NaN if either side is
/// constant or the lengths differ or are < 2.
double spearman(std::span<const double> a, std::span<const double> b);

struct StepStats {
  std::size_t sequential_iterations = 0;
  std::size_t positions_scored = 0;
  std::size_t tokens_emitted = 0;
  Seconds wall_clock{0.0};

  StepStats& operator+=(const StepStats& other);
};

StepStats step_stats(const DecodeResult& result, Seconds wall_clock = Seconds{0.0});

struct SentenceReport {
  std::size_t index = 0;
  std::size_t input_length = 0;
  double edit_ratio = 0.0;  // input vs greedy output
  StepStats greedy;
  StepStats aggressive;
  std::optional<StepStats> beam;
  double iteration_speedup = 1.0;
  double wall_speedup = 1.0;
};

// ---------------------------------------------------------------------------
// Equivalence checking

struct EquivalenceSweep {
  std::vector<std::optional<std::size_t>> l_max_values{std::nullopt};
  std::vector<std::optional<std::size_t>> max_len_values{std::nullopt};
};

struct EquivalenceMismatch {
  std::size_t sentence = 0;
  std::optional<std::size_t> l_max;
  std::optional<std::size_t> max_len;
  DecodeResult greedy;
  DecodeResult aggressive;
};

struct EquivalenceReport {
  std::size_t sentences = 0;
  std::size_t comparisons = 0;
  std::vector<EquivalenceMismatch> mismatches;
  std::vector<std::string> trace_violations;
  std::size_t dominance_violations = 0;  // aggressive needed more iterations than greedy
  std::size_t greedy_iterations = 0;
  std::size_t aggressive_iterations = 0;

  bool ok() const { return mismatches.empty() && trace_violations.empty() && dominance_violations == 0; }
};

/// Decodes each prepared input greedily and aggressively for every
/// (max_len, l_max) in the sweep and records any output difference.
EquivalenceReport check_equivalence(const Scorer& scorer, const std::vector<TokenSequence>& corpus,
                                    const EquivalenceSweep& sweep = {});

// ---------------------------------------------------------------------------
// Benchmarks

struct BenchOptions {
  DecodeConfig decode;  // l_max, max_len, beam_size and length_penalty are used
  std::size_t repetitions = 5;
  std::size_t warmup = 2;
  std::size_t threads = 1;  // scorer-internal math threads
  std::size_t workers = 1;  // sentences decoded concurrently by the harness
  bool include_beam = false;

  void validate() const;
};

/// Times greedy, aggressive (and optionally beam) decoding of every prepared
/// input, one sentence per call, reporting the median over repetitions.
std::vector<SentenceReport> bench(const Scorer& scorer, const std::vector<TokenSequence>& corpus,
                                  const BenchOptions& options);

struct BenchSummary {
  std::size_t sentences = 0;
  double mean_edit_ratio = 0.0;
  double mean_iteration_speedup = 0.0;
  double mean_wall_speedup = 0.0;
  double spearman_edit_vs_speedup = 0.0;
  StepStats greedy;
  StepStats aggressive;
};

BenchSummary summarize(std::span<const SentenceReport> reports);

struct LmaxRow {
  std::optional<std::size_t> l_max;
  StepStats totals;
  bool outputs_match_greedy = true;
};

/// Aggregate aggressive-decoding work per l_max; wall clock is left at zero
/// so the table is reproducible.
std::vector<LmaxRow> sweep_lmax(const Scorer& scorer, const std::vector<TokenSequence>& corpus,
                                std::span<const std::optional<std::size_t>> l_max_values,
                                const DecodeConfig& base = {});

struct DepthRow {
  TransformerConfig config;
  StepStats greedy;      // summed over sentences, wall clock = sum of medians
  StepStats aggressive;
  Seconds encode{0.0};   // summed median encode time

  double greedy_seconds_per_token() const;
  double aggressive_seconds_per_token() const;
};

/// Benchmarks one tiny transformer per config. Configs must share
/// model_dim and heads.
std::vector<DepthRow> sweep_depth(std::span<const TransformerConfig> configs, std::size_t vocab_size,
                                  const std::vector<TokenSequence>& corpus, const BenchOptions& options);

/// Median of a nonempty sample.
Seconds median(std::vector<Seconds> samples);

}  // namespace aggdec
