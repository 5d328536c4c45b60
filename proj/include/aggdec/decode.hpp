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

#include <optional>
#include <span>

#include "aggdec/core.hpp"
#include "aggdec/scorer.hpp"

namespace aggdec {

struct DecodeResult {
  TokenSequence output;  // [BOS] o_1..o_m, EOS-terminated unless MAX_LEN was hit
  DecodeTrace trace;
  double score = 0.0;  // sum of chosen-token log-probabilities
  std::size_t positions_scored = 0;  // across all scorer calls, all hypotheses

  /// Output length without BOS.
  std::size_t length() const { return output.empty() ? 0 : output.size() - 1; }
};

/// Index of the largest entry; ties go to the smallest index. Throws
/// std::invalid_argument when every entry is -inf (or the span is empty).
TokenId argmax_with_tiebreak(std::span<const double> logits);

/// Shortest suffix o_{j-q..j} of `o` that occurs exactly once in x_{0..n}
/// (BOS plus the real tokens of the prepared input, PAD excluded).
/// Returns nullopt as soon as a suffix has no occurrence, or when the whole
/// of `o` is still ambiguous.
std::optional<SuffixMatch> find_suffix_match(std::span<const TokenId> o, const TokenSequence& x);

/// 1-based position of the first disagreement, nullopt if all agree. Throws
/// std::invalid_argument on empty or unequal-length inputs.
std::optional<std::size_t> find_bifurcation(std::span<const TokenId> predictions,
                                            std::span<const TokenId> copied);

/// One token per scorer call, argmax each step.
DecodeResult greedy_decode(const Scorer& scorer, const TokenSequence& x, const DecodeConfig& cfg);

/// Beam search over summed log-probabilities, final ranking by
/// score / length^alpha. The trace holds one autoregressive record per
/// output token of the returned hypothesis.
DecodeResult beam_decode(const Scorer& scorer, const TokenSequence& x, const DecodeConfig& cfg);

/// Copy-and-verify decoding. Each iteration either scores a window of
/// copied input tokens in one call (after a unique suffix match) and keeps
/// the predictions up to and including the first disagreement, or falls
/// back to a single greedy step. Emits exactly the greedy output for a
/// prefix-consistent scorer.
DecodeResult aggressive_decode(const Scorer& scorer, const TokenSequence& x, const DecodeConfig& cfg);

/// Dispatches on cfg.mode.
DecodeResult decode(const Scorer& scorer, const TokenSequence& x, const DecodeConfig& cfg);

}  // namespace aggdec
