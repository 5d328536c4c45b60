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

#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "aggdec/scorer.hpp"

namespace aggdec {

struct NgramOptions {
  std::size_t order = 3;
  double smoothing = 0.1;  // additive (Lidstone) constant
  double copy_bias = 2.0;  // logit bonus for the aligned input token
};

/// Additively smoothed n-gram model over the decoder history plus a copy
/// bonus for the input token aligned with the current decoder position.
///
/// Alignment: take the longest suffix of the decoder prefix that occurs in
/// x_{0..n}; its leftmost occurrence ending at i aligns the next token with
/// x_{i+1}. If the last token is absent from x, alignment falls back to
/// position: x_{j+1}. An aligned PAD stands for EOS.
class NgramScorer final : public Scorer {
 public:
  NgramScorer(std::size_t vocab_size, const std::vector<TokenSequence>& corpus, NgramOptions options);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::unique_ptr<DecoderSession> encode(const TokenSequence& x) const override;

  const NgramOptions& options() const { return options_; }

  /// Smoothed log P(token | history); only the last order-1 history tokens count.
  double log_prob(std::span<const TokenId> history, TokenId token) const;

  /// Fills `row` with log-probabilities for every token after `history`.
  void fill_log_probs(std::span<const TokenId> history, Eigen::Ref<Eigen::RowVectorXd> row) const;

 private:
  struct Context {
    std::unordered_map<TokenId, double> counts;
    double total = 0.0;
  };

  std::vector<TokenId> context_key(std::span<const TokenId> history) const;

  std::size_t vocab_size_;
  NgramOptions options_;
  double support_;  // number of predictable tokens
  std::map<std::vector<TokenId>, Context> contexts_;
};

/// Throws std::invalid_argument on an empty corpus, order 0 or smoothing <= 0.
std::unique_ptr<Scorer> ngram_scorer(std::size_t vocab_size, const std::vector<TokenSequence>& corpus,
                                     NgramOptions options = {});

/// Aligned input token for the decoder prefix; exposed for tests.
TokenId aligned_input_token(std::span<const TokenId> prefix, const TokenSequence& x);

}  // namespace aggdec
