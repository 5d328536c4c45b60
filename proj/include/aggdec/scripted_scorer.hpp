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
#include <utility>
#include <vector>

#include "aggdec/scorer.hpp"

namespace aggdec {

/// Scorer that reproduces a fixed table of source -> target rewrites.
///
/// For a known source, while the decoder prefix follows the target it
/// predicts the next target token (EOS after the last). Off the target, and
/// for unknown sources, it copies the source positionally: the token after
/// decoder position j is x_{j+1}, or EOS once j >= n. With no pairs this is
/// the identity corrector.
class ScriptedScorer final : public Scorer {
 public:
  /// Logit of every non-chosen, unmasked token. The chosen token gets 0.
  static constexpr double kOffLogit = -8.0;

  ScriptedScorer(std::size_t vocab_size,
                 const std::vector<std::pair<TokenSequence, TokenSequence>>& pairs);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::unique_ptr<DecoderSession> encode(const TokenSequence& x) const override;

  std::size_t num_pairs() const { return table_.size(); }

 private:
  std::size_t vocab_size_;
  std::map<std::vector<TokenId>, std::vector<TokenId>> table_;
};

/// Raw sources and targets (no sentinels). Throws on duplicate sources.
std::unique_ptr<Scorer> scripted_edit_scorer(
    std::size_t vocab_size, const std::vector<std::pair<TokenSequence, TokenSequence>>& pairs);

std::unique_ptr<Scorer> identity_scorer(std::size_t vocab_size);

}  // namespace aggdec
