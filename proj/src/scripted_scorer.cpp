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

#include "aggdec/scripted_scorer.hpp"

#include <stdexcept>

namespace aggdec {

namespace {

class ScriptedSession final : public DecoderSession {
 public:
  ScriptedSession(std::size_t vocab_size, TokenSequence x, const std::vector<TokenId>* target)
      : vocab_size_(vocab_size), x_(std::move(x)), target_(target) {}

  Logits score(std::span<const TokenId> inputs, std::size_t first) override {
    if (first >= inputs.size()) throw std::invalid_argument("no positions to score");
    const std::size_t n = x_.size() - 2;

    // Number of leading output tokens (after BOS) that agree with the target.
    std::size_t on_target = 0;
    if (target_ != nullptr) {
      while (on_target + 1 < inputs.size() && on_target < target_->size() &&
             inputs[on_target + 1] == (*target_)[on_target]) {
        ++on_target;
      }
    }

    const auto rows = static_cast<Eigen::Index>(inputs.size() - first);
    Logits logits = Logits::Constant(rows, static_cast<Eigen::Index>(vocab_size_), ScriptedScorer::kOffLogit);
    logits.col(Vocab::kBos).setConstant(kMaskedLogit);
    logits.col(Vocab::kPad).setConstant(kMaskedLogit);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const std::size_t j = first + static_cast<std::size_t>(r);
      TokenId next = Vocab::kEos;
      if (target_ != nullptr && j <= on_target) {
        if (j < target_->size()) next = (*target_)[j];
      } else if (j + 1 <= n) {
        next = x_[j + 1];
      }
      logits(r, next) = 0.0;
    }
    return logits;
  }

  std::unique_ptr<DecoderSession> clone() const override {
    return std::make_unique<ScriptedSession>(*this);
  }

 private:
  std::size_t vocab_size_;
  TokenSequence x_;
  const std::vector<TokenId>* target_;
};

}  // namespace

ScriptedScorer::ScriptedScorer(std::size_t vocab_size,
                               const std::vector<std::pair<TokenSequence, TokenSequence>>& pairs)
    : vocab_size_(vocab_size) {
  if (vocab_size_ <= static_cast<std::size_t>(Vocab::kNumReserved)) {
    throw std::invalid_argument("vocabulary too small");
  }
  for (const auto& [source, target] : pairs) {
    for (TokenId t : target) {
      if (Vocab::is_sentinel(t) || t < 0 || static_cast<std::size_t>(t) >= vocab_size_) {
        throw std::invalid_argument("scripted target holds an invalid or sentinel id");
      }
    }
    if (!table_.emplace(source.ids(), target.ids()).second) {
      throw std::invalid_argument("duplicate scripted source");
    }
  }
}

std::unique_ptr<DecoderSession> ScriptedScorer::encode(const TokenSequence& x) const {
  const auto raw = raw_input(x);
  const auto it = table_.find(raw.ids());
  return std::make_unique<ScriptedSession>(vocab_size_, x, it == table_.end() ? nullptr : &it->second);
}

std::unique_ptr<Scorer> scripted_edit_scorer(
    std::size_t vocab_size, const std::vector<std::pair<TokenSequence, TokenSequence>>& pairs) {
  return std::make_unique<ScriptedScorer>(vocab_size, pairs);
}

std::unique_ptr<Scorer> identity_scorer(std::size_t vocab_size) {
  return std::make_unique<ScriptedScorer>(vocab_size, std::vector<std::pair<TokenSequence, TokenSequence>>{});
}

}  // namespace aggdec
