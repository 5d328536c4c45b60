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

#include "aggdec/ngram_scorer.hpp"

#include <cmath>
#include <stdexcept>

namespace aggdec {

namespace {

class NgramSession final : public DecoderSession {
 public:
  NgramSession(const NgramScorer& model, TokenSequence x) : model_(&model), x_(std::move(x)) {}

  Logits score(std::span<const TokenId> inputs, std::size_t first) override {
    if (first >= inputs.size()) throw std::invalid_argument("no positions to score");
    const auto rows = static_cast<Eigen::Index>(inputs.size() - first);
    Logits logits(rows, static_cast<Eigen::Index>(model_->vocab_size()));
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto prefix = inputs.first(first + static_cast<std::size_t>(r) + 1);
      model_->fill_log_probs(prefix, logits.row(r));
      logits(r, aligned_input_token(prefix, x_)) += model_->options().copy_bias;
      logits(r, Vocab::kBos) = kMaskedLogit;
      logits(r, Vocab::kPad) = kMaskedLogit;
    }
    return logits;
  }

  std::unique_ptr<DecoderSession> clone() const override {
    return std::make_unique<NgramSession>(*this);
  }

 private:
  const NgramScorer* model_;
  TokenSequence x_;
};

}  // namespace

TokenId aligned_input_token(std::span<const TokenId> prefix, const TokenSequence& x) {
  const std::size_t n = x.size() - 2;
  const std::size_t j = prefix.size() - 1;
  auto as_next = [&](std::size_t i) { return i + 1 > n ? Vocab::kEos : x[i + 1]; };

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i <= n; ++i) {
    if (x[i] == prefix[j]) candidates.push_back(i);
  }
  if (candidates.empty()) return as_next(std::min(j, n));

  std::size_t q = 0;
  while (q < j) {
    std::vector<std::size_t> longer;
    for (std::size_t i : candidates) {
      if (i >= q + 1 && x[i - q - 1] == prefix[j - q - 1]) longer.push_back(i);
    }
    if (longer.empty()) break;
    candidates = std::move(longer);
    ++q;
  }
  return as_next(candidates.front());
}

NgramScorer::NgramScorer(std::size_t vocab_size, const std::vector<TokenSequence>& corpus,
                         NgramOptions options)
    : vocab_size_(vocab_size), options_(options) {
  if (corpus.empty()) throw std::invalid_argument("n-gram corpus is empty");
  if (options_.order == 0) throw std::invalid_argument("n-gram order must be >= 1");
  if (!(options_.smoothing > 0.0)) throw std::invalid_argument("n-gram smoothing must be > 0");
  if (vocab_size_ <= static_cast<std::size_t>(Vocab::kNumReserved)) {
    throw std::invalid_argument("vocabulary too small");
  }
  support_ = static_cast<double>(vocab_size_ - 2);

  for (const auto& sentence : corpus) {
    std::vector<TokenId> seq(options_.order - 1, Vocab::kBos);
    seq.push_back(Vocab::kBos);
    for (TokenId t : sentence) {
      if (t < 0 || static_cast<std::size_t>(t) >= vocab_size_) {
        throw std::invalid_argument("corpus id out of vocabulary");
      }
      seq.push_back(t);
    }
    seq.push_back(Vocab::kEos);
    for (std::size_t k = options_.order; k < seq.size(); ++k) {
      const std::span<const TokenId> history(seq.data(), k);
      auto& ctx = contexts_[context_key(history)];
      ctx.counts[seq[k]] += 1.0;
      ctx.total += 1.0;
    }
  }
}

std::vector<TokenId> NgramScorer::context_key(std::span<const TokenId> history) const {
  const std::size_t width = options_.order - 1;
  std::vector<TokenId> key(width, Vocab::kBos);
  const std::size_t take = std::min(width, history.size());
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(), key.end() - static_cast<std::ptrdiff_t>(take));
  return key;
}

double NgramScorer::log_prob(std::span<const TokenId> history, TokenId token) const {
  const auto it = contexts_.find(context_key(history));
  double count = 0.0;
  double total = 0.0;
  if (it != contexts_.end()) {
    total = it->second.total;
    if (auto c = it->second.counts.find(token); c != it->second.counts.end()) count = c->second;
  }
  return std::log((count + options_.smoothing) / (total + options_.smoothing * support_));
}

void NgramScorer::fill_log_probs(std::span<const TokenId> history, Eigen::Ref<Eigen::RowVectorXd> row) const {
  const auto it = contexts_.find(context_key(history));
  const double total = it == contexts_.end() ? 0.0 : it->second.total;
  const double denom = total + options_.smoothing * support_;
  row.setConstant(std::log(options_.smoothing / denom));
  if (it != contexts_.end()) {
    for (const auto& [token, count] : it->second.counts) {
      row(token) = std::log((count + options_.smoothing) / denom);
    }
  }
}

std::unique_ptr<DecoderSession> NgramScorer::encode(const TokenSequence& x) const {
  raw_input(x);  // validates shape
  return std::make_unique<NgramSession>(*this, x);
}

std::unique_ptr<Scorer> ngram_scorer(std::size_t vocab_size, const std::vector<TokenSequence>& corpus,
                                     NgramOptions options) {
  return std::make_unique<NgramScorer>(vocab_size, corpus, options);
}

}  // namespace aggdec
