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

#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aggdec/scorer.hpp"

namespace aggdec {

struct TransformerConfig {
  std::size_t encoder_layers = 6;
  std::size_t decoder_layers = 6;
  std::size_t model_dim = 64;
  std::size_t heads = 4;
  std::size_t ffn_dim = 256;
  std::optional<std::uint64_t> seed;

  /// Throws std::invalid_argument unless the config is usable: seed set,
  /// at least one layer on each side, model_dim divisible by heads.
  void validate() const;

  /// Per-token decoder cost in layer units. A decoder step runs every
  /// decoder layer once and no encoder layer.
  double decoder_step_cost() const { return static_cast<double>(decoder_layers); }

  std::string depth_label() const;  // e.g. "9+3"
};

/// Reads `key = value` lines; '#' starts a comment. Recognized keys:
/// encoder_layers, decoder_layers, model_dim, heads, ffn_dim, seed. Unknown
/// keys and non-integer values throw; validation is left to the caller.
TransformerConfig parse_transformer_config(std::istream& in);
TransformerConfig load_transformer_config(const std::string& path);

/// Forward-only encoder-decoder transformer with seeded Gaussian weights.
///
/// Post-norm layers, sinusoidal positions, ReLU feed-forward, output
/// projection tied to the embedding table. Activations are row-major with
/// one row per token.
template <typename Scalar>
class TinyTransformer {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  /// Incremental decoder state: cached self-attention keys/values for the
  /// first `length` decoder positions plus the cross-attention projections
  /// of the encoder output.
  struct DecoderState {
    std::vector<Matrix> self_keys;
    std::vector<Matrix> self_values;
    std::vector<Matrix> cross_keys;
    std::vector<Matrix> cross_values;
    Eigen::Index length = 0;
  };

  TinyTransformer(const TransformerConfig& config, std::size_t vocab_size);

  const TransformerConfig& config() const { return config_; }
  std::size_t vocab_size() const { return vocab_size_; }

  /// Encoder output, one row per input token.
  Matrix encode(std::span<const TokenId> tokens) const;

  DecoderState start(const Matrix& memory) const;

  /// Runs `tokens` as decoder positions state.length.. and appends their
  /// keys/values to the cache. Returns next-token logits, one row per token.
  Matrix decode(DecoderState& state, std::span<const TokenId> tokens) const;

 private:
  struct Attention {
    Matrix wq, wk, wv, wo;
  };
  struct FeedForward {
    Matrix w1, w2;
    RowVector b1, b2;
  };
  struct Norm {
    RowVector gain, bias;
  };
  struct EncoderLayer {
    Attention self;
    FeedForward ffn;
    Norm norm1, norm2;
  };
  struct DecoderLayer {
    Attention self, cross;
    FeedForward ffn;
    Norm norm1, norm2, norm3;
  };

  /// Entries drawn from N(0, 1/fan_in), fan_in = rows unless given.
  static Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                         std::optional<Eigen::Index> fan_in = std::nullopt);
  Attention make_attention(std::mt19937_64& rng) const;
  FeedForward make_ffn(std::mt19937_64& rng) const;
  Norm make_norm() const;

  Matrix embed(std::span<const TokenId> tokens, Eigen::Index first_position) const;

  /// Multi-head attention of `queries` over the first `key_count` rows of
  /// keys/values. With `causal_offset` set, query r sees keys 0..offset+r.
  Matrix attend(const Matrix& queries, const Matrix& keys, const Matrix& values,
                Eigen::Index key_count, std::optional<Eigen::Index> causal_offset) const;

  static void layer_norm(Matrix& x, const Norm& norm);
  static Matrix feed_forward(const Matrix& x, const FeedForward& ffn);
  static void ensure_rows(Matrix& m, Eigen::Index rows);

  TransformerConfig config_;
  std::size_t vocab_size_;
  Matrix embedding_;  // vocab x model_dim
  std::vector<EncoderLayer> encoder_;
  std::vector<DecoderLayer> decoder_;
};

/// Scorer adapter around a TinyTransformer. Sessions keep a per-layer
/// key/value cache keyed by decoder position; positions past the longest
/// prefix shared with the previous call are recomputed.
template <typename Scalar>
class TransformerScorer final : public Scorer {
 public:
  TransformerScorer(const TransformerConfig& config, std::size_t vocab_size)
      : model_(config, vocab_size) {}

  std::size_t vocab_size() const override { return model_.vocab_size(); }
  std::unique_ptr<DecoderSession> encode(const TokenSequence& x) const override;

  const TinyTransformer<Scalar>& model() const { return model_; }

 private:
  TinyTransformer<Scalar> model_;
};

/// Double-precision transformer scorer. Throws on an invalid config.
std::unique_ptr<Scorer> tiny_transformer(const TransformerConfig& config, std::size_t vocab_size);

// ---------------------------------------------------------------------------
// Implementation

template <typename Scalar>
TinyTransformer<Scalar>::TinyTransformer(const TransformerConfig& config, std::size_t vocab_size)
    : config_(config), vocab_size_(vocab_size) {
  config_.validate();
  if (vocab_size_ <= static_cast<std::size_t>(Vocab::kNumReserved)) {
    throw std::invalid_argument("vocabulary too small");
  }
  std::mt19937_64 rng(*config_.seed);
  const auto d = static_cast<Eigen::Index>(config_.model_dim);
  embedding_ = gaussian(rng, static_cast<Eigen::Index>(vocab_size_), d, d);
  for (std::size_t l = 0; l < config_.encoder_layers; ++l) {
    EncoderLayer layer;
    layer.self = make_attention(rng);
    layer.ffn = make_ffn(rng);
    layer.norm1 = make_norm();
    layer.norm2 = make_norm();
    encoder_.push_back(std::move(layer));
  }
  for (std::size_t l = 0; l < config_.decoder_layers; ++l) {
    DecoderLayer layer;
    layer.self = make_attention(rng);
    layer.cross = make_attention(rng);
    layer.ffn = make_ffn(rng);
    layer.norm1 = make_norm();
    layer.norm2 = make_norm();
    layer.norm3 = make_norm();
    decoder_.push_back(std::move(layer));
  }
}

template <typename Scalar>
auto TinyTransformer<Scalar>::gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                       std::optional<Eigen::Index> fan_in) -> Matrix {
  std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in.value_or(rows))));
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = static_cast<Scalar>(dist(rng));
  }
  return m;
}

template <typename Scalar>
auto TinyTransformer<Scalar>::make_attention(std::mt19937_64& rng) const -> Attention {
  const auto d = static_cast<Eigen::Index>(config_.model_dim);
  Attention a;
  a.wq = gaussian(rng, d, d);
  a.wk = gaussian(rng, d, d);
  a.wv = gaussian(rng, d, d);
  a.wo = gaussian(rng, d, d);
  return a;
}

template <typename Scalar>
auto TinyTransformer<Scalar>::make_ffn(std::mt19937_64& rng) const -> FeedForward {
  const auto d = static_cast<Eigen::Index>(config_.model_dim);
  const auto f = static_cast<Eigen::Index>(config_.ffn_dim);
  FeedForward ffn;
  ffn.w1 = gaussian(rng, d, f);
  ffn.w2 = gaussian(rng, f, d);
  ffn.b1 = RowVector::Zero(f);
  ffn.b2 = RowVector::Zero(d);
  return ffn;
}

template <typename Scalar>
auto TinyTransformer<Scalar>::make_norm() const -> Norm {
  const auto d = static_cast<Eigen::Index>(config_.model_dim);
  return Norm{RowVector::Ones(d), RowVector::Zero(d)};
}

template <typename Scalar>
auto TinyTransformer<Scalar>::embed(std::span<const TokenId> tokens, Eigen::Index first_position) const
    -> Matrix {
  const auto d = static_cast<Eigen::Index>(config_.model_dim);
  const double scale = std::sqrt(static_cast<double>(d));
  Matrix x(static_cast<Eigen::Index>(tokens.size()), d);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double pos = static_cast<double>(first_position + r);
    for (Eigen::Index c = 0; c < d; ++c) {
      const double freq = std::pow(10000.0, -static_cast<double>(c - c % 2) / static_cast<double>(d));
      const double pe = c % 2 == 0 ? std::sin(pos * freq) : std::cos(pos * freq);
      x(r, c) = static_cast<Scalar>(static_cast<double>(embedding_(tokens[static_cast<std::size_t>(r)], c)) * scale + pe);
    }
  }
  return x;
}

template <typename Scalar>
auto TinyTransformer<Scalar>::attend(const Matrix& queries, const Matrix& keys, const Matrix& values,
                                     Eigen::Index key_count, std::optional<Eigen::Index> causal_offset) const
    -> Matrix {
  const auto heads = static_cast<Eigen::Index>(config_.heads);
  const Eigen::Index dh = queries.cols() / heads;
  const Scalar scale = static_cast<Scalar>(1.0 / std::sqrt(static_cast<double>(dh)));
  Matrix out(queries.rows(), queries.cols());
  for (Eigen::Index h = 0; h < heads; ++h) {
    Matrix scores = (queries.middleCols(h * dh, dh) * keys.topRows(key_count).middleCols(h * dh, dh).transpose()) * scale;
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
      const Eigen::Index visible = causal_offset ? *causal_offset + r + 1 : key_count;
      auto row = scores.row(r).head(visible);
      const Scalar peak = row.maxCoeff();
      row = (row.array() - peak).exp().matrix();
      row /= row.sum();
      scores.row(r).tail(key_count - visible).setZero();
    }
    out.middleCols(h * dh, dh).noalias() = scores * values.topRows(key_count).middleCols(h * dh, dh);
  }
  return out;
}

template <typename Scalar>
void TinyTransformer<Scalar>::layer_norm(Matrix& x, const Norm& norm) {
  const auto d = static_cast<Scalar>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    const Scalar mean = row.sum() / d;
    row.array() -= mean;
    const Scalar var = row.squaredNorm() / d;
    row *= Scalar(1) / std::sqrt(var + Scalar(1e-5));
    row = row.cwiseProduct(norm.gain) + norm.bias;
  }
}

template <typename Scalar>
auto TinyTransformer<Scalar>::feed_forward(const Matrix& x, const FeedForward& ffn) -> Matrix {
  Matrix hidden = (x * ffn.w1).rowwise() + ffn.b1;
  hidden = hidden.cwiseMax(Scalar(0));
  return (hidden * ffn.w2).rowwise() + ffn.b2;
}

template <typename Scalar>
void TinyTransformer<Scalar>::ensure_rows(Matrix& m, Eigen::Index rows) {
  if (m.rows() >= rows) return;
  m.conservativeResize(std::max(rows, 2 * m.rows()), Eigen::NoChange);
}

template <typename Scalar>
auto TinyTransformer<Scalar>::encode(std::span<const TokenId> tokens) const -> Matrix {
  Matrix x = embed(tokens, 0);
  for (const auto& layer : encoder_) {
    const Matrix k = x * layer.self.wk;
    const Matrix v = x * layer.self.wv;
    x += attend(x * layer.self.wq, k, v, k.rows(), std::nullopt) * layer.self.wo;
    layer_norm(x, layer.norm1);
    x += feed_forward(x, layer.ffn);
    layer_norm(x, layer.norm2);
  }
  return x;
}

template <typename Scalar>
auto TinyTransformer<Scalar>::start(const Matrix& memory) const -> DecoderState {
  DecoderState state;
  const auto d = static_cast<Eigen::Index>(config_.model_dim);
  for (const auto& layer : decoder_) {
    state.self_keys.emplace_back(Matrix(0, d));
    state.self_values.emplace_back(Matrix(0, d));
    state.cross_keys.push_back(memory * layer.cross.wk);
    state.cross_values.push_back(memory * layer.cross.wv);
  }
  return state;
}

template <typename Scalar>
auto TinyTransformer<Scalar>::decode(DecoderState& state, std::span<const TokenId> tokens) const -> Matrix {
  const Eigen::Index offset = state.length;
  const auto t = static_cast<Eigen::Index>(tokens.size());
  Matrix x = embed(tokens, offset);
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    const auto& layer = decoder_[l];
    Matrix& keys = state.self_keys[l];
    Matrix& values = state.self_values[l];
    ensure_rows(keys, offset + t);
    ensure_rows(values, offset + t);
    keys.middleRows(offset, t).noalias() = x * layer.self.wk;
    values.middleRows(offset, t).noalias() = x * layer.self.wv;
    x += attend(x * layer.self.wq, keys, values, offset + t, offset) * layer.self.wo;
    layer_norm(x, layer.norm1);
    const Matrix& memory_keys = state.cross_keys[l];
    x += attend(x * layer.cross.wq, memory_keys, state.cross_values[l], memory_keys.rows(), std::nullopt) *
         layer.cross.wo;
    layer_norm(x, layer.norm2);
    x += feed_forward(x, layer.ffn);
    layer_norm(x, layer.norm3);
  }
  state.length = offset + t;
  Matrix logits = x * embedding_.transpose();
  logits.col(Vocab::kBos).setConstant(-std::numeric_limits<Scalar>::infinity());
  logits.col(Vocab::kPad).setConstant(-std::numeric_limits<Scalar>::infinity());
  return logits;
}

namespace detail {

template <typename Scalar>
class TransformerSession final : public DecoderSession {
 public:
  TransformerSession(const TinyTransformer<Scalar>& model, const TokenSequence& x)
      : model_(&model), state_(model.start(model.encode(x.span()))) {}

  Logits score(std::span<const TokenId> inputs, std::size_t first) override {
    if (first >= inputs.size()) throw std::invalid_argument("no positions to score");
    std::size_t keep = std::min({first, cached_.size(), static_cast<std::size_t>(state_.length)});
    for (std::size_t p = 0; p < keep; ++p) {
      if (cached_[p] != inputs[p]) {
        keep = p;
        break;
      }
    }
    state_.length = static_cast<Eigen::Index>(keep);
    const auto logits = model_->decode(state_, inputs.subspan(keep));
    cached_.assign(inputs.begin(), inputs.end());
    const auto skip = static_cast<Eigen::Index>(first - keep);
    return logits.bottomRows(logits.rows() - skip).template cast<double>();
  }

  std::unique_ptr<DecoderSession> clone() const override {
    return std::make_unique<TransformerSession>(*this);
  }

 private:
  const TinyTransformer<Scalar>* model_;
  typename TinyTransformer<Scalar>::DecoderState state_;
  std::vector<TokenId> cached_;
};

}  // namespace detail

template <typename Scalar>
std::unique_ptr<DecoderSession> TransformerScorer<Scalar>::encode(const TokenSequence& x) const {
  raw_input(x);
  return std::make_unique<detail::TransformerSession<Scalar>>(model_, x);
}

}  // namespace aggdec
