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

#include <cstddef>
#include <limits>
#include <memory>
#include <span>

#include <Eigen/Core>

#include "aggdec/core.hpp"

namespace aggdec {

/// Next-token logits, one row per scored decoder position, one column per
/// vocabulary entry.
using Logits = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kMaskedLogit = -std::numeric_limits<double>::infinity();

/// Decoding state for one encoded input: the encoder representation plus any
/// incremental decoder state. Confined to a single decode.
class DecoderSession {
 public:
  virtual ~DecoderSession() = default;

  /// Scores positions first..inputs.size()-1 of the decoder input sequence.
  /// Row r of the result is the distribution of the token following
  /// inputs[0..first+r]. Requires first < inputs.size().
  ///
  /// Any cached state for positions at or beyond the longest prefix shared
  /// with the previous call is discarded.
  virtual Logits score(std::span<const TokenId> inputs, std::size_t first) = 0;

  virtual std::unique_ptr<DecoderSession> clone() const = 0;
};

/// Deterministic conditional next-token model P(o_{j+1} | o_{<=j}, x).
///
/// Implementations guarantee prefix consistency: the row for position j
/// depends only on inputs[0..j] and x, never on later positions in the same
/// call. BOS and PAD logits are always masked.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::size_t vocab_size() const = 0;

  /// Encodes a prepared input ([BOS] x [PAD]).
  virtual std::unique_ptr<DecoderSession> encode(const TokenSequence& x) const = 0;
};

}  // namespace aggdec
