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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aggdec {

using TokenId = std::int32_t;

/// Token vocabulary with four reserved sentinels at fixed ids.
///
/// Reserved ids are 0..3 (BOS, EOS, PAD, UNK); ordinary tokens follow in
/// insertion order. Surface strings are unique.
class Vocab {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEos = 1;
  static constexpr TokenId kPad = 2;
  static constexpr TokenId kUnk = 3;
  static constexpr TokenId kNumReserved = 4;

  Vocab();
  explicit Vocab(const std::vector<std::string>& tokens);

  /// Adds a token if absent and returns its id.
  TokenId add(std::string_view token);

  TokenId bos() const { return kBos; }
  TokenId eos() const { return kEos; }
  TokenId pad() const { return kPad; }
  TokenId unk() const { return kUnk; }

  std::size_t size() const { return surfaces_.size(); }
  bool contains(TokenId id) const { return id >= 0 && static_cast<std::size_t>(id) < size(); }
  static bool is_sentinel(TokenId id) { return id == kBos || id == kEos || id == kPad; }

  /// Id of `token`, or UNK when out of vocabulary.
  TokenId id(std::string_view token) const;
  std::optional<TokenId> find(std::string_view token) const;
  const std::string& surface(TokenId id) const;

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Ordered token ids. Used for raw sentences, prepared encoder inputs
/// ([BOS] x [PAD]) and decoder outputs ([BOS] o [EOS]).
class TokenSequence {
 public:
  TokenSequence() = default;
  TokenSequence(std::initializer_list<TokenId> ids) : ids_(ids) {}
  explicit TokenSequence(std::vector<TokenId> ids) : ids_(std::move(ids)) {}

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  TokenId operator[](std::size_t i) const { return ids_[i]; }
  TokenId back() const { return ids_.back(); }
  void push_back(TokenId id) { ids_.push_back(id); }
  void append(std::span<const TokenId> ids) { ids_.insert(ids_.end(), ids.begin(), ids.end()); }
  void truncate(std::size_t n) { ids_.resize(std::min(n, ids_.size())); }

  std::span<const TokenId> span() const { return ids_; }
  const std::vector<TokenId>& ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  /// Copy of [first, first + count), clamped to the sequence end.
  TokenSequence slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<TokenId> ids_;
};

enum class TokenScheme { kWhitespace, kCharacter };

/// [BOS] + raw + [PAD]. Throws std::invalid_argument if raw holds a sentinel.
TokenSequence prepare_input(const TokenSequence& raw, const Vocab& vocab);

/// Inverse of prepare_input: the tokens strictly between BOS and PAD.
TokenSequence raw_input(const TokenSequence& prepared);

/// Decoder output without the leading BOS and trailing EOS.
TokenSequence strip_sentinels(const TokenSequence& seq);

TokenSequence tokenize(std::string_view text, TokenScheme scheme, const Vocab& vocab);

/// Sentinels render as empty, UNK as "<unk>". Whitespace scheme joins with a
/// single space, character scheme concatenates.
std::string detokenize(const TokenSequence& seq, const Vocab& vocab,
                       TokenScheme scheme = TokenScheme::kWhitespace);

/// Splits into the units the scheme tokenizes on (words or UTF-8 code points).
std::vector<std::string> split_units(std::string_view text, TokenScheme scheme);

/// Vocabulary holding every unit of `lines`, in first-seen order.
Vocab build_vocab(const std::vector<std::string>& lines, TokenScheme scheme);

std::optional<TokenScheme> parse_scheme(std::string_view name);

// ---------------------------------------------------------------------------
// Decode trace

enum class IterationMode { kAggressive, kAutoregressive };

struct SuffixMatch {
  std::size_t i = 0;  // end index of the match in the prepared input
  std::size_t q = 0;  // matched suffix length minus one

  friend bool operator==(const SuffixMatch&, const SuffixMatch&) = default;
};

struct IterationRecord {
  IterationMode mode = IterationMode::kAutoregressive;
  std::size_t positions_scored = 0;
  std::size_t accepted = 0;
  std::optional<SuffixMatch> suffix_match;
  std::optional<std::size_t> bifurcation;  // output index of the bifurcation token
};

struct DecodeTrace {
  std::vector<IterationRecord> iterations;

  std::size_t sequential_iterations() const { return iterations.size(); }
  std::size_t positions_scored() const;
  std::size_t accepted() const;
};

/// Checks the trace against an output of `output_length` tokens (BOS
/// excluded). Returns a description of the first violation, if any.
std::optional<std::string> validate_trace(const DecodeTrace& trace, std::size_t output_length);

// ---------------------------------------------------------------------------
// Decode configuration

enum class DecodeMode { kGreedy, kBeam, kAggressive };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kGreedy;
  std::optional<std::size_t> max_len;  // unset: 2 * |x| + 16
  std::optional<std::size_t> l_max;    // unset: unlimited
  std::size_t beam_size = 5;
  double length_penalty = 0.0;

  /// Throws std::invalid_argument on a zero max_len, l_max or beam_size, or a
  /// negative length penalty.
  void validate() const;

  /// MAX_LEN for a raw input of `input_length` tokens.
  std::size_t effective_max_len(std::size_t input_length) const;
};

std::optional<DecodeMode> parse_mode(std::string_view name);
std::string_view to_string(DecodeMode mode);

}  // namespace aggdec
