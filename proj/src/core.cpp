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

#include "aggdec/core.hpp"

#include <stdexcept>

namespace aggdec {

namespace {

constexpr const char* kReservedSurfaces[] = {"<bos>", "<eos>", "<pad>", "<unk>"};

}  // namespace

Vocab::Vocab() {
  for (const char* s : kReservedSurfaces) {
    index_.emplace(s, static_cast<TokenId>(surfaces_.size()));
    surfaces_.emplace_back(s);
  }
}

Vocab::Vocab(const std::vector<std::string>& tokens) : Vocab() {
  for (const auto& t : tokens) {
    if (index_.contains(t)) {
      throw std::invalid_argument("duplicate vocabulary entry: " + t);
    }
    add(t);
  }
}

TokenId Vocab::add(std::string_view token) {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
  const auto id = static_cast<TokenId>(surfaces_.size());
  surfaces_.emplace_back(token);
  index_.emplace(surfaces_.back(), id);
  return id;
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
  return std::nullopt;
}

TokenId Vocab::id(std::string_view token) const { return find(token).value_or(kUnk); }

const std::string& Vocab::surface(TokenId id) const {
  if (!contains(id)) throw std::out_of_range("token id " + std::to_string(id) + " not in vocabulary");
  return surfaces_[static_cast<std::size_t>(id)];
}

TokenSequence TokenSequence::slice(std::size_t first, std::size_t count) const {
  first = std::min(first, ids_.size());
  const std::size_t last = std::min(ids_.size(), first + count);
  return TokenSequence(std::vector<TokenId>(ids_.begin() + first, ids_.begin() + last));
}

TokenSequence prepare_input(const TokenSequence& raw, const Vocab& vocab) {
  std::vector<TokenId> ids;
  ids.reserve(raw.size() + 2);
  ids.push_back(vocab.bos());
  for (TokenId t : raw) {
    if (Vocab::is_sentinel(t)) {
      throw std::invalid_argument("raw input contains sentinel id " + std::to_string(t));
    }
    if (!vocab.contains(t)) throw std::invalid_argument("raw input id out of vocabulary");
    ids.push_back(t);
  }
  ids.push_back(vocab.pad());
  return TokenSequence(std::move(ids));
}

TokenSequence raw_input(const TokenSequence& prepared) {
  if (prepared.size() < 2 || prepared[0] != Vocab::kBos || prepared.back() != Vocab::kPad) {
    throw std::invalid_argument("sequence is not a prepared input");
  }
  return prepared.slice(1, prepared.size() - 2);
}

TokenSequence strip_sentinels(const TokenSequence& seq) {
  std::vector<TokenId> ids;
  ids.reserve(seq.size());
  for (TokenId t : seq) {
    if (!Vocab::is_sentinel(t)) ids.push_back(t);
  }
  return TokenSequence(std::move(ids));
}

std::vector<std::string> split_units(std::string_view text, TokenScheme scheme) {
  std::vector<std::string> units;
  if (scheme == TokenScheme::kWhitespace) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto start = text.find_first_not_of(" \t\r\n", pos);
      if (start == std::string_view::npos) break;
      auto stop = text.find_first_of(" \t\r\n", start);
      if (stop == std::string_view::npos) stop = text.size();
      units.emplace_back(text.substr(start, stop - start));
      pos = stop;
    }
    return units;
  }
  // UTF-8 code points; a malformed lead byte is taken as a single unit.
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto lead = static_cast<unsigned char>(text[pos]);
    std::size_t len = 1;
    if ((lead & 0xE0) == 0xC0) len = 2;
    else if ((lead & 0xF0) == 0xE0) len = 3;
    else if ((lead & 0xF8) == 0xF0) len = 4;
    len = std::min(len, text.size() - pos);
    units.emplace_back(text.substr(pos, len));
    pos += len;
  }
  return units;
}

TokenSequence tokenize(std::string_view text, TokenScheme scheme, const Vocab& vocab) {
  std::vector<TokenId> ids;
  for (const auto& unit : split_units(text, scheme)) ids.push_back(vocab.id(unit));
  return TokenSequence(std::move(ids));
}

std::string detokenize(const TokenSequence& seq, const Vocab& vocab, TokenScheme scheme) {
  std::string out;
  bool first = true;
  for (TokenId t : seq) {
    const std::string& s = vocab.surface(t);
    if (Vocab::is_sentinel(t)) continue;
    if (!first && scheme == TokenScheme::kWhitespace) out += ' ';
    out += s;
    first = false;
  }
  return out;
}

Vocab build_vocab(const std::vector<std::string>& lines, TokenScheme scheme) {
  Vocab vocab;
  for (const auto& line : lines) {
    for (const auto& unit : split_units(line, scheme)) vocab.add(unit);
  }
  return vocab;
}

std::optional<TokenScheme> parse_scheme(std::string_view name) {
  if (name == "whitespace") return TokenScheme::kWhitespace;
  if (name == "character") return TokenScheme::kCharacter;
  return std::nullopt;
}

std::size_t DecodeTrace::positions_scored() const {
  std::size_t total = 0;
  for (const auto& it : iterations) total += it.positions_scored;
  return total;
}

std::size_t DecodeTrace::accepted() const {
  std::size_t total = 0;
  for (const auto& it : iterations) total += it.accepted;
  return total;
}

std::optional<std::string> validate_trace(const DecodeTrace& trace, std::size_t output_length) {
  for (std::size_t n = 0; n < trace.iterations.size(); ++n) {
    const auto& it = trace.iterations[n];
    const std::string where = "iteration " + std::to_string(n) + ": ";
    if (it.mode == IterationMode::kAggressive) {
      if (it.accepted < 1) return where + "aggressive iteration accepted no token";
      if (it.accepted > it.positions_scored) return where + "accepted more tokens than scored";
      if (!it.suffix_match) return where + "aggressive iteration without a suffix match";
    } else if (it.positions_scored != 1 || it.accepted != 1) {
      return where + "autoregressive iteration must score and accept exactly one token";
    }
  }
  if (trace.accepted() != output_length) {
    return "accepted total " + std::to_string(trace.accepted()) + " != output length " +
           std::to_string(output_length);
  }
  return std::nullopt;
}

void DecodeConfig::validate() const {
  if (max_len && *max_len == 0) throw std::invalid_argument("max_len must be >= 1");
  if (l_max && *l_max == 0) throw std::invalid_argument("l_max must be >= 1");
  if (beam_size == 0) throw std::invalid_argument("beam_size must be >= 1");
  if (!(length_penalty >= 0.0)) throw std::invalid_argument("length_penalty must be >= 0");
}

std::size_t DecodeConfig::effective_max_len(std::size_t input_length) const {
  return max_len.value_or(2 * input_length + 16);
}

std::optional<DecodeMode> parse_mode(std::string_view name) {
  if (name == "greedy") return DecodeMode::kGreedy;
  if (name == "beam") return DecodeMode::kBeam;
  if (name == "aggressive") return DecodeMode::kAggressive;
  return std::nullopt;
}

std::string_view to_string(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kGreedy: return "greedy";
    case DecodeMode::kBeam: return "beam";
    case DecodeMode::kAggressive: return "aggressive";
  }
  return "unknown";
}

}  // namespace aggdec
