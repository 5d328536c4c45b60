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
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "aggdec/core.hpp"

namespace aggdec::testing {

/// Uniform token ids in [kNumReserved, vocab_size).
inline TokenSequence random_sentence(std::mt19937_64& rng, std::size_t length, std::size_t vocab_size) {
  std::uniform_int_distribution<TokenId> pick(Vocab::kNumReserved, static_cast<TokenId>(vocab_size) - 1);
  std::vector<TokenId> ids(length);
  for (auto& t : ids) t = pick(rng);
  return TokenSequence(std::move(ids));
}

/// Applies `edits` random substitutions, insertions and deletions.
inline TokenSequence random_edit(std::mt19937_64& rng, const TokenSequence& source, std::size_t edits,
                                 std::size_t vocab_size) {
  std::vector<TokenId> ids = source.ids();
  std::uniform_int_distribution<TokenId> pick(Vocab::kNumReserved, static_cast<TokenId>(vocab_size) - 1);
  std::uniform_int_distribution<int> kind(0, 2);
  for (std::size_t e = 0; e < edits; ++e) {
    const int k = ids.empty() ? 1 : kind(rng);
    if (k == 1) {
      std::uniform_int_distribution<std::size_t> at(0, ids.size());
      ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(at(rng)), pick(rng));
      continue;
    }
    std::uniform_int_distribution<std::size_t> at(0, ids.size() - 1);
    const std::size_t p = at(rng);
    if (k == 0) {
      ids[p] = pick(rng);
    } else {
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(p));
    }
  }
  return TokenSequence(std::move(ids));
}

/// Reference suffix matcher: for each suffix length, count occurrences in
/// x_{0..n} by direct comparison.
inline std::optional<std::pair<std::size_t, std::size_t>> naive_suffix_match(std::span<const TokenId> o,
                                                                             std::span<const TokenId> x) {
  const std::size_t n = x.size() - 2;
  const std::size_t j = o.size() - 1;
  for (std::size_t q = 0; q <= j; ++q) {
    std::size_t count = 0;
    std::size_t where = 0;
    for (std::size_t i = q; i <= n; ++i) {
      bool equal = true;
      for (std::size_t t = 0; t <= q; ++t) {
        if (x[i - t] != o[j - t]) {
          equal = false;
          break;
        }
      }
      if (equal) {
        ++count;
        where = i;
      }
    }
    if (count == 0) return std::nullopt;
    if (count == 1) return std::make_pair(where, q);
  }
  return std::nullopt;
}

inline std::size_t recursive_levenshtein(std::span<const TokenId> a, std::span<const TokenId> b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::size_t cost = a.back() == b.back() ? 0 : 1;
  const auto a1 = a.first(a.size() - 1);
  const auto b1 = b.first(b.size() - 1);
  return std::min({recursive_levenshtein(a1, b) + 1, recursive_levenshtein(a, b1) + 1,
                   recursive_levenshtein(a1, b1) + cost});
}

/// Every sequence of length <= max_length over `alphabet`.
inline std::vector<std::vector<TokenId>> all_sequences(std::span<const TokenId> alphabet, std::size_t max_length) {
  std::vector<std::vector<TokenId>> out{{}};
  std::vector<std::vector<TokenId>> frontier{{}};
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::vector<std::vector<TokenId>> next;
    for (const auto& s : frontier) {
      for (TokenId t : alphabet) {
        auto e = s;
        e.push_back(t);
        next.push_back(std::move(e));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

/// Linear scan argmax; first maximum wins, -inf entries skipped.
inline std::optional<std::size_t> scan_argmax(std::span<const double> v) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::isinf(v[i]) && v[i] < 0) continue;
    if (!best || v[i] > v[*best]) best = i;
  }
  return best;
}

}  // namespace aggdec::testing
