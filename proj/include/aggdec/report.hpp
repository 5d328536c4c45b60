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
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "aggdec/metrics.hpp"

namespace aggdec {

/// Per-sentence CSV columns:
///   index,input_len,edit_ratio,greedy_iters,aggressive_iters,iteration_speedup,
///   wall_speedup,greedy_wall_s,aggressive_wall_s,l_max,enc_layers,dec_layers
/// l_max is "unlimited" when unset; the layer columns are empty for scorers
/// without a depth.
struct ReportContext {
  std::optional<std::size_t> l_max;
  std::optional<TransformerConfig> transformer;
};

std::string format_lmax(const std::optional<std::size_t>& l_max);

void write_sentence_csv(std::ostream& out, std::span<const SentenceReport> reports, const ReportContext& context);
nlohmann::json sentence_json(std::span<const SentenceReport> reports, const ReportContext& context);
nlohmann::json summary_json(const BenchSummary& summary, const ReportContext& context);

/// Columns: l_max,aggressive_iters,positions_scored,tokens_emitted,outputs_match_greedy
void write_lmax_csv(std::ostream& out, std::span<const LmaxRow> rows);
nlohmann::json lmax_json(std::span<const LmaxRow> rows);

/// Columns: enc_layers,dec_layers,greedy_iters,aggressive_iters,greedy_wall_s,
///   aggressive_wall_s,encode_wall_s,greedy_s_per_token,aggressive_s_per_token,wall_speedup
void write_depth_csv(std::ostream& out, std::span<const DepthRow> rows);
nlohmann::json depth_json(std::span<const DepthRow> rows);

nlohmann::json equivalence_json(const EquivalenceReport& report);

}  // namespace aggdec
