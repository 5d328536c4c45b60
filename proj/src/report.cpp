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

#include "aggdec/report.hpp"

#include <cmath>
#include <sstream>

namespace aggdec {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

nlohmann::json stats_json(const StepStats& s) {
  return {{"sequential_iterations", s.sequential_iterations},
          {"positions_scored", s.positions_scored},
          {"tokens_emitted", s.tokens_emitted},
          {"wall_clock_s", s.wall_clock.count()}};
}

nlohmann::json lmax_value(const std::optional<std::size_t>& l_max) {
  if (l_max) return *l_max;
  return "unlimited";
}

}  // namespace

std::string format_lmax(const std::optional<std::size_t>& l_max) {
  return l_max ? std::to_string(*l_max) : std::string("unlimited");
}

void write_sentence_csv(std::ostream& out, std::span<const SentenceReport> reports, const ReportContext& context) {
  out << "index,input_len,edit_ratio,greedy_iters,aggressive_iters,iteration_speedup,wall_speedup,"
         "greedy_wall_s,aggressive_wall_s,l_max,enc_layers,dec_layers\n";
  const std::string enc = context.transformer ? std::to_string(context.transformer->encoder_layers) : "";
  const std::string dec = context.transformer ? std::to_string(context.transformer->decoder_layers) : "";
  for (const auto& r : reports) {
    out << r.index << ',' << r.input_length << ',' << num(r.edit_ratio) << ',' << r.greedy.sequential_iterations
        << ',' << r.aggressive.sequential_iterations << ',' << num(r.iteration_speedup) << ','
        << num(r.wall_speedup) << ',' << num(r.greedy.wall_clock.count()) << ','
        << num(r.aggressive.wall_clock.count()) << ',' << format_lmax(context.l_max) << ',' << enc << ',' << dec
        << '\n';
  }
}

nlohmann::json sentence_json(std::span<const SentenceReport> reports, const ReportContext& context) {
  auto rows = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json row = {{"index", r.index},
                          {"input_len", r.input_length},
                          {"edit_ratio", r.edit_ratio},
                          {"greedy", stats_json(r.greedy)},
                          {"aggressive", stats_json(r.aggressive)},
                          {"iteration_speedup", r.iteration_speedup},
                          {"wall_speedup", r.wall_speedup},
                          {"l_max", lmax_value(context.l_max)}};
    if (r.beam) row["beam"] = stats_json(*r.beam);
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json summary_json(const BenchSummary& summary, const ReportContext& context) {
  nlohmann::json j = {{"sentences", summary.sentences},
                      {"mean_edit_ratio", summary.mean_edit_ratio},
                      {"mean_iteration_speedup", summary.mean_iteration_speedup},
                      {"mean_wall_speedup", summary.mean_wall_speedup},
                      {"greedy", stats_json(summary.greedy)},
                      {"aggressive", stats_json(summary.aggressive)},
                      {"l_max", lmax_value(context.l_max)}};
  if (std::isnan(summary.spearman_edit_vs_speedup)) {
    j["spearman_edit_vs_speedup"] = nullptr;
  } else {
    j["spearman_edit_vs_speedup"] = summary.spearman_edit_vs_speedup;
  }
  if (context.transformer) {
    j["enc_layers"] = context.transformer->encoder_layers;
    j["dec_layers"] = context.transformer->decoder_layers;
  }
  return j;
}

void write_lmax_csv(std::ostream& out, std::span<const LmaxRow> rows) {
  out << "l_max,aggressive_iters,positions_scored,tokens_emitted,outputs_match_greedy\n";
  for (const auto& r : rows) {
    out << format_lmax(r.l_max) << ',' << r.totals.sequential_iterations << ',' << r.totals.positions_scored << ','
        << r.totals.tokens_emitted << ',' << (r.outputs_match_greedy ? "true" : "false") << '\n';
  }
}

nlohmann::json lmax_json(std::span<const LmaxRow> rows) {
  auto j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"l_max", lmax_value(r.l_max)},
                 {"aggressive_iters", r.totals.sequential_iterations},
                 {"positions_scored", r.totals.positions_scored},
                 {"tokens_emitted", r.totals.tokens_emitted},
                 {"outputs_match_greedy", r.outputs_match_greedy}});
  }
  return j;
}

void write_depth_csv(std::ostream& out, std::span<const DepthRow> rows) {
  out << "enc_layers,dec_layers,greedy_iters,aggressive_iters,greedy_wall_s,aggressive_wall_s,encode_wall_s,"
         "greedy_s_per_token,aggressive_s_per_token,wall_speedup\n";
  for (const auto& r : rows) {
    const double speedup =
        r.aggressive.wall_clock.count() > 0.0 ? r.greedy.wall_clock.count() / r.aggressive.wall_clock.count() : 1.0;
    out << r.config.encoder_layers << ',' << r.config.decoder_layers << ',' << r.greedy.sequential_iterations << ','
        << r.aggressive.sequential_iterations << ',' << num(r.greedy.wall_clock.count()) << ','
        << num(r.aggressive.wall_clock.count()) << ',' << num(r.encode.count()) << ','
        << num(r.greedy_seconds_per_token()) << ',' << num(r.aggressive_seconds_per_token()) << ',' << num(speedup)
        << '\n';
  }
}

nlohmann::json depth_json(std::span<const DepthRow> rows) {
  auto j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"enc_layers", r.config.encoder_layers},
                 {"dec_layers", r.config.decoder_layers},
                 {"greedy", stats_json(r.greedy)},
                 {"aggressive", stats_json(r.aggressive)},
                 {"encode_wall_s", r.encode.count()},
                 {"greedy_s_per_token", r.greedy_seconds_per_token()},
                 {"aggressive_s_per_token", r.aggressive_seconds_per_token()}});
  }
  return j;
}

nlohmann::json equivalence_json(const EquivalenceReport& report) {
  auto mismatches = nlohmann::json::array();
  for (const auto& m : report.mismatches) {
    mismatches.push_back({{"sentence", m.sentence},
                          {"l_max", lmax_value(m.l_max)},
                          {"greedy", m.greedy.output.ids()},
                          {"aggressive", m.aggressive.output.ids()}});
  }
  return {{"sentences", report.sentences},
          {"comparisons", report.comparisons},
          {"mismatches", report.mismatches.size()},
          {"mismatch_details", mismatches},
          {"trace_violations", report.trace_violations},
          {"dominance_violations", report.dominance_violations},
          {"greedy_iterations", report.greedy_iterations},
          {"aggressive_iterations", report.aggressive_iterations}};
}

}  // namespace aggdec
