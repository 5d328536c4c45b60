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

#include "aggdec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace aggdec {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t stop = start;
    while (stop + 1 < order.size() && values[order[stop + 1]] == values[order[start]]) ++stop;
    const double rank = 0.5 * static_cast<double>(start + stop) + 1.0;
    for (std::size_t k = start; k <= stop; ++k) ranks[order[k]] = rank;
    start = stop + 1;
  }
  return ranks;
}

template <typename Fn>
std::pair<DecodeResult, Seconds> timed(const BenchOptions& options, Fn&& run) {
  for (std::size_t w = 0; w < options.warmup; ++w) run();
  std::vector<Seconds> samples;
  DecodeResult result;
  for (std::size_t r = 0; r < options.repetitions; ++r) {
    const auto start = Clock::now();
    result = run();
    samples.push_back(Clock::now() - start);
  }
  return {std::move(result), median(std::move(samples))};
}

/// Runs fn(index) for index in [0, count) on `workers` threads.
template <typename Fn>
void fan_out(std::size_t count, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

double ratio(double numerator, double denominator) {
  return denominator > 0.0 ? numerator / denominator : 1.0;
}

}  // namespace

std::size_t levenshtein(std::span<const TokenId> a, std::span<const TokenId> b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t k = 1; k <= b.size(); ++k) {
      const std::size_t sub = prev[k - 1] + (a[i - 1] == b[k - 1] ? 0 : 1);
      cur[k] = std::min({prev[k] + 1, cur[k - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double edit_ratio(const TokenSequence& input, const TokenSequence& output) {
  if (input.empty()) throw std::invalid_argument("edit ratio of an empty input");
  return static_cast<double>(levenshtein(input.span(), output.span())) / static_cast<double>(input.size());
}

double spearman(std::span<const double> a, std::span<const double> b) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (a.size() != b.size() || a.size() < 2) return nan;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return nan;
  return cov / std::sqrt(va * vb);
}

StepStats& StepStats::operator+=(const StepStats& other) {
  sequential_iterations += other.sequential_iterations;
  positions_scored += other.positions_scored;
  tokens_emitted += other.tokens_emitted;
  wall_clock += other.wall_clock;
  return *this;
}

StepStats step_stats(const DecodeResult& result, Seconds wall_clock) {
  StepStats s;
  s.sequential_iterations = result.trace.sequential_iterations();
  s.positions_scored = result.positions_scored;
  s.tokens_emitted = result.length();
  s.wall_clock = wall_clock;
  return s;
}

Seconds median(std::vector<Seconds> samples) {
  if (samples.empty()) throw std::invalid_argument("median of no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  if (samples.size() % 2 == 1) return samples[mid];
  return (samples[mid - 1] + samples[mid]) / 2.0;
}

EquivalenceReport check_equivalence(const Scorer& scorer, const std::vector<TokenSequence>& corpus,
                                    const EquivalenceSweep& sweep) {
  EquivalenceReport report;
  report.sentences = corpus.size();
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    for (const auto& max_len : sweep.max_len_values) {
      DecodeConfig cfg;
      cfg.max_len = max_len;
      cfg.mode = DecodeMode::kGreedy;
      DecodeResult greedy = greedy_decode(scorer, corpus[s], cfg);
      for (const auto& l_max : sweep.l_max_values) {
        cfg.mode = DecodeMode::kAggressive;
        cfg.l_max = l_max;
        DecodeResult aggressive = aggressive_decode(scorer, corpus[s], cfg);
        ++report.comparisons;
        report.greedy_iterations += greedy.trace.sequential_iterations();
        report.aggressive_iterations += aggressive.trace.sequential_iterations();
        if (aggressive.trace.sequential_iterations() > greedy.trace.sequential_iterations()) {
          ++report.dominance_violations;
        }
        for (const auto* r : {&greedy, &aggressive}) {
          if (auto v = validate_trace(r->trace, r->length())) {
            report.trace_violations.push_back("sentence " + std::to_string(s) + ": " + *v);
          }
        }
        if (aggressive.output != greedy.output) {
          report.mismatches.push_back({s, l_max, max_len, greedy, std::move(aggressive)});
        }
      }
    }
  }
  return report;
}

void BenchOptions::validate() const {
  decode.validate();
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

std::vector<SentenceReport> bench(const Scorer& scorer, const std::vector<TokenSequence>& corpus,
                                  const BenchOptions& options) {
  options.validate();
  Eigen::setNbThreads(static_cast<int>(options.threads));
  std::vector<SentenceReport> reports(corpus.size());

  fan_out(corpus.size(), options.workers, [&](std::size_t s) {
    const TokenSequence& x = corpus[s];
    DecodeConfig cfg = options.decode;
    auto [greedy, greedy_wall] = timed(options, [&] { return greedy_decode(scorer, x, cfg); });
    auto [aggressive, aggressive_wall] = timed(options, [&] { return aggressive_decode(scorer, x, cfg); });

    SentenceReport& rep = reports[s];
    rep.index = s;
    const TokenSequence raw = raw_input(x);
    rep.input_length = raw.size();
    rep.edit_ratio = raw.empty() ? 0.0 : edit_ratio(raw, strip_sentinels(greedy.output));
    rep.greedy = step_stats(greedy, greedy_wall);
    rep.aggressive = step_stats(aggressive, aggressive_wall);
    if (options.include_beam) {
      auto [beam, beam_wall] = timed(options, [&] { return beam_decode(scorer, x, cfg); });
      rep.beam = step_stats(beam, beam_wall);
    }
    rep.iteration_speedup = ratio(static_cast<double>(rep.greedy.sequential_iterations),
                                  static_cast<double>(rep.aggressive.sequential_iterations));
    rep.wall_speedup = ratio(rep.greedy.wall_clock.count(), rep.aggressive.wall_clock.count());
  });
  return reports;
}

BenchSummary summarize(std::span<const SentenceReport> reports) {
  BenchSummary summary;
  summary.sentences = reports.size();
  if (reports.empty()) return summary;
  std::vector<double> edits, speedups;
  for (const auto& r : reports) {
    summary.mean_edit_ratio += r.edit_ratio;
    summary.mean_iteration_speedup += r.iteration_speedup;
    summary.mean_wall_speedup += r.wall_speedup;
    summary.greedy += r.greedy;
    summary.aggressive += r.aggressive;
    edits.push_back(r.edit_ratio);
    speedups.push_back(r.iteration_speedup);
  }
  const auto n = static_cast<double>(reports.size());
  summary.mean_edit_ratio /= n;
  summary.mean_iteration_speedup /= n;
  summary.mean_wall_speedup /= n;
  summary.spearman_edit_vs_speedup = spearman(edits, speedups);
  return summary;
}

std::vector<LmaxRow> sweep_lmax(const Scorer& scorer, const std::vector<TokenSequence>& corpus,
                                std::span<const std::optional<std::size_t>> l_max_values,
                                const DecodeConfig& base) {
  for (const auto& v : l_max_values) {
    if (v && *v == 0) throw std::invalid_argument("l_max values must be >= 1");
  }
  std::vector<TokenSequence> reference;
  for (const auto& x : corpus) reference.push_back(greedy_decode(scorer, x, base).output);

  std::vector<LmaxRow> rows;
  for (const auto& l_max : l_max_values) {
    LmaxRow row;
    row.l_max = l_max;
    DecodeConfig cfg = base;
    cfg.mode = DecodeMode::kAggressive;
    cfg.l_max = l_max;
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      const auto result = aggressive_decode(scorer, corpus[s], cfg);
      row.totals += step_stats(result);
      row.outputs_match_greedy = row.outputs_match_greedy && result.output == reference[s];
    }
    rows.push_back(row);
  }
  return rows;
}

double DepthRow::greedy_seconds_per_token() const {
  return greedy.tokens_emitted == 0 ? 0.0 : greedy.wall_clock.count() / static_cast<double>(greedy.tokens_emitted);
}

double DepthRow::aggressive_seconds_per_token() const {
  return aggressive.tokens_emitted == 0 ? 0.0
                                        : aggressive.wall_clock.count() / static_cast<double>(aggressive.tokens_emitted);
}

std::vector<DepthRow> sweep_depth(std::span<const TransformerConfig> configs, std::size_t vocab_size,
                                  const std::vector<TokenSequence>& corpus, const BenchOptions& options) {
  options.validate();
  for (const auto& c : configs) {
    if (c.model_dim != configs.front().model_dim || c.heads != configs.front().heads) {
      throw std::invalid_argument("depth sweep configs must share model_dim and heads");
    }
  }
  std::vector<DepthRow> rows;
  for (const auto& config : configs) {
    const TransformerScorer<double> scorer(config, vocab_size);
    DepthRow row;
    row.config = config;
    for (const auto& rep : bench(scorer, corpus, options)) {
      row.greedy += rep.greedy;
      row.aggressive += rep.aggressive;
    }
    for (const auto& x : corpus) {
      std::vector<Seconds> samples;
      for (std::size_t r = 0; r < options.repetitions; ++r) {
        const auto start = Clock::now();
        auto session = scorer.encode(x);
        samples.push_back(Clock::now() - start);
      }
      row.encode += median(std::move(samples));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace aggdec
