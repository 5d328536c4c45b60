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

#include "aggdec/cli.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "aggdec/metrics.hpp"
#include "aggdec/ngram_scorer.hpp"
#include "aggdec/report.hpp"
#include "aggdec/scripted_scorer.hpp"
#include "aggdec/transformer.hpp"

namespace aggdec {

namespace {

struct RunConfig {
  std::string subcommand;
  std::string corpus;
  std::vector<std::string> scripted_pairs;
  std::string scorer = "identity";
  std::string transformer_config;
  std::string mode = "aggressive";
  std::size_t beam = 5;
  double alpha = 0.0;
  std::string lmax;
  std::optional<std::size_t> max_len;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::size_t workers = 1;
  std::string format = "text";
  std::string output;
  std::string scheme = "whitespace";
  std::size_t order = 3;
  double smoothing = 0.1;
  double copy_bias = 2.0;
  std::size_t repetitions = 5;
  std::size_t warmup = 2;
  std::string depths = "6+6,3+6,9+6,6+3,6+9,7+5,8+4,9+3,10+2,11+1";
  bool trace = false;
  bool beam_baseline = false;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// `--config` file: `flag-name = value` lines appended after the command line
/// so they take precedence.
std::vector<std::string> config_args(const std::string& path) {
  std::vector<std::string> args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config") throw UsageError("config files cannot include other config files");
    if (key == "trace" || key == "beam-baseline") {
      if (value == "true" || value == "1") args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    std::istringstream words(value);
    for (std::string w; words >> w;) args.push_back(w);
  }
  return args;
}

std::vector<std::optional<std::size_t>> parse_lmax_list(const std::string& text) {
  std::vector<std::optional<std::size_t>> values;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (item == "unlimited") {
      values.emplace_back(std::nullopt);
      continue;
    }
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v == 0) throw UsageError("bad --lmax value '" + item + "'");
    values.emplace_back(static_cast<std::size_t>(v));
  }
  if (values.empty()) throw UsageError("--lmax needs at least one value");
  return values;
}

std::vector<TransformerConfig> parse_depths(const std::string& text, const TransformerConfig& base) {
  std::vector<TransformerConfig> configs;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    const auto plus = item.find('+');
    TransformerConfig c = base;
    try {
      if (plus == std::string::npos) throw std::invalid_argument(item);
      c.encoder_layers = std::stoul(item.substr(0, plus));
      c.decoder_layers = std::stoul(item.substr(plus + 1));
    } catch (const std::exception&) {
      throw UsageError("bad --depths entry '" + item + "' (expected ENC+DEC)");
    }
    c.validate();
    configs.push_back(c);
  }
  return configs;
}

struct Workspace {
  TokenScheme scheme = TokenScheme::kWhitespace;
  Vocab vocab;
  std::vector<std::string> lines;
  std::vector<TokenSequence> prepared;
  std::unique_ptr<Scorer> scorer;
  std::optional<TransformerConfig> transformer;
};

TransformerConfig transformer_config(const RunConfig& rc) {
  TransformerConfig config;
  if (!rc.transformer_config.empty()) config = load_transformer_config(rc.transformer_config);
  if (rc.seed) config.seed = rc.seed;
  if (!config.seed) throw UsageError("the transformer scorer needs --seed or a seed in its config file");
  config.validate();
  return config;
}

Workspace load(const RunConfig& rc) {
  Workspace ws;
  ws.scheme = *parse_scheme(rc.scheme);

  std::vector<std::string> targets;
  if (!rc.scripted_pairs.empty()) {
    const auto sources = read_lines(rc.scripted_pairs[0]);
    targets = read_lines(rc.scripted_pairs[1]);
    if (sources.size() != targets.size()) {
      throw UsageError("scripted pair files have different line counts");
    }
    ws.lines = rc.corpus.empty() ? sources : read_lines(rc.corpus);
    std::vector<std::string> all = sources;
    all.insert(all.end(), targets.begin(), targets.end());
    all.insert(all.end(), ws.lines.begin(), ws.lines.end());
    ws.vocab = build_vocab(all, ws.scheme);
    std::vector<std::pair<TokenSequence, TokenSequence>> pairs;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      pairs.emplace_back(tokenize(sources[i], ws.scheme, ws.vocab), tokenize(targets[i], ws.scheme, ws.vocab));
    }
    if (rc.scorer == "scripted") ws.scorer = scripted_edit_scorer(ws.vocab.size(), pairs);
  } else {
    if (rc.corpus.empty()) throw UsageError("no corpus given (use --corpus or --input)");
    if (rc.scorer == "scripted") throw UsageError("--scorer scripted needs --scripted-pairs <src> <tgt>");
    ws.lines = read_lines(rc.corpus);
    ws.vocab = build_vocab(ws.lines, ws.scheme);
  }

  for (const auto& line : ws.lines) ws.prepared.push_back(prepare_input(tokenize(line, ws.scheme, ws.vocab), ws.vocab));

  if (rc.scorer == "identity") {
    ws.scorer = identity_scorer(ws.vocab.size());
  } else if (rc.scorer == "ngram") {
    std::vector<TokenSequence> training;
    const auto& text = targets.empty() ? ws.lines : targets;
    for (const auto& line : text) training.push_back(tokenize(line, ws.scheme, ws.vocab));
    ws.scorer = ngram_scorer(ws.vocab.size(), training, NgramOptions{rc.order, rc.smoothing, rc.copy_bias});
  } else if (rc.scorer == "transformer") {
    ws.transformer = transformer_config(rc);
    ws.scorer = tiny_transformer(*ws.transformer, ws.vocab.size());
  }
  return ws;
}

DecodeConfig decode_config(const RunConfig& rc) {
  DecodeConfig cfg;
  cfg.mode = *parse_mode(rc.mode);
  cfg.max_len = rc.max_len;
  cfg.beam_size = rc.beam;
  cfg.length_penalty = rc.alpha;
  if (!rc.lmax.empty()) cfg.l_max = parse_lmax_list(rc.lmax).front();
  cfg.validate();
  return cfg;
}

BenchOptions bench_options(const RunConfig& rc) {
  BenchOptions opts;
  opts.decode = decode_config(rc);
  opts.repetitions = rc.repetitions;
  opts.warmup = rc.warmup;
  opts.threads = rc.threads;
  opts.workers = rc.workers;
  opts.include_beam = rc.beam_baseline;
  opts.validate();
  return opts;
}

std::string quote_csv(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

int cmd_decode(const RunConfig& rc, const Workspace& ws, std::ostream& out) {
  const DecodeConfig cfg = decode_config(rc);
  auto rows = nlohmann::json::array();
  if (rc.format == "csv") out << "index,iterations,positions_scored,output\n";
  for (std::size_t s = 0; s < ws.prepared.size(); ++s) {
    const DecodeResult result = decode(*ws.scorer, ws.prepared[s], cfg);
    const std::string text = detokenize(result.output, ws.vocab, ws.scheme);
    if (rc.format == "text") {
      out << text;
      if (rc.trace) out << '\t' << emit_trace(result, ws.vocab);
      out << '\n';
    } else if (rc.format == "csv") {
      out << s << ',' << result.trace.sequential_iterations() << ',' << result.positions_scored << ','
          << quote_csv(text) << '\n';
    } else {
      rows.push_back({{"index", s},
                      {"input", ws.lines[s]},
                      {"output", text},
                      {"iterations", result.trace.sequential_iterations()},
                      {"positions_scored", result.positions_scored},
                      {"trace", emit_trace(result, ws.vocab)}});
    }
  }
  if (rc.format == "json") out << rows.dump(2) << '\n';
  return 0;
}

int cmd_check(const RunConfig& rc, const Workspace& ws, std::ostream& out) {
  EquivalenceSweep sweep;
  sweep.l_max_values = parse_lmax_list(rc.lmax.empty() ? "unlimited" : rc.lmax);
  sweep.max_len_values = {rc.max_len};
  const auto report = check_equivalence(*ws.scorer, ws.prepared, sweep);
  if (rc.format == "json") {
    out << equivalence_json(report).dump(2) << '\n';
  } else {
    out << report.mismatches.size() << " mismatches / " << report.sentences << " sentences\n";
    for (const auto& m : report.mismatches) {
      out << "sentence " << m.sentence << " l_max=" << format_lmax(m.l_max) << "\n  greedy:     "
          << emit_trace(m.greedy, ws.vocab) << "\n  aggressive: " << emit_trace(m.aggressive, ws.vocab) << '\n';
    }
    for (const auto& v : report.trace_violations) out << "trace violation: " << v << '\n';
  }
  return report.mismatches.empty() ? 0 : 1;
}

int cmd_bench(const RunConfig& rc, const Workspace& ws, std::ostream& out) {
  const BenchOptions opts = bench_options(rc);
  const auto reports = bench(*ws.scorer, ws.prepared, opts);
  const ReportContext context{opts.decode.l_max, ws.transformer};
  const BenchSummary summary = summarize(reports);
  if (rc.format == "csv") {
    write_sentence_csv(out, reports, context);
  } else if (rc.format == "json") {
    nlohmann::json j = summary_json(summary, context);
    j["per_sentence"] = sentence_json(reports, context);
    out << j.dump(2) << '\n';
  } else {
    out << "sentences: " << summary.sentences << '\n'
        << "mean edit ratio: " << summary.mean_edit_ratio << '\n'
        << "greedy iterations: " << summary.greedy.sequential_iterations << '\n'
        << "aggressive iterations: " << summary.aggressive.sequential_iterations << '\n'
        << "mean iteration speedup: " << summary.mean_iteration_speedup << '\n'
        << "mean wall speedup: " << summary.mean_wall_speedup << '\n'
        << "spearman(edit ratio, iteration speedup): " << summary.spearman_edit_vs_speedup << '\n';
  }
  return 0;
}

int cmd_sweep_lmax(const RunConfig& rc, const Workspace& ws, std::ostream& out) {
  const auto values = parse_lmax_list(rc.lmax.empty() ? "1,2,3,5,10,20,40,unlimited" : rc.lmax);
  DecodeConfig base = decode_config(rc);
  base.l_max.reset();
  const auto rows = sweep_lmax(*ws.scorer, ws.prepared, values, base);
  if (rc.format == "json") {
    out << lmax_json(rows).dump(2) << '\n';
  } else if (rc.format == "csv") {
    write_lmax_csv(out, rows);
  } else {
    for (const auto& r : rows) {
      out << "l_max=" << format_lmax(r.l_max) << " iterations=" << r.totals.sequential_iterations
          << " positions=" << r.totals.positions_scored << (r.outputs_match_greedy ? "" : " OUTPUT MISMATCH") << '\n';
    }
  }
  return std::all_of(rows.begin(), rows.end(), [](const LmaxRow& r) { return r.outputs_match_greedy; }) ? 0 : 1;
}

int cmd_sweep_depth(const RunConfig& rc, const Workspace& ws, std::ostream& out) {
  TransformerConfig base = ws.transformer ? *ws.transformer : transformer_config(rc);
  const auto configs = parse_depths(rc.depths, base);
  const auto rows = sweep_depth(configs, ws.vocab.size(), ws.prepared, bench_options(rc));
  if (rc.format == "json") {
    out << depth_json(rows).dump(2) << '\n';
  } else if (rc.format == "csv") {
    write_depth_csv(out, rows);
  } else {
    for (const auto& r : rows) {
      out << r.config.depth_label() << " greedy=" << r.greedy.wall_clock.count()
          << "s aggressive=" << r.aggressive.wall_clock.count() << "s encode=" << r.encode.count()
          << "s greedy_iters=" << r.greedy.sequential_iterations
          << " aggressive_iters=" << r.aggressive.sequential_iterations << '\n';
    }
  }
  return 0;
}

}  // namespace

std::string emit_trace(const DecodeResult& result, const Vocab& vocab) {
  std::string text;
  std::size_t pos = 1;
  for (std::size_t it = 0; it < result.trace.iterations.size(); ++it) {
    const auto& rec = result.trace.iterations[it];
    if (!text.empty()) text += ' ';
    text += '[';
    for (std::size_t k = 0; k < rec.accepted && pos < result.output.size(); ++k, ++pos) {
      if (k > 0) text += ' ';
      text += vocab.surface(result.output[pos]);
    }
    text += "]_" + std::to_string(it) + (rec.mode == IterationMode::kAggressive ? "(agg)" : "(ar)");
  }
  return text;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig rc;
  CLI::App app{"Copy-and-verify sequence decoding: decode, equivalence checks and benchmarks", "aggdec"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("subcommand", rc.subcommand, "decode | check | bench | sweep-lmax | sweep-depth")
      ->required()
      ->check(CLI::IsMember({"decode", "check", "bench", "sweep-lmax", "sweep-depth"}));
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; its entries override flags")->check(CLI::ExistingFile);
  app.add_option("--corpus,--input", rc.corpus, "corpus, one sentence per line")->check(CLI::ExistingFile);
  app.add_option("--scripted-pairs", rc.scripted_pairs, "aligned source and target files")
      ->expected(2)
      ->check(CLI::ExistingFile);
  app.add_option("--scorer", rc.scorer)->check(CLI::IsMember({"identity", "scripted", "ngram", "transformer"}));
  app.add_option("--transformer-config", rc.transformer_config)->check(CLI::ExistingFile);
  app.add_option("--mode", rc.mode)->check(CLI::IsMember({"greedy", "beam", "aggressive"}));
  app.add_option("--beam", rc.beam)->check(CLI::PositiveNumber);
  app.add_option("--alpha", rc.alpha, "beam length penalty")->check(CLI::NonNegativeNumber);
  app.add_option("--lmax", rc.lmax, "<int|unlimited>[,...]");
  app.add_option("--max-len", rc.max_len)->check(CLI::PositiveNumber);
  app.add_option("--seed", rc.seed);
  app.add_option("--threads", rc.threads)->check(CLI::PositiveNumber);
  app.add_option("--workers", rc.workers)->check(CLI::PositiveNumber);
  app.add_option("--format", rc.format)->check(CLI::IsMember({"csv", "json", "text"}));
  app.add_option("--output", rc.output);
  app.add_option("--tokenize", rc.scheme)->check(CLI::IsMember({"whitespace", "character"}));
  app.add_option("--order", rc.order)->check(CLI::PositiveNumber);
  app.add_option("--smoothing", rc.smoothing)->check(CLI::PositiveNumber);
  app.add_option("--copy-bias", rc.copy_bias);
  app.add_option("--repetitions", rc.repetitions)->check(CLI::PositiveNumber);
  app.add_option("--warmup", rc.warmup);
  app.add_option("--depths", rc.depths, "ENC+DEC[,...] for sweep-depth");
  app.add_flag("--trace", rc.trace, "append the decode trace to text output");
  app.add_flag("--beam-baseline", rc.beam_baseline, "also time beam search in bench");

  try {
    std::vector<std::string> all = args;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") {
        const auto extra = config_args(args[i + 1]);
        all.insert(all.end(), extra.begin(), extra.end());
      } else if (args[i].rfind("--config=", 0) == 0) {
        const auto extra = config_args(args[i].substr(9));
        all.insert(all.end(), extra.begin(), extra.end());
      }
    }
    std::reverse(all.begin(), all.end());
    app.parse(all);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    const Workspace ws = load(rc);
    std::ofstream file;
    std::ostream* sink = &out;
    if (!rc.output.empty()) {
      file.open(rc.output);
      if (!file) throw UsageError("cannot write " + rc.output);
      sink = &file;
    }
    if (rc.subcommand == "decode") return cmd_decode(rc, ws, *sink);
    if (rc.subcommand == "check") return cmd_check(rc, ws, *sink);
    if (rc.subcommand == "bench") return cmd_bench(rc, ws, *sink);
    if (rc.subcommand == "sweep-lmax") return cmd_sweep_lmax(rc, ws, *sink);
    return cmd_sweep_depth(rc, ws, *sink);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace aggdec
