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

#include "aggdec/transformer.hpp"

#include <fstream>
#include <sstream>

namespace aggdec {

void TransformerConfig::validate() const {
  if (!seed) throw std::invalid_argument("transformer config requires a seed");
  if (encoder_layers < 1 || decoder_layers < 1) {
    throw std::invalid_argument("transformer needs at least one encoder and one decoder layer");
  }
  if (model_dim == 0 || heads == 0 || ffn_dim == 0) {
    throw std::invalid_argument("model_dim, heads and ffn_dim must be positive");
  }
  if (model_dim % heads != 0) throw std::invalid_argument("model_dim must be divisible by heads");
}

std::string TransformerConfig::depth_label() const {
  return std::to_string(encoder_layers) + "+" + std::to_string(decoder_layers);
}

TransformerConfig parse_transformer_config(std::istream& in) {
  TransformerConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) {
      throw std::invalid_argument("transformer config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::uint64_t number = 0;
    try {
      std::size_t used = 0;
      number = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("transformer config line " + std::to_string(line_no) + ": bad value '" + value + "'");
    }
    if (key == "encoder_layers") config.encoder_layers = number;
    else if (key == "decoder_layers") config.decoder_layers = number;
    else if (key == "model_dim") config.model_dim = number;
    else if (key == "heads") config.heads = number;
    else if (key == "ffn_dim") config.ffn_dim = number;
    else if (key == "seed") config.seed = number;
    else throw std::invalid_argument("transformer config: unknown key '" + key + "'");
  }
  return config;
}

TransformerConfig load_transformer_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open transformer config: " + path);
  return parse_transformer_config(in);
}

std::unique_ptr<Scorer> tiny_transformer(const TransformerConfig& config, std::size_t vocab_size) {
  return std::make_unique<TransformerScorer<double>>(config, vocab_size);
}

template class TinyTransformer<float>;
template class TinyTransformer<double>;

}  // namespace aggdec
