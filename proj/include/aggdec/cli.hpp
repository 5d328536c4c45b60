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

#include <ostream>
#include <string>
#include <vector>

#include "aggdec/core.hpp"
#include "aggdec/decode.hpp"

namespace aggdec {

/// Renders the output as bracketed segments, one per decode iteration:
/// `[a b X]_0(agg) [d]_1(ar) [<eos>]_2(agg)`.
std::string emit_trace(const DecodeResult& result, const Vocab& vocab);

/// Command-line entry point. `args` excludes the program name. Diagnostics go
/// to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aggdec
