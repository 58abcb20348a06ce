/*
   Copyright 2026 The critchain Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critchain/chain.hpp"
#include "critchain/diffusion.hpp"
#include "critchain/montecarlo.hpp"
#include "critchain/optimize.hpp"
#include "critchain/spectra.hpp"
#include "critchain/transport.hpp"

namespace critchain {

inline constexpr int spec_version = 1;

/// A chain specification file: the chain plus an optional mediator catalog
/// for the optimizer.
struct ChainDocument {
    ChainSpec chain;
    std::optional<Catalog> catalog;
};

/// Parses and validates a version-1 chain document. Unknown fields are
/// rejected; errors carry ErrorCode::schema and name the JSON path and line.
ChainDocument parse_chain_document(std::string_view text);

/// Built-in documents, currently only "reference-chain".
std::optional<ChainDocument> builtin_document(std::string_view name);

/// Normalized JSON with every default written out. Parsing the output yields
/// the same document.
std::string to_json_text(const ChainDocument& doc);

/// Shortest round-trip decimal form, locale independent.
std::string format_number(double x);

std::string report_json(const ChainSpec& chain, const ChainReport& report);
std::string profile_csv(const EscapeProfile& profile);
std::string flux_csv(const FluxProfile& flux);
std::string spectrum_csv(const std::vector<SpectrumRow>& rows);
std::string mc_json(const MCResult& result, const ChainSpec& chain);
std::string q_histogram_csv(const SlowingDownHistogram& histogram);
std::string optimum_json(const Catalog& catalog, Objective objective, const std::string& method,
                         const Selection& best, const AnnealResult* anneal);

} // namespace critchain
