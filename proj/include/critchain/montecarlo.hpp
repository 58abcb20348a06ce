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

#include <cstdint>
#include <optional>
#include <vector>

#include "critchain/chain.hpp"
#include "critchain/transport.hpp"

namespace critchain {

enum class EntryOutcome { accepted, absorbed };
enum class TerminalOutcome { delivered, lost_in_entry, lost_in_forwarding, lost_in_lastmile };

const char* to_string(TerminalOutcome outcome) noexcept;

struct ForwardingStep {
    double H_before;
    double H_after;
};

/// Full record of one simulated item.
struct ItemHistory {
    EntryOutcome entry = EntryOutcome::absorbed;
    std::vector<ForwardingStep> steps;
    std::optional<double> lastmile_H;
    TerminalOutcome outcome = TerminalOutcome::lost_in_entry;
    double final_lethargy = 0.0;
};

/// Items still in the forwarding stage at each lethargy bin edge: counts[b]
/// is the number of accepted items alive at u = edges[b].
struct SlowingDownHistogram {
    std::vector<double> edges;          // size bins + 1, from 0 to ln(H_max / H_c)
    std::vector<std::uint64_t> counts;  // size bins
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct MCTallies {
    std::uint64_t entered = 0;
    std::uint64_t accepted = 0;
    std::uint64_t reached_lastmile = 0;
    std::uint64_t delivered = 0;
    std::uint64_t forwarding_steps = 0;
    double lethargy_gain_sum = 0.0;
    double lethargy_gain_sq_sum = 0.0;
};

struct MCResult {
    std::uint64_t n_items = 0;
    std::uint64_t seed = 0;
    double H_max = 0.0;
    double H_c = 0.0;
    Estimate P_e, p, P_c, k;
    Estimate mean_lethargy_gain;
    MCTallies tallies;
    SlowingDownHistogram histogram;
};

struct MCOptions {
    std::size_t workers = 1;
    std::size_t histogram_bins = 50;
    std::uint64_t max_steps = 1'000'000;
};

/// Items are grouped in fixed blocks; each block draws from its own stream
/// of `seed`, so the result does not depend on the worker count.
inline constexpr std::uint64_t mc_block_size = 4096;

MCResult simulate(const ChainSpec& chain, std::uint64_t n_items, std::uint64_t seed,
                  const MCOptions& options = {});

/// Histories of the first n_items items of a simulate() run with the same seed.
std::vector<ItemHistory> trace(const ChainSpec& chain, std::uint64_t n_items, std::uint64_t seed,
                               std::uint64_t max_steps = 1'000'000);

struct EmpiricalPoint {
    double H;
    double lethargy;
    std::optional<double> p; // empty where no item was counted
    double std_error;
};

/// Survival fraction p(H) = q(H) / q(H_max) at every bin edge, ending with
/// the fraction that reached H_c.
std::vector<EmpiricalPoint> empirical_profile(const MCResult& result);

} // namespace critchain
