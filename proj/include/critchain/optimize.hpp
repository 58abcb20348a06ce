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
#include <map>
#include <vector>

#include "critchain/chain.hpp"

namespace critchain {

enum class Objective { k, ma };

const char* to_string(Objective objective) noexcept;

/// Candidate mediators with their unit costs (Interactor::cost).
struct Catalog {
    std::vector<Interactor> candidates;
    double budget = 0.0;
    std::size_t max_copies = 1;
};

void validate(const Catalog& catalog);

/// A multiset of candidates, stored as a copy count per candidate.
struct Selection {
    std::vector<std::size_t> counts;
    double total_cost = 0.0;
    double objective = 0.0;
    double xi_mix = 0.0;

    /// Sorted candidate indices, one entry per copy.
    std::vector<std::size_t> indices() const;
};

double selection_cost(const Catalog& catalog, const std::vector<std::size_t>& counts);

/// The base chain with its mediators replaced by the selection. Interactors
/// of the base forwarding stage without a forwarding factor are kept. Copies
/// multiply the candidate's interactor counts.
ChainSpec apply_selection(const Catalog& catalog, const std::vector<std::size_t>& counts,
                          const ChainSpec& base);

/// Objective value of a feasible selection: k of the resulting chain or its
/// mediation ability at H_max.
double evaluate(const Catalog& catalog, const std::vector<std::size_t>& counts,
                const ChainSpec& base, Objective objective);

/// True when `a` ranks above `b`: higher objective (1e-12 tolerance), then
/// higher xi_mix for the MA objective, then the lexicographically smaller
/// index multiset.
bool ranks_above(const Selection& a, const Selection& b, Objective objective);

inline constexpr std::uint64_t max_exhaustive_space = std::uint64_t{1} << 20;

Selection optimize_exhaustive(const Catalog& catalog, const ChainSpec& base, Objective objective);

struct AnnealOptions {
    std::uint64_t iterations = 10'000;
    double cooling = 0.995;
    /// Non-positive: use the spread of the objective over random selections.
    double start_temperature = 0.0;
    std::size_t temperature_samples = 100;
};

struct TrajectoryPoint {
    std::uint64_t iteration;
    double objective;
};

struct AnnealResult {
    Selection best;
    Selection start;
    std::uint64_t seed = 0;
    double start_temperature = 0.0;
    std::uint64_t evaluations = 0;
    std::vector<TrajectoryPoint> trajectory; // every improvement of the incumbent
};

/// Greedy feasible start followed by simulated annealing over add, remove
/// and swap moves with geometric cooling. Returns the best selection seen.
AnnealResult optimize_anneal(const Catalog& catalog, const ChainSpec& base, Objective objective,
                             std::uint64_t seed, const AnnealOptions& options = {});

/// Independent runs with seeds seed, seed + 1, ...; the best wins and ties go
/// to the lowest seed.
AnnealResult anneal_restarts(const Catalog& catalog, const ChainSpec& base, Objective objective,
                             std::uint64_t seed, std::size_t restarts,
                             const AnnealOptions& options = {}, std::size_t workers = 1);

} // namespace critchain
