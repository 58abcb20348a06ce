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

#include "critchain/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "critchain/moderation.hpp"
#include "critchain/random.hpp"
#include "critchain/transport.hpp"

namespace critchain {

const char* to_string(Objective objective) noexcept
{
    return objective == Objective::k ? "k" : "ma";
}

void validate(const Catalog& catalog)
{
    if (catalog.candidates.empty())
        fail(ErrorCode::schema, "catalog has no candidates");
    if (!(catalog.budget >= 0.0))
        fail(ErrorCode::schema, "catalog budget must be non-negative");
    if (catalog.max_copies < 1)
        fail(ErrorCode::schema, "catalog max_copies must be at least 1");
    for (const auto& c : catalog.candidates) {
        validate(c);
        if (c.role != Role::mediator || !c.has(InteractionKind::forwarding))
            fail(ErrorCode::schema, "catalog candidate '" + c.name + "' is not a forwarding mediator");
    }
}

std::vector<std::size_t> Selection::indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < counts.size(); ++i)
        out.insert(out.end(), counts[i], i);
    return out;
}

double selection_cost(const Catalog& catalog, const std::vector<std::size_t>& counts)
{
    double cost = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        cost += static_cast<double>(counts[i]) * catalog.candidates[i].cost;
    return cost;
}

ChainSpec apply_selection(const Catalog& catalog, const std::vector<std::size_t>& counts,
                          const ChainSpec& base)
{
    if (counts.size() != catalog.candidates.size())
        fail(ErrorCode::domain, "selection size does not match the catalog");
    ChainSpec chain = base;
    auto& list = chain.forwarding.interactors;
    list.erase(std::remove_if(list.begin(), list.end(),
                              [](const Interactor& i) { return i.has(InteractionKind::forwarding); }),
               list.end());
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] > 0)
            list.push_back(catalog.candidates[i].replicated(static_cast<double>(counts[i])));
    return chain;
}

namespace {

constexpr double tie_tolerance = 1e-12;

bool empty_selection(const std::vector<std::size_t>& counts)
{
    return std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; });
}

void check_feasible(const Catalog& catalog, const std::vector<std::size_t>& counts)
{
    if (empty_selection(counts))
        fail(ErrorCode::no_forwarding, "empty selection has no forwarding mediator");
    for (std::size_t c : counts)
        if (c > catalog.max_copies)
            fail(ErrorCode::budget, "selection exceeds max_copies");
    if (selection_cost(catalog, counts) > catalog.budget)
        fail(ErrorCode::budget, "selection exceeds the budget");
}

struct Scored {
    double objective;
    double xi;
};

Scored score(const Catalog& catalog, const std::vector<std::size_t>& counts, const ChainSpec& base,
             Objective objective)
{
    check_feasible(catalog, counts);
    ChainSpec chain = apply_selection(catalog, counts, base);
    double H_max = chain.H_max();
    double xi = xi_mixture(chain.forwarding.interactors, H_max, chain.item_inertia,
                           chain.isotropy_factor);
    if (objective == Objective::ma)
        return {mediation_ability(chain.forwarding.interactors, H_max, chain.item_inertia,
                                  chain.isotropy_factor),
                xi};
    double P_e = entry_escape(chain.entry.interactors, H_max);
    double p = forwarding_escape(chain);
    double P_c = lastmile_escape(chain);
    return {P_e * p * P_c, xi};
}

bool recoverable(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::no_forwarding:
    case ErrorCode::degenerate_forwarding:
    case ErrorCode::singular_chain:
    case ErrorCode::singular_mediator:
        return true;
    default:
        return false;
    }
}

Selection make_selection(const Catalog& catalog, std::vector<std::size_t> counts, Scored s)
{
    Selection out;
    out.total_cost = selection_cost(catalog, counts);
    out.counts = std::move(counts);
    out.objective = s.objective;
    out.xi_mix = s.xi;
    return out;
}

// Signed objective difference with +inf ties treated as equal.
double difference(double a, double b)
{
    if (a == b)
        return 0.0;
    return a - b;
}

} // namespace

double evaluate(const Catalog& catalog, const std::vector<std::size_t>& counts,
                const ChainSpec& base, Objective objective)
{
    return score(catalog, counts, base, objective).objective;
}

bool ranks_above(const Selection& a, const Selection& b, Objective objective)
{
    double d = difference(a.objective, b.objective);
    if (d > tie_tolerance)
        return true;
    if (d < -tie_tolerance)
        return false;
    if (objective == Objective::ma) {
        if (a.xi_mix > b.xi_mix + tie_tolerance)
            return true;
        if (a.xi_mix < b.xi_mix - tie_tolerance)
            return false;
    }
    auto ia = a.indices(), ib = b.indices();
    return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
}

Selection optimize_exhaustive(const Catalog& catalog, const ChainSpec& base, Objective objective)
{
    validate(catalog);
    const std::size_t n = catalog.candidates.size();
    const std::uint64_t radix = catalog.max_copies + 1;
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (space > max_exhaustive_space / radix)
            fail(ErrorCode::search_space,
                 "search space exceeds 2^20 selections (" + std::to_string(n) + " candidates, " +
                     std::to_string(catalog.max_copies) + " copies each)");
        space *= radix;
    }

    std::vector<std::size_t> counts(n, 0);
    bool found = false;
    Selection best;
    for (std::uint64_t code = 1; code < space; ++code) {
        // Odometer increment.
        for (std::size_t i = 0; i < n; ++i) {
            if (++counts[i] <= catalog.max_copies)
                break;
            counts[i] = 0;
        }
        if (selection_cost(catalog, counts) > catalog.budget)
            continue;
        Scored s{};
        try {
            s = score(catalog, counts, base, objective);
        } catch (const Error& e) {
            if (!recoverable(e))
                throw;
            continue;
        }
        Selection cand = make_selection(catalog, counts, s);
        if (!found || ranks_above(cand, best, objective)) {
            best = std::move(cand);
            found = true;
        }
    }
    if (!found)
        fail(ErrorCode::budget, "no feasible selection within the budget");
    return best;
}

namespace {

class Annealer {
public:
    Annealer(const Catalog& catalog, const ChainSpec& base, Objective objective)
        : catalog_(catalog), base_(base), objective_(objective)
    {
    }

    std::uint64_t evaluations() const { return cache_.size(); }

    bool feasible(const std::vector<std::size_t>& counts) const
    {
        if (empty_selection(counts))
            return false;
        for (std::size_t c : counts)
            if (c > catalog_.max_copies)
                return false;
        return selection_cost(catalog_, counts) <= catalog_.budget;
    }

    // nullopt-like: returns false when the selection cannot be evaluated.
    bool lookup(const std::vector<std::size_t>& counts, Selection& out)
    {
        auto it = cache_.find(counts);
        if (it == cache_.end()) {
            Entry e;
            try {
                e.score = score(catalog_, counts, base_, objective_);
                e.ok = true;
            } catch (const Error& err) {
                if (!recoverable(err))
                    throw;
            }
            it = cache_.emplace(counts, e).first;
        }
        if (!it->second.ok)
            return false;
        out = make_selection(catalog_, counts, it->second.score);
        return true;
    }

    Selection greedy()
    {
        const std::size_t n = catalog_.candidates.size();
        std::vector<std::size_t> counts(n, 0);
        Selection current;
        bool have = false;
        for (;;) {
            bool improved = false;
            Selection best_step;
            for (std::size_t j = 0; j < n; ++j) {
                auto next = counts;
                ++next[j];
                Selection s;
                if (!feasible(next) || !lookup(next, s))
                    continue;
                if (!improved || ranks_above(s, best_step, objective_)) {
                    best_step = s;
                    improved = true;
                }
            }
            if (!improved)
                break;
            if (have && difference(best_step.objective, current.objective) <= tie_tolerance)
                break;
            current = best_step;
            counts = current.counts;
            have = true;
        }
        if (!have)
            fail(ErrorCode::budget, "no feasible selection within the budget");
        return current;
    }

    std::vector<std::size_t> random_feasible(Rng& rng)
    {
        const std::size_t n = catalog_.candidates.size();
        std::vector<std::size_t> counts(n);
        for (auto& c : counts)
            c = uniform_index(rng, catalog_.max_copies + 1);
        while (selection_cost(catalog_, counts) > catalog_.budget) {
            auto idx = Selection{counts, 0, 0, 0}.indices();
            --counts[idx[uniform_index(rng, idx.size())]];
        }
        if (empty_selection(counts)) {
            std::vector<std::size_t> affordable;
            for (std::size_t j = 0; j < n; ++j)
                if (catalog_.candidates[j].cost <= catalog_.budget)
                    affordable.push_back(j);
            if (!affordable.empty())
                counts[affordable[uniform_index(rng, affordable.size())]] = 1;
        }
        return counts;
    }

    // One proposal; returns false when the move is not applicable.
    bool propose(const std::vector<std::size_t>& from, Rng& rng, std::vector<std::size_t>& to)
    {
        const std::size_t n = catalog_.candidates.size();
        to = from;
        auto idx = Selection{from, 0, 0, 0}.indices();
        switch (uniform_index(rng, 3)) {
        case 0: // add
            ++to[uniform_index(rng, n)];
            break;
        case 1: // remove
            if (idx.empty())
                return false;
            --to[idx[uniform_index(rng, idx.size())]];
            break;
        default: { // swap
            if (idx.empty() || n < 2)
                return false;
            std::size_t out = idx[uniform_index(rng, idx.size())];
            std::size_t in = uniform_index(rng, n - 1);
            if (in >= out)
                ++in;
            --to[out];
            ++to[in];
            break;
        }
        }
        return feasible(to);
    }

private:
    struct Entry {
        Scored score{};
        bool ok = false;
    };

    const Catalog& catalog_;
    const ChainSpec& base_;
    Objective objective_;
    std::map<std::vector<std::size_t>, Entry> cache_;
};

} // namespace

AnnealResult optimize_anneal(const Catalog& catalog, const ChainSpec& base, Objective objective,
                             std::uint64_t seed, const AnnealOptions& options)
{
    validate(catalog);
    if (!(options.cooling > 0.0 && options.cooling <= 1.0))
        fail(ErrorCode::domain, "cooling factor must lie in (0, 1]");
    Annealer annealer(catalog, base, objective);
    AnnealResult result;
    result.seed = seed;
    result.start = annealer.greedy();
    result.best = result.start;
    result.trajectory.push_back({0, result.best.objective});

    Rng rng = make_stream(seed, 0);
    double temperature = options.start_temperature;
    if (!(temperature > 0.0)) {
        Rng sampler = make_stream(seed, 1);
        double sum = 0.0, sq = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < options.temperature_samples; ++i) {
            auto counts = annealer.random_feasible(sampler);
            Selection s;
            if (!annealer.feasible(counts) || !annealer.lookup(counts, s) || !std::isfinite(s.objective))
                continue;
            sum += s.objective;
            sq += s.objective * s.objective;
            ++n;
        }
        double var = n > 1 ? (sq - sum * sum / double(n)) / double(n - 1) : 0.0;
        temperature = std::sqrt(std::max(0.0, var));
        if (!(temperature > 0.0) || !std::isfinite(temperature))
            temperature = 1e-6 * std::max(1.0, std::abs(result.best.objective));
    }
    result.start_temperature = temperature;

    Selection current = result.start;
    std::vector<std::size_t> next;
    for (std::uint64_t it = 1; it <= options.iterations; ++it, temperature *= options.cooling) {
        if (!annealer.propose(current.counts, rng, next))
            continue;
        Selection cand;
        if (!annealer.lookup(next, cand))
            continue;
        double delta = difference(cand.objective, current.objective);
        double u = uniform01(rng);
        if (delta >= 0.0 || (temperature > 0.0 && u < std::exp(delta / temperature)))
            current = cand;
        if (ranks_above(current, result.best, objective)) {
            result.best = current;
            result.trajectory.push_back({it, result.best.objective});
        }
    }
    result.evaluations = annealer.evaluations();
    if (result.best.total_cost > catalog.budget)
        fail(ErrorCode::budget, "annealing returned an over-budget selection");
    return result;
}

AnnealResult anneal_restarts(const Catalog& catalog, const ChainSpec& base, Objective objective,
                             std::uint64_t seed, std::size_t restarts, const AnnealOptions& options,
                             std::size_t workers)
{
    if (restarts < 1)
        fail(ErrorCode::domain, "at least one annealing run is required");
    std::vector<AnnealResult> runs(restarts);
    std::vector<std::exception_ptr> errors(restarts);
    workers = std::clamp<std::size_t>(workers, 1, restarts);
    auto work = [&](std::size_t w) {
        for (std::size_t r = w; r < restarts; r += workers) {
            try {
                runs[r] = optimize_anneal(catalog, base, objective, seed + r, options);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    // Strictly better objective (or xi for MA) wins; equal runs keep the lower seed.
    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        const auto& a = runs[r].best;
        const auto& b = runs[best].best;
        double d = difference(a.objective, b.objective);
        bool better = d > tie_tolerance ||
                      (objective == Objective::ma && std::abs(d) <= tie_tolerance &&
                       a.xi_mix > b.xi_mix + tie_tolerance);
        if (better)
            best = r;
    }
    return runs[best];
}

} // namespace critchain
