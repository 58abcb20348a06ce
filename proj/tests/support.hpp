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

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "critchain/chain.hpp"
#include "critchain/random.hpp"

namespace testkit {

using namespace critchain;

inline Interactor make(std::string name, Role role,
                       std::vector<std::pair<InteractionKind, double>> constants,
                       std::optional<double> capacity = std::nullopt, double cost = 0.0)
{
    Interactor i;
    i.name = std::move(name);
    i.role = role;
    for (auto [kind, c] : constants)
        i.factors.emplace(kind, MacroFactor{SigmaProfile::constant(c), 1.0});
    if (capacity)
        i.capacity = Inertia(*capacity);
    i.cost = cost;
    return i;
}

inline Interactor mediator(std::string name, double M, double sigma_f, double sigma_l = 0.0,
                           double cost = 1.0)
{
    std::vector<std::pair<InteractionKind, double>> f{{InteractionKind::forwarding, sigma_f}};
    if (sigma_l > 0.0)
        f.push_back({InteractionKind::loss, sigma_l});
    return make(std::move(name), Role::mediator, f, M, cost);
}

inline Interactor absorber(std::string name, double sigma_l)
{
    return make(std::move(name), Role::absorber, {{InteractionKind::loss, sigma_l}});
}

struct ChainParams {
    double sigma_e = 2.0, entry_loss = 0.5;
    double sigma_f = 0.9, forwarding_loss = 0.1, M = 5.0, m = 1.0;
    double H_max = 100.0, H_c = 1.0;
    double sigma_d = 3.0, lastmile_loss = 1.0;
    double T = 0.1;
};

/// Chain with constant factors: one receptor, one mediator, one courier and
/// an absorber per stage (omitted when its loss is zero).
inline ChainSpec constant_chain(const ChainParams& p = {})
{
    ChainSpec c = reference_chain();
    c.name = "constant";
    c.entry.interactors = {make("receptor", Role::receptor, {{InteractionKind::entry, p.sigma_e}})};
    if (p.entry_loss > 0.0)
        c.entry.interactors.push_back(absorber("entry-loss", p.entry_loss));
    c.forwarding.interactors = {mediator("trunk", p.M, p.sigma_f)};
    if (p.forwarding_loss > 0.0)
        c.forwarding.interactors.push_back(absorber("forwarding-loss", p.forwarding_loss));
    c.lastmile.interactors = {make("courier", Role::courier, {{InteractionKind::delivery, p.sigma_d}})};
    if (p.lastmile_loss > 0.0)
        c.lastmile.interactors.push_back(absorber("lastmile-loss", p.lastmile_loss));
    c.item_inertia = Inertia(p.m);
    c.lastmile_temperature = MarketTemperature(p.T);
    c.set_window(p.H_max, p.H_c);
    return c;
}

/// Seeded value generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(make_stream(seed, 0xfeed)) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(rng_); }
    double log_uniform(double lo, double hi)
    {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_index(rng_, n)); }
    bool coin() { return uniform01(rng_) < 0.5; }
    Rng& rng() { return rng_; }

private:
    Rng rng_;
};

inline double rel_diff(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace testkit
