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

#include "critchain/chain.hpp"

#include <sstream>

namespace critchain {

const char* to_string(LastMileMode mode) noexcept
{
    return mode == LastMileMode::rate_ratio ? "rate-ratio" : "pointwise-mean";
}

void ChainSpec::set_window(double H_max, double H_c)
{
    entry.H_lo = forwarding.H_lo = H_c;
    entry.H_hi = forwarding.H_hi = H_max;
    lastmile.H_lo = 0.0;
    lastmile.H_hi = H_c;
}

void validate(const ChainSpec& chain)
{
    double H_max = chain.H_max(), H_c = chain.H_c();
    if (!(H_c > 0.0) || !(H_max >= H_c) || !std::isfinite(H_max))
        fail(ErrorCode::schema, "chain window must satisfy 0 < H_c <= H_max");
    if (chain.entry.H_hi != H_max || chain.lastmile.H_hi != H_c || chain.lastmile.H_lo != 0.0)
        fail(ErrorCode::schema, "stage windows are inconsistent with [H_c, H_max]");
    if (!(chain.total_flow > 0.0) || !std::isfinite(chain.total_flow))
        fail(ErrorCode::schema, "total_flow must be positive");
    if (!(chain.isotropy_factor >= 1.0))
        fail(ErrorCode::schema, "isotropy factor must be at least 1");

    // Entry and last mile use the generic check; forwarding may have a
    // zero-length window.
    validate(chain.entry.H_lo < chain.entry.H_hi
                 ? chain.entry
                 : StageSpec{chain.entry.stage, chain.entry.interactors, 0.0, H_max});
    validate(chain.lastmile);
    StageSpec fwd = chain.forwarding;
    if (fwd.H_lo == fwd.H_hi)
        fwd.H_lo = 0.0;
    validate(fwd);

    bool has_mediator = false;
    for (const auto& i : chain.forwarding.interactors) {
        if (i.has(InteractionKind::forwarding)) {
            if (!i.capacity)
                fail(ErrorCode::schema, "forwarding interactor '" + i.name + "' has no capacity");
            alpha(chain.item_inertia, *i.capacity);
            has_mediator = true;
        }
    }
    if (!has_mediator)
        fail(ErrorCode::no_forwarding, "forwarding stage has no mediator");
    validate(chain.diffusion);
}

std::vector<std::string> chain_warnings(const ChainSpec& chain)
{
    std::vector<std::string> out;
    for (const auto& i : chain.forwarding.interactors) {
        if (!i.capacity || !i.has(InteractionKind::forwarding))
            continue;
        if (i.capacity->value() <= chain.isotropy_factor * chain.item_inertia.value()) {
            std::ostringstream os;
            os << "mediator '" << i.name << "' has M <= " << chain.isotropy_factor
               << " m; the isotropic forwarding kernel is a rough approximation";
            out.push_back(os.str());
        }
    }
    effective_feasibility_multiple(chain.diffusion, &out);
    return out;
}

namespace {

Interactor make(std::string name, Role role,
                std::initializer_list<std::pair<InteractionKind, double>> factors)
{
    Interactor i;
    i.name = std::move(name);
    i.role = role;
    for (auto [kind, value] : factors)
        i.factors.emplace(kind, MacroFactor{SigmaProfile::constant(value), 1.0});
    return i;
}

} // namespace

ChainSpec reference_chain()
{
    ChainSpec c;
    c.name = "reference-chain";
    c.entry.interactors = {make("counter", Role::receptor, {{InteractionKind::entry, 2.0}}),
                           make("entry-loss", Role::absorber, {{InteractionKind::loss, 0.5}})};
    Interactor mediator = make("trunk", Role::mediator, {{InteractionKind::forwarding, 0.9}});
    mediator.capacity = Inertia(5.0);
    mediator.cost = 1.0;
    c.forwarding.interactors = {mediator,
                                make("transit-loss", Role::absorber, {{InteractionKind::loss, 0.1}})};
    c.lastmile.interactors = {make("courier", Role::courier, {{InteractionKind::delivery, 3.0}}),
                              make("doorstep-loss", Role::absorber, {{InteractionKind::loss, 1.0}})};
    c.set_window(100.0, 1.0);
    c.item_inertia = Inertia(1.0);
    c.lastmile_temperature = MarketTemperature(0.1);
    c.total_flow = 1000.0;
    c.diffusion.segments = {DiffusionSegment{0.0, 4.0, 0.75, 0.25}};
    c.diffusion.phi0 = 100.0;
    c.diffusion.feasibility_multiple = 6.0;
    c.diffusion.x_max = 12.0;
    c.diffusion.grid_n = 1024;
    return c;
}

} // namespace critchain
