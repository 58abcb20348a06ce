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

#include <cmath>
#include <vector>

#include "critchain/moderation.hpp"
#include "critchain/montecarlo.hpp"
#include "critchain/transport.hpp"
#include "doctest.h"
#include "renewal.hpp"
#include "support.hpp"

using namespace critchain;
using namespace testkit;

namespace {

bool same(const MCResult& a, const MCResult& b)
{
    auto eq = [](const Estimate& x, const Estimate& y) {
        return x.value == y.value && x.std_error == y.std_error;
    };
    return a.n_items == b.n_items && eq(a.P_e, b.P_e) && eq(a.p, b.p) && eq(a.P_c, b.P_c) &&
           eq(a.k, b.k) && eq(a.mean_lethargy_gain, b.mean_lethargy_gain) &&
           a.tallies.forwarding_steps == b.tallies.forwarding_steps &&
           a.tallies.lethargy_gain_sum == b.tallies.lethargy_gain_sum &&
           a.histogram.counts == b.histogram.counts && a.histogram.edges == b.histogram.edges;
}

} // namespace

TEST_CASE("lossless chain delivers everything")
{
    ChainParams p;
    p.entry_loss = p.forwarding_loss = p.lastmile_loss = 0;
    auto r = simulate(constant_chain(p), 5000, 1);
    CHECK(r.P_e.value == 1.0);
    CHECK(r.p.value == 1.0);
    CHECK(r.P_c.value == 1.0);
    CHECK(r.k.value == 1.0);
    for (const auto& pt : empirical_profile(r))
        CHECK(pt.p == 1.0);
}

TEST_CASE("entry branching")
{
    auto r = simulate(constant_chain(), 1'000'000, 2, {4, 50, 1'000'000});
    CHECK(std::abs(r.P_e.value - 0.8) <= 3 * 0.0004);
    CHECK(r.P_e.std_error == doctest::Approx(0.0004).epsilon(0.01));
    // the tally identity is exact
    CHECK(r.k.value == static_cast<double>(r.tallies.delivered) / static_cast<double>(r.tallies.entered));
    CHECK(r.tallies.delivered == static_cast<std::uint64_t>(
                                     std::llround(r.P_e.value * r.p.value * r.P_c.value * 1e6)));
    CHECK(r.histogram.counts.front() == r.tallies.accepted);
}

TEST_CASE("forwarding survival matches the collision renewal equation")
{
    auto chain = reference_chain();
    auto r = simulate(chain, 1'000'000, 3, {4, 50, 1'000'000});
    double a = alpha(Inertia(1), Inertia(5));
    RenewalSurvival exact(a, 0.9, std::log(100.0) + 0.1);
    double p_exact = exact(std::log(100.0));
    CHECK(p_exact == doctest::Approx(0.2411).epsilon(2e-3));
    CHECK(std::abs(r.p.value - p_exact) <= 3 * r.p.std_error);

    // the continuous-slowing-down value is an upper bound
    double p_det = forwarding_escape(chain);
    CHECK(r.p.value <= p_det + 3 * r.p.std_error);

    auto prof = empirical_profile(r);
    REQUIRE(prof.size() == 51);
    CHECK(prof.front().p == 1.0);
    for (std::size_t i = 1; i < prof.size(); ++i) {
        REQUIRE(prof[i].p);
        CHECK(std::abs(*prof[i].p - exact(prof[i].lethargy)) <= 3.5 * prof[i].std_error);
        CHECK(*prof[i].p <= forwarding_escape_to(chain, std::max(prof[i].H, 1.0)) + 3 * prof[i].std_error);
    }
    CHECK(*prof.back().p == r.p.value);
}

TEST_CASE("gap to the deterministic value closes as losses vanish")
{
    double prev_gap = 1.0;
    for (double ratio : {0.1, 0.01, 0.001}) {
        ChainParams p;
        p.forwarding_loss = 0.9 * ratio;
        auto chain = constant_chain(p);
        RenewalSurvival exact(alpha(Inertia(1), Inertia(5)), 1.0 / (1.0 + ratio), std::log(100.0) + 0.1);
        double gap = forwarding_escape(chain) - exact(std::log(100.0));
        CHECK(gap > 0.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("last-mile branching and mean lethargy gain")
{
    auto chain = reference_chain();
    auto r = simulate(chain, 1'000'000, 4);
    CHECK(std::abs(r.P_c.value - 0.75) <= 3 * r.P_c.std_error);
    CHECK(std::abs(r.mean_lethargy_gain.value - xi_single(ScatterKernel(Inertia(1), Inertia(5)))) <=
          3 * r.mean_lethargy_gain.std_error);

    // mixture: the mean gain is the flow-weighted xi
    chain.forwarding.interactors = {mediator("a", 5, 0.6), mediator("b", 20, 0.3), absorber("x", 0.1)};
    auto m = simulate(chain, 300'000, 5);
    double xi = xi_mixture(chain.forwarding.interactors, 50, Inertia(1));
    CHECK(std::abs(m.mean_lethargy_gain.value - xi) <= 3 * m.mean_lethargy_gain.std_error);
}

TEST_CASE("enthalpy-dependent last mile follows the pointwise branching ratio")
{
    auto chain = reference_chain();
    Interactor c = make("courier", Role::courier, {{InteractionKind::delivery, 1.0}});
    c.factors.at(InteractionKind::delivery).sigma = SigmaProfile::power_law(2.0, 1.0);
    chain.lastmile.interactors = {c, absorber("x", 1.0)};
    chain.lastmile_mode = LastMileMode::pointwise_mean;
    double expected = lastmile_escape(chain);
    auto r = simulate(chain, 400'000, 6);
    CHECK(std::abs(r.P_c.value - expected) <= 3.5 * r.P_c.std_error);
}

TEST_CASE("determinism and worker independence")
{
    auto chain = reference_chain();
    auto a = simulate(chain, 50'000, 77, {1, 50, 1'000'000});
    auto b = simulate(chain, 50'000, 77, {1, 50, 1'000'000});
    auto c = simulate(chain, 50'000, 77, {3, 50, 1'000'000});
    auto d = simulate(chain, 50'000, 77, {16, 50, 1'000'000});
    CHECK(same(a, b));
    CHECK(same(a, c));
    CHECK(same(a, d));
    auto e = simulate(chain, 50'000, 78);
    CHECK_FALSE(same(a, e));
}

TEST_CASE("item histories")
{
    auto chain = reference_chain();
    auto histories = trace(chain, 10'000, 9);
    auto result = simulate(chain, 10'000, 9);
    std::uint64_t delivered = 0, accepted = 0, steps = 0;
    double a = alpha(Inertia(1), Inertia(5));
    for (const auto& h : histories) {
        accepted += h.entry == EntryOutcome::accepted;
        delivered += h.outcome == TerminalOutcome::delivered;
        steps += h.steps.size();
        for (std::size_t i = 0; i < h.steps.size(); ++i) {
            CHECK(h.steps[i].H_after <= h.steps[i].H_before);
            CHECK(h.steps[i].H_after >= a * h.steps[i].H_before);
            if (i > 0)
                CHECK(h.steps[i].H_before == h.steps[i - 1].H_after);
        }
        if (h.entry == EntryOutcome::absorbed) {
            CHECK(h.outcome == TerminalOutcome::lost_in_entry);
            CHECK(h.steps.empty());
        }
        if (h.outcome == TerminalOutcome::delivered || h.outcome == TerminalOutcome::lost_in_lastmile) {
            REQUIRE(h.lastmile_H);
            CHECK(*h.lastmile_H <= 1.0);
            REQUIRE_FALSE(h.steps.empty());
            CHECK(h.steps.back().H_after <= 1.0);
        }
        if (h.outcome == TerminalOutcome::lost_in_forwarding && !h.steps.empty())
            CHECK(h.steps.back().H_after > 1.0);
    }
    CHECK(delivered == result.tallies.delivered);
    CHECK(accepted == result.tallies.accepted);
    CHECK(steps == result.tallies.forwarding_steps);
}

TEST_CASE("step cap")
{
    ChainParams p;
    p.M = 1e6;
    p.forwarding_loss = 0;
    auto chain = constant_chain(p);
    try {
        simulate(chain, 10, 1, {1, 50, 1000});
        FAIL("expected a kernel stall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kernel_stall);
    }
    CHECK_THROWS_AS(simulate(reference_chain(), 0, 1), Error);
}

TEST_CASE("zero-length forwarding window")
{
    ChainParams p;
    p.H_c = 100.0;
    auto r = simulate(constant_chain(p), 20'000, 10);
    CHECK(r.p.value == 1.0);
    CHECK(r.tallies.forwarding_steps == 0);
}
