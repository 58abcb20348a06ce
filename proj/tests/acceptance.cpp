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

// Acceptance run: one line per criterion, non-zero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "critchain/critchain.h"
#include "critchain/diffusion.hpp"
#include "critchain/montecarlo.hpp"
#include "critchain/optimize.hpp"
#include "critchain/spectra.hpp"
#include "critchain/transport.hpp"
#include "renewal.hpp"
#include "support.hpp"

using namespace testkit;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (!detail.empty())
            detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::size_t workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body)
{
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.check(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(secs < limit_s, fmt("runtime %.2f s", secs) + fmt(" < %.0f s", limit_s));
    failures += !o.pass;
    std::printf("[%s] criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
}

void scale_stage(StageSpec& stage, double s)
{
    for (auto& i : stage.interactors)
        for (auto& [kind, mf] : i.factors)
            mf.count *= s;
}

double p_gap(double ratio, std::uint64_t seed, MCResult* out = nullptr)
{
    ChainParams p;
    p.forwarding_loss = 0.9 * ratio;
    auto chain = constant_chain(p);
    auto r = simulate(chain, 1'000'000, seed, {workers(), 50, 1'000'000});
    if (out)
        *out = r;
    return forwarding_escape(chain) - r.p.value;
}

std::string text(const std::function<cc_status(char**)>& call)
{
    char* s = nullptr;
    if (call(&s) != CC_OK)
        return std::string("error: ") + cc_last_error();
    std::string out(s);
    cc_string_free(s);
    return out;
}

} // namespace

int main()
{
    criterion(1, "spectrum normalization and moments", 5.0, [](Outcome& o) {
        const double T = 2.5;
        MBSpectrum s{MarketTemperature(T), 1.0};
        double integral = total_flow(s, 0.0, SigmaProfile::unbounded);
        o.check(std::abs(integral - 1.0) <= 1e-9, fmt("|integral - 1| = %.2e", std::abs(integral - 1.0)));

        const std::size_t n = 1'000'000;
        auto draws = mb_sample(s, 11, n);
        double mean = 0.0;
        for (double h : draws)
            mean += h;
        mean /= n;
        double se = std::sqrt(1.5) * T / std::sqrt(double(n));
        o.check(std::abs(mean - 1.5 * T) <= 3 * se, fmt("mean/T = %.5f", mean / T) + fmt(" (se %.1e)", se / T));

        // parabola through the histogram around its peak
        const double width = 0.05 * T;
        std::vector<double> counts(40, 0.0);
        for (double h : draws)
            if (h < 40 * width)
                counts[static_cast<std::size_t>(h / width)] += 1;
        auto peak = std::max_element(counts.begin() + 1, counts.end() - 1) - counts.begin();
        double sx = 0, sx2 = 0, sx3 = 0, sx4 = 0, sy = 0, sxy = 0, sx2y = 0;
        int m = 0;
        for (auto b = std::max<long>(0, peak - 6); b <= peak + 6; ++b, ++m) {
            double x = (b + 0.5) * width / T, y = counts[b];
            sx += x, sx2 += x * x, sx3 += x * x * x, sx4 += x * x * x * x;
            sy += y, sxy += x * y, sx2y += x * x * y;
        }
        // normal equations for y = c0 + c1 x + c2 x^2 by Cramer's rule
        auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
            return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
        };
        double D = det3(m, sx, sx2, sx, sx2, sx3, sx2, sx3, sx4);
        double c1 = det3(m, sy, sx2, sx, sxy, sx3, sx2, sx2y, sx4) / D;
        double c2 = det3(m, sx, sy, sx, sx2, sxy, sx2, sx3, sx2y) / D;
        double mode = -c1 / (2 * c2);
        o.check(std::abs(mode - 0.5) <= 0.05, fmt("mode/T = %.3f", mode));
    });

    criterion(2, "moderation cross-check", 10.0, [](Outcome& o) {
        for (double M : {5.0, 10.0, 50.0}) {
            ScatterKernel k(Inertia(1.0), Inertia(M));
            Rng rng = make_stream(21, static_cast<std::uint64_t>(M));
            const std::size_t n = 1'000'000;
            double sum = 0, sq = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double g = std::log(1.0 / g_sample(k, 1.0, rng));
                sum += g;
                sq += g * g;
            }
            double mean = sum / n;
            double se = std::sqrt((sq / n - mean * mean) / n);
            double xi = xi_single(k);
            o.check(std::abs(mean - xi) <= 3 * se,
                    fmt("M/m=%.0f: ", M) + fmt("mean %.6f", mean) + fmt(" vs %.6f", xi) +
                        fmt(" (%.2f se)", std::abs(mean - xi) / se));
        }
    });

    criterion(3, "forwarding escape closed form", 1.0, [](Outcome& o) {
        double worst = 0.0;
        for (double ratio : {0.01, 0.1, 1.0})
            for (double span : {10.0, 100.0, 1e4}) {
                ChainParams p;
                p.sigma_f = 0.9;
                p.forwarding_loss = 0.9 * ratio;
                p.H_max = span;
                auto chain = constant_chain(p);
                double xi = xi_from_alpha(alpha(Inertia(1), Inertia(5)));
                double exact = std::pow(1.0 / span, ratio / (xi * (1.0 + ratio)));
                worst = std::max(worst, rel_diff(forwarding_escape(chain), exact));
            }
        o.check(worst <= 1e-8, fmt("worst relative error %.2e over 9 points", worst));
    });

    MCResult reference_mc;
    criterion(4, "Monte Carlo vs deterministic forwarding escape", 60.0, [&](Outcome& o) {
        auto chain = reference_chain();
        reference_mc = simulate(chain, 1'000'000, 7, {workers(), 50, 1'000'000});
        const auto& r = reference_mc;
        double p = forwarding_escape(chain);
        double rel = std::abs(r.p.value - 0.26954) / 0.26954;
        o.check(rel <= 0.05, fmt("p_mc = %.5f", r.p.value) + fmt(" is %.1f%% from 0.26954", 100 * rel));
        o.check(r.p.value <= p + 3 * r.p.std_error, fmt("p_mc <= p + 3se (se %.1e)", r.p.std_error));

        RenewalSurvival exact(alpha(Inertia(1), Inertia(5)), 0.9, std::log(100.0) + 0.1);
        double p_walk = exact(std::log(100.0));
        o.check(std::abs(r.p.value - p_walk) <= 3 * r.p.std_error,
                fmt("collision-walk survival %.5f within 3se", p_walk));

        double g1 = p - r.p.value;
        double g2 = p_gap(0.01, 7);
        double g3 = p_gap(0.001, 7);
        o.check(g1 > g2 && g2 > g3, fmt("gaps %.2e", g1) + fmt(" > %.2e", g2) + fmt(" > %.2e", g3));
    });

    criterion(5, "entry and last-mile branching", 60.0, [&](Outcome& o) {
        auto chain = reference_chain();
        auto det = analyze(chain);
        const auto& r = reference_mc;
        o.check(r.n_items == 1'000'000, "reference run available");
        o.check(std::abs(r.P_e.value - det.P_e) <= 3 * r.P_e.std_error,
                fmt("P_e %.5f", r.P_e.value) + fmt(" vs %.5f", det.P_e));
        o.check(std::abs(r.P_c.value - det.P_c) <= 3 * r.P_c.std_error,
                fmt("P_c %.5f", r.P_c.value) + fmt(" vs %.5f", det.P_c));

        // every stage scaled together leaves the last-mile temperature alone
        bool exact = true;
        for (double s : {0.25, 2.0, 8.0}) {
            auto scaled = chain;
            for (auto* stage : {&scaled.entry, &scaled.forwarding, &scaled.lastmile})
                scale_stage(*stage, s);
            auto r = analyze(scaled);
            exact = exact && r.P_e == det.P_e && r.P_c == det.P_c;
        }
        o.check(exact, "all stages scaled by 1/4, 2, 8: bit-exact");

        // a lone stage also moves the last-mile temperature through theta
        double worst = 0.0;
        for (double s : {0.25, 2.0, 8.0, 3.7, 0.013}) {
            auto scaled = chain;
            scale_stage(scaled.entry, s);
            scale_stage(scaled.lastmile, s);
            worst = std::max({worst, rel_diff(entry_escape(scaled.entry.interactors, scaled.H_max()), det.P_e),
                              rel_diff(lastmile_escape(scaled), det.P_c)});
        }
        o.check(worst <= 1e-15, fmt("entry or last mile scaled alone: within %.1e", worst));

        auto scaled = chain;
        scale_stage(scaled.entry, 4.0);
        scale_stage(scaled.lastmile, 4.0);
        auto a = simulate(chain, 100'000, 3), b = simulate(scaled, 100'000, 3);
        o.check(a.tallies.accepted == b.tallies.accepted && a.tallies.delivered == b.tallies.delivered,
                "simulated tallies unchanged by scaling");
    });

    criterion(6, "criticality identity", 60.0, [&](Outcome& o) {
        Gen g(66);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            ChainParams p;
            p.sigma_e = g.log_uniform(0.1, 10);
            p.entry_loss = g.coin() ? g.log_uniform(0.01, 10) : 0.0;
            p.sigma_f = g.log_uniform(0.05, 5);
            p.forwarding_loss = g.coin() ? g.log_uniform(1e-3, 2) : 0.0;
            p.M = g.log_uniform(1.5, 200);
            p.H_max = g.log_uniform(2, 1e4);
            p.sigma_d = g.log_uniform(0.1, 10);
            p.lastmile_loss = g.coin() ? g.log_uniform(0.01, 10) : 0.0;
            auto r = analyze(constant_chain(p));
            worst = std::max(worst, std::abs(r.k_eff - 1.0));
        }
        o.check(worst <= 1e-12, fmt("max |k_eff - 1| = %.1e over 200 chains", worst));

        const auto& t = reference_mc.tallies;
        bool chain_ok = t.delivered <= t.reached_lastmile && t.reached_lastmile <= t.accepted && t.accepted <= t.entered;
        double k = double(t.delivered) / double(t.entered);
        double product = reference_mc.P_e.value * reference_mc.p.value * reference_mc.P_c.value;
        o.check(chain_ok && reference_mc.k.value == k, "k_mc = delivered / entered");
        o.check(rel_diff(product, k) <= 1e-15, fmt("|P_e p P_c - k_mc| / k_mc = %.1e", rel_diff(product, k)));
    });

    criterion(7, "diffusion", 2.0, [](Outcome& o) {
        auto spec = reference_chain().diffusion;
        double L = spec.length_at(0.0);
        auto max_err = [](const DiffusionSpec& s) {
            auto num = flux_profile_numeric(s), ana = flux_profile_analytic(s);
            double e = 0.0;
            for (std::size_t i = 0; i < num.phi.size(); ++i)
                e = std::max(e, rel_diff(num.phi[i], ana.phi[i]));
            return e;
        };
        double e = max_err(spec);
        o.check(e <= 1e-6, fmt("grid_n=1024 to x_max=%.3gL: ", spec.x_max / L) + fmt("max relative error %.2e", e));

        auto near = spec;
        near.x_max = 2.5 * L;
        double e_near = max_err(near);
        o.check(e_near <= 1e-6, fmt("to x_max=2.5L: %.2e", e_near));

        std::vector<double> errs;
        for (std::size_t n : {256, 512, 1024, 2048}) {
            auto s = spec;
            s.grid_n = n;
            errs.push_back(max_err(s));
        }
        double order = std::log2(errs[2] / errs[3]);
        bool stable = true;
        for (std::size_t i = 1; i < errs.size(); ++i)
            stable = stable && std::abs(std::log2(errs[i - 1] / errs[i]) - 2.0) <= 0.05;
        o.check(stable, fmt("observed order %.3f", order));

        double radius = feasibility_radius(spec);
        o.check(radius == 6.0 * L, fmt("radius = %.17gL", radius / L));
    });

    criterion(8, "annealing finds the exhaustive optimum", 120.0, [](Outcome& o) {
        Gen g(88);
        auto base = reference_chain();
        int hits = 0, runs = 0;
        for (int c = 0; c < 20; ++c) {
            std::size_t n = 4 + c % 9;
            Catalog cat;
            for (std::size_t i = 0; i < n; ++i)
                cat.candidates.push_back(mediator("m" + std::to_string(i), g.log_uniform(1.5, 60),
                                                  g.uniform(0.05, 1.5), g.coin() ? g.uniform(0.0, 0.3) : 0.0,
                                                  g.uniform(0.5, 2.0)));
            cat.max_copies = n <= 8 ? 2 : 1;
            cat.budget = g.uniform(0.25, 0.6) * n * 1.25;
            Objective obj = c % 2 ? Objective::ma : Objective::k;
            auto exact = optimize_exhaustive(cat, base, obj);
            for (std::uint64_t seed = 0; seed < 5; ++seed, ++runs) {
                auto r = optimize_anneal(cat, base, obj, 1000 * c + seed);
                hits += !ranks_above(exact, r.best, obj);
            }
        }
        o.check(hits >= 95, std::to_string(hits) + "/" + std::to_string(runs) + " runs hit the optimum");
    });

    criterion(9, "determinism and worker independence", 60.0, [](Outcome& o) {
        cc_chain* chain = nullptr;
        if (cc_chain_builtin("reference-chain", &chain) != CC_OK) {
            o.check(false, cc_last_error());
            return;
        }
        auto twice = [&](const char* name, const std::function<std::string()>& run) {
            std::string a = run(), b = run();
            o.check(a == b && a.rfind("error", 0) != 0, std::string(name) + " reproducible");
        };
        twice("analyze", [&] { return text([&](char** s) { return cc_report_json(chain, s); }); });
        twice("profile", [&] { return text([&](char** s) { return cc_profile_csv(chain, 50, s); }); });
        twice("diffuse", [&] { return text([&](char** s) { return cc_flux_csv(chain, CC_FLUX_NUMERIC, s); }); });
        twice("sample", [&] { return text([&](char** s) { return cc_spectrum_csv(chain, CC_MILE_LAST, 201, s); }); });
        twice("optimize", [&] { return text([&](char** s) { return cc_optimize(chain, CC_OBJECTIVE_K, CC_OPT_ANNEAL, 5, 10000, s); }); });

        std::vector<std::string> outs;
        for (std::size_t w : {1, 2, 5, 16}) {
            char* hist = nullptr;
            std::string mc = text([&](char** s) { return cc_montecarlo(chain, 200'000, 13, w, s, &hist); });
            outs.push_back(mc + (hist ? hist : ""));
            cc_string_free(hist);
        }
        bool same = std::all_of(outs.begin(), outs.end(), [&](const auto& x) { return x == outs.front(); });
        o.check(same, "montecarlo identical for 1, 2, 5 and 16 workers");
        cc_chain_free(chain);

        auto cat_base = reference_chain();
        Catalog cat;
        Gen g(99);
        for (int i = 0; i < 8; ++i)
            cat.candidates.push_back(mediator("m" + std::to_string(i), g.log_uniform(1.5, 60), g.uniform(0.1, 1.2),
                                              0.0, g.uniform(0.5, 2.0)));
        cat.budget = 4.0;
        auto r1 = anneal_restarts(cat, cat_base, Objective::k, 3, 8, {}, 1);
        auto r4 = anneal_restarts(cat, cat_base, Objective::k, 3, 8, {}, 4);
        o.check(r1.seed == r4.seed && r1.best.counts == r4.best.counts && r1.evaluations == r4.evaluations,
                "annealing restarts identical for 1 and 4 workers");
    });

    return failures == 0 ? 0 : 1;
}
