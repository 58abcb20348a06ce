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

#include "critchain/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "critchain/spectra.hpp"

namespace critchain {

const char* to_string(TerminalOutcome outcome) noexcept
{
    switch (outcome) {
    case TerminalOutcome::delivered: return "delivered";
    case TerminalOutcome::lost_in_entry: return "lost-in-entry";
    case TerminalOutcome::lost_in_forwarding: return "lost-in-forwarding";
    case TerminalOutcome::lost_in_lastmile: return "lost-in-lastmile";
    }
    return "?";
}

namespace {

struct FactorRef {
    const MacroFactor* forwarding = nullptr;
    const MacroFactor* loss = nullptr;
    double alpha = 0.0;
};

// Immutable per-run state shared by every worker.
struct Context {
    double H_max, H_c, u_c;
    double P_e;
    double T_lastmile;
    std::vector<FactorRef> forwarders; // mediators first, then pure absorbers
    std::size_t n_mediators = 0;
    std::vector<const MacroFactor*> lm_delivery, lm_loss;
    std::size_t bins;
    std::uint64_t max_steps;
};

Context make_context(const ChainSpec& chain, const MCOptions& options)
{
    validate(chain);
    Context c;
    c.H_max = chain.H_max();
    c.H_c = chain.H_c();
    c.u_c = std::log(c.H_max) - std::log(c.H_c);
    c.P_e = entry_escape(chain.entry.interactors, c.H_max);
    c.T_lastmile = lastmile_spectrum(chain).T.value();
    for (const auto& i : chain.forwarding.interactors) {
        if (!i.has(InteractionKind::forwarding))
            continue;
        FactorRef f;
        f.forwarding = &i.factors.at(InteractionKind::forwarding);
        if (i.has(InteractionKind::loss))
            f.loss = &i.factors.at(InteractionKind::loss);
        f.alpha = alpha(chain.item_inertia, *i.capacity);
        c.forwarders.push_back(f);
    }
    c.n_mediators = c.forwarders.size();
    for (const auto& i : chain.forwarding.interactors)
        if (!i.has(InteractionKind::forwarding) && i.has(InteractionKind::loss))
            c.forwarders.push_back({nullptr, &i.factors.at(InteractionKind::loss), 0.0});
    for (const auto& i : chain.lastmile.interactors) {
        if (i.has(InteractionKind::delivery))
            c.lm_delivery.push_back(&i.factors.at(InteractionKind::delivery));
        if (i.has(InteractionKind::loss))
            c.lm_loss.push_back(&i.factors.at(InteractionKind::loss));
    }
    c.bins = c.u_c > 0.0 ? std::max<std::size_t>(options.histogram_bins, 1) : 1;
    c.max_steps = options.max_steps;
    return c;
}

struct BlockTally {
    MCTallies t;
    std::vector<std::uint64_t> last_bin; // items whose deepest bin edge reached is b
};

// Highest bin b with edges[b] <= u.
std::size_t deepest_bin(const Context& c, double u)
{
    if (c.u_c <= 0.0)
        return 0;
    double x = u / c.u_c * static_cast<double>(c.bins);
    if (x >= static_cast<double>(c.bins - 1))
        return c.bins - 1;
    return static_cast<std::size_t>(std::max(0.0, std::floor(x)));
}

void run_item(const Context& c, Rng& rng, BlockTally& tally, std::vector<double>& weights,
              ItemHistory* record)
{
    auto& t = tally.t;
    ++t.entered;
    if (!(uniform01(rng) < c.P_e)) {
        if (record)
            record->outcome = TerminalOutcome::lost_in_entry;
        return;
    }
    ++t.accepted;
    if (record)
        record->entry = EntryOutcome::accepted;

    double H = c.H_max;
    double u = 0.0;
    std::uint64_t steps = 0;
    weights.resize(c.n_mediators);
    while (H > c.H_c) {
        if (++steps > c.max_steps)
            fail(ErrorCode::kernel_stall, "item exceeded the forwarding step cap");
        double sf = 0.0, sl = 0.0;
        for (std::size_t j = 0; j < c.forwarders.size(); ++j) {
            const auto& f = c.forwarders[j];
            if (j < c.n_mediators) {
                weights[j] = (*f.forwarding)(H);
                sf += weights[j];
            }
            if (f.loss)
                sl += (*f.loss)(H);
        }
        if (sf + sl == 0.0)
            fail(ErrorCode::degenerate_forwarding, "Sigma_f + Sigma_l = 0 during forwarding");
        if (uniform01(rng) * (sf + sl) < sl) {
            ++tally.last_bin[deepest_bin(c, u)];
            if (record) {
                record->outcome = TerminalOutcome::lost_in_forwarding;
                record->final_lethargy = u;
            }
            return;
        }
        std::size_t pick = 0;
        if (c.n_mediators > 1) {
            double target = uniform01(rng) * sf;
            double acc = 0.0;
            pick = c.n_mediators - 1;
            for (std::size_t j = 0; j < c.n_mediators; ++j) {
                acc += weights[j];
                if (target < acc && weights[j] > 0.0) {
                    pick = j;
                    break;
                }
            }
        }
        double a = c.forwarders[pick].alpha;
        double H_next = std::max(H * (a + (1.0 - a) * uniform01(rng)), a * H);
        double gain = std::log(H / H_next);
        ++t.forwarding_steps;
        t.lethargy_gain_sum += gain;
        t.lethargy_gain_sq_sum += gain * gain;
        if (record)
            record->steps.push_back({H, H_next});
        H = H_next;
        u += gain;
    }
    ++tally.last_bin[c.bins - 1];
    ++t.reached_lastmile;

    double h = mb_draw_truncated(c.T_lastmile, c.H_c, rng);
    double sd = 0.0, sl = 0.0;
    for (const auto* mf : c.lm_delivery)
        sd += (*mf)(h);
    for (const auto* mf : c.lm_loss)
        sl += (*mf)(h);
    if (sd + sl == 0.0)
        fail(ErrorCode::empty_stage, "last mile has no interaction at the sampled enthalpy");
    bool delivered = uniform01(rng) * (sd + sl) < sd;
    if (delivered)
        ++t.delivered;
    if (record) {
        record->lastmile_H = h;
        record->final_lethargy = std::log(c.H_max) - std::log(h);
        record->outcome = delivered ? TerminalOutcome::delivered : TerminalOutcome::lost_in_lastmile;
    }
}

BlockTally run_block(const Context& c, std::uint64_t seed, std::uint64_t block, std::uint64_t n_items)
{
    BlockTally tally;
    tally.last_bin.assign(c.bins, 0);
    Rng rng = make_stream(seed, block);
    std::vector<double> weights;
    std::uint64_t first = block * mc_block_size;
    std::uint64_t last = std::min(n_items, first + mc_block_size);
    for (std::uint64_t i = first; i < last; ++i)
        run_item(c, rng, tally, weights, nullptr);
    return tally;
}

Estimate binomial(std::uint64_t hits, std::uint64_t trials)
{
    if (trials == 0)
        return {};
    double p = static_cast<double>(hits) / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

} // namespace

MCResult simulate(const ChainSpec& chain, std::uint64_t n_items, std::uint64_t seed,
                  const MCOptions& options)
{
    if (n_items < 1)
        fail(ErrorCode::domain, "simulation needs at least one item");
    const Context c = make_context(chain, options);
    const std::uint64_t n_blocks = (n_items + mc_block_size - 1) / mc_block_size;
    std::vector<BlockTally> blocks(n_blocks);

    std::size_t workers = std::clamp<std::size_t>(options.workers, 1, n_blocks);
    std::vector<std::exception_ptr> errors(n_blocks);
    auto work = [&](std::size_t w) {
        for (std::uint64_t b = w; b < n_blocks; b += workers) {
            try {
                blocks[b] = run_block(c, seed, b, n_items);
            } catch (...) {
                errors[b] = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& th : pool)
            th.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    // Reduce in block order so floating-point sums are scheduling-free.
    MCResult r;
    r.n_items = n_items;
    r.seed = seed;
    r.H_max = c.H_max;
    r.H_c = c.H_c;
    std::vector<std::uint64_t> last_bin(c.bins, 0);
    for (const auto& b : blocks) {
        auto& t = r.tallies;
        t.entered += b.t.entered;
        t.accepted += b.t.accepted;
        t.reached_lastmile += b.t.reached_lastmile;
        t.delivered += b.t.delivered;
        t.forwarding_steps += b.t.forwarding_steps;
        t.lethargy_gain_sum += b.t.lethargy_gain_sum;
        t.lethargy_gain_sq_sum += b.t.lethargy_gain_sq_sum;
        for (std::size_t i = 0; i < c.bins; ++i)
            last_bin[i] += b.last_bin[i];
    }
    r.histogram.edges.resize(c.bins + 1);
    for (std::size_t i = 0; i <= c.bins; ++i)
        r.histogram.edges[i] = c.u_c * static_cast<double>(i) / static_cast<double>(c.bins);
    r.histogram.counts.assign(c.bins, 0);
    std::uint64_t running = 0;
    for (std::size_t i = c.bins; i-- > 0;) {
        running += last_bin[i];
        r.histogram.counts[i] = running;
    }

    const auto& t = r.tallies;
    r.P_e = binomial(t.accepted, t.entered);
    r.p = binomial(t.reached_lastmile, t.accepted);
    r.P_c = binomial(t.delivered, t.reached_lastmile);
    r.k = binomial(t.delivered, t.entered);
    if (t.forwarding_steps > 0) {
        double n = static_cast<double>(t.forwarding_steps);
        double mean = t.lethargy_gain_sum / n;
        double var = std::max(0.0, t.lethargy_gain_sq_sum / n - mean * mean);
        r.mean_lethargy_gain = {mean, std::sqrt(var / n)};
    }
    return r;
}

std::vector<ItemHistory> trace(const ChainSpec& chain, std::uint64_t n_items, std::uint64_t seed,
                               std::uint64_t max_steps)
{
    MCOptions options;
    options.max_steps = max_steps;
    const Context c = make_context(chain, options);
    std::vector<ItemHistory> out;
    out.reserve(n_items);
    BlockTally tally;
    tally.last_bin.assign(c.bins, 0);
    std::vector<double> weights;
    Rng rng = make_stream(seed, 0);
    for (std::uint64_t i = 0; i < n_items; ++i) {
        if (i > 0 && i % mc_block_size == 0)
            rng = make_stream(seed, i / mc_block_size);
        ItemHistory h;
        run_item(c, rng, tally, weights, &h);
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<EmpiricalPoint> empirical_profile(const MCResult& result)
{
    const auto& hist = result.histogram;
    if (hist.counts.empty())
        fail(ErrorCode::domain, "histogram is empty");
    std::vector<EmpiricalPoint> out;
    double q0 = static_cast<double>(hist.counts.front());
    auto point = [&](double u, std::uint64_t count) {
        EmpiricalPoint p{result.H_max * std::exp(-u), u, std::nullopt, 0.0};
        if (count > 0 && q0 > 0.0) {
            double v = static_cast<double>(count) / q0;
            p.p = v;
            p.std_error = std::sqrt(v * (1.0 - v) / q0);
        }
        return p;
    };
    for (std::size_t b = 0; b < hist.counts.size(); ++b)
        out.push_back(point(hist.edges[b], hist.counts[b]));
    if (hist.edges.back() > 0.0) {
        auto last = point(hist.edges.back(), result.tallies.reached_lastmile);
        last.H = result.H_c;
        out.push_back(last);
    }
    return out;
}

} // namespace critchain
