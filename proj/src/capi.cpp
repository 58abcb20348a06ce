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

#include "critchain/critchain.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "critchain/spec_io.hpp"

using namespace critchain;

struct cc_chain {
    ChainDocument doc;
};

namespace {

thread_local std::string last_error;

cc_status set_error(cc_status status, std::string message)
{
    last_error = std::move(message);
    return status;
}

template <class F>
cc_status guarded(F&& f)
{
    try {
        f();
        last_error.clear();
        return CC_OK;
    } catch (const Error& e) {
        return set_error(static_cast<cc_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(CC_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(CC_INTERNAL, e.what());
    }
}

char* copy_out(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

} // namespace

extern "C" {

const char* cc_last_error(void) { return last_error.c_str(); }

int cc_status_is_numeric(cc_status status)
{
    if (status >= CC_INVALID_ATTRIBUTE && status <= CC_IO)
        return is_numeric_error(static_cast<ErrorCode>(status)) ? 1 : 0;
    return status == CC_INTERNAL ? 1 : 0;
}

const char* cc_version(void) { return "1.0.0"; }

cc_status cc_chain_from_json(const char* text, size_t length, cc_chain** out)
{
    if (!text || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = new cc_chain{parse_chain_document(std::string_view(text, length))}; });
}

cc_status cc_chain_builtin(const char* name, cc_chain** out)
{
    if (!name || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto doc = builtin_document(name);
        if (!doc)
            fail(ErrorCode::io, std::string("unknown built-in chain '") + name + "'");
        *out = new cc_chain{std::move(*doc)};
    });
}

void cc_chain_free(cc_chain* chain) { delete chain; }

cc_status cc_chain_set_lastmile_mode(cc_chain* chain, const char* mode)
{
    if (!chain || !mode)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    std::string m = mode;
    if (m == "rate-ratio")
        chain->doc.chain.lastmile_mode = LastMileMode::rate_ratio;
    else if (m == "pointwise-mean")
        chain->doc.chain.lastmile_mode = LastMileMode::pointwise_mean;
    else
        return set_error(CC_INVALID_ARGUMENT, "last-mile mode must be rate-ratio or pointwise-mean");
    last_error.clear();
    return CC_OK;
}

cc_status cc_chain_set_feasibility_multiple(cc_chain* chain, double multiple)
{
    if (!chain)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        DiffusionSpec d = chain->doc.chain.diffusion;
        d.feasibility_multiple = multiple;
        validate(d);
        chain->doc.chain.diffusion = d;
    });
}

cc_status cc_analyze(const cc_chain* chain, cc_report* out)
{
    if (!chain || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        ChainReport r = analyze(chain->doc.chain);
        *out = cc_report{r.P_e, r.p, r.P_c, r.k, r.k_eff, r.is_critical ? 1 : 0, r.xi_mix, r.MA,
                         r.theta, r.lastmile_temperature, r.L, r.feasibility_radius, r.warnings.size()};
    });
}

void cc_string_free(char* text) { std::free(text); }

cc_status cc_chain_to_json(const cc_chain* chain, char** out)
{
    if (!chain || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = copy_out(to_json_text(chain->doc)); });
}

cc_status cc_report_json(const cc_chain* chain, char** out)
{
    if (!chain || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = copy_out(report_json(chain->doc.chain, analyze(chain->doc.chain))); });
}

cc_status cc_profile_csv(const cc_chain* chain, size_t steps, char** out)
{
    if (!chain || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] { *out = copy_out(profile_csv(escape_profile(chain->doc.chain, steps))); });
}

cc_status cc_flux_csv(const cc_chain* chain, cc_flux_method method, char** out)
{
    if (!chain || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto& d = chain->doc.chain.diffusion;
        *out = copy_out(flux_csv(method == CC_FLUX_ANALYTIC ? flux_profile_analytic(d)
                                                            : flux_profile_numeric(d)));
    });
}

cc_status cc_spectrum_csv(const cc_chain* chain, cc_mile mile, size_t points, char** out)
{
    if (!chain || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const ChainSpec& c = chain->doc.chain;
        std::vector<SpectrumRow> rows;
        if (mile == CC_MILE_LAST) {
            rows = spectrum_table(lastmile_spectrum(c), c.H_c(), points);
        } else {
            MBSpectrum s{c.lastmile_temperature, c.total_flow};
            rows = spectrum_table(s, 10.0 * s.T.value(), points);
        }
        *out = copy_out(spectrum_csv(rows));
    });
}

cc_status cc_montecarlo(const cc_chain* chain, uint64_t n_items, uint64_t seed, size_t workers,
                        char** mc_out, char** histogram_out)
{
    if (!chain)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    char* json_text = nullptr;
    cc_status st = guarded([&] {
        MCOptions opt;
        opt.workers = workers == 0 ? 1 : workers;
        MCResult r = simulate(chain->doc.chain, n_items, seed, opt);
        std::string j = mc_json(r, chain->doc.chain);
        std::string h = q_histogram_csv(r.histogram);
        if (mc_out)
            json_text = copy_out(j);
        if (histogram_out)
            *histogram_out = copy_out(h);
        if (mc_out)
            *mc_out = json_text;
    });
    if (st != CC_OK)
        std::free(json_text);
    return st;
}

cc_status cc_optimize(const cc_chain* chain, cc_objective objective, cc_opt_method method,
                      uint64_t seed, uint64_t iterations, char** out)
{
    if (!chain || !out)
        return set_error(CC_INVALID_ARGUMENT, "null argument");
    if (!chain->doc.catalog)
        return set_error(CC_SCHEMA, "chain document has no catalog to optimize over");
    return guarded([&] {
        const Catalog& cat = *chain->doc.catalog;
        Objective obj = objective == CC_OBJECTIVE_MA ? Objective::ma : Objective::k;
        if (method == CC_OPT_EXHAUSTIVE) {
            Selection best = optimize_exhaustive(cat, chain->doc.chain, obj);
            *out = copy_out(optimum_json(cat, obj, "exhaustive", best, nullptr));
        } else {
            AnnealOptions opt;
            opt.iterations = iterations;
            AnnealResult r = optimize_anneal(cat, chain->doc.chain, obj, seed, opt);
            *out = copy_out(optimum_json(cat, obj, "anneal", r.best, &r));
        }
    });
}

} // extern "C"
