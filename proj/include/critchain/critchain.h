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

#ifndef CRITCHAIN_H
#define CRITCHAIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CC_API __declspec(dllexport)
#else
#define CC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values 1..15 mirror critchain::ErrorCode. */
typedef enum cc_status {
    CC_OK = 0,
    CC_INVALID_ATTRIBUTE = 1,
    CC_DOMAIN = 2,
    CC_SINGULAR_CHAIN = 3,
    CC_SINGULAR_MEDIATOR = 4,
    CC_INERTIA_ORDER = 5,
    CC_KERNEL = 6,
    CC_NO_FORWARDING = 7,
    CC_DEGENERATE_FORWARDING = 8,
    CC_EMPTY_STAGE = 9,
    CC_NUMERIC = 10,
    CC_KERNEL_STALL = 11,
    CC_BUDGET = 12,
    CC_SEARCH_SPACE = 13,
    CC_SCHEMA = 14,
    CC_IO = 15,
    CC_INVALID_ARGUMENT = 64,
    CC_INTERNAL = 65
} cc_status;

typedef struct cc_chain cc_chain;

typedef struct cc_report {
    double P_e;
    double p;
    double P_c;
    double k;
    double k_eff;
    int is_critical;
    double xi_mix;
    double MA; /* +inf when the forwarding stage has no loss */
    double theta;
    double lastmile_temperature;
    double L;
    double feasibility_radius;
    size_t warning_count;
} cc_report;

typedef enum cc_mile { CC_MILE_FIRST = 0, CC_MILE_LAST = 1 } cc_mile;
typedef enum cc_flux_method { CC_FLUX_NUMERIC = 0, CC_FLUX_ANALYTIC = 1 } cc_flux_method;
typedef enum cc_objective { CC_OBJECTIVE_K = 0, CC_OBJECTIVE_MA = 1 } cc_objective;
typedef enum cc_opt_method { CC_OPT_ANNEAL = 0, CC_OPT_EXHAUSTIVE = 1 } cc_opt_method;

/* Message of the last failed call on this thread; empty after success. */
CC_API const char* cc_last_error(void);
/* Non-zero for numerical failures, zero for validation failures. */
CC_API int cc_status_is_numeric(cc_status status);
CC_API const char* cc_version(void);

CC_API cc_status cc_chain_from_json(const char* text, size_t length, cc_chain** out);
/* Known names: "reference-chain". */
CC_API cc_status cc_chain_builtin(const char* name, cc_chain** out);
CC_API void cc_chain_free(cc_chain* chain);

/* "rate-ratio" or "pointwise-mean". */
CC_API cc_status cc_chain_set_lastmile_mode(cc_chain* chain, const char* mode);
CC_API cc_status cc_chain_set_feasibility_multiple(cc_chain* chain, double multiple);

CC_API cc_status cc_analyze(const cc_chain* chain, cc_report* out);

/* Text outputs are NUL-terminated and released with cc_string_free. */
CC_API void cc_string_free(char* text);
CC_API cc_status cc_chain_to_json(const cc_chain* chain, char** out);
CC_API cc_status cc_report_json(const cc_chain* chain, char** out);
CC_API cc_status cc_profile_csv(const cc_chain* chain, size_t steps, char** out);
CC_API cc_status cc_flux_csv(const cc_chain* chain, cc_flux_method method, char** out);
CC_API cc_status cc_spectrum_csv(const cc_chain* chain, cc_mile mile, size_t points, char** out);
/* Either output may be NULL. The result does not depend on workers. */
CC_API cc_status cc_montecarlo(const cc_chain* chain, uint64_t n_items, uint64_t seed,
                               size_t workers, char** mc_json, char** histogram_csv);
/* Uses the catalog of the chain document; iterations only apply to annealing. */
CC_API cc_status cc_optimize(const cc_chain* chain, cc_objective objective, cc_opt_method method,
                             uint64_t seed, uint64_t iterations, char** optimum_json);

#ifdef __cplusplus
}
#endif

#endif
