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

#include <string>
#include <vector>

#include "critchain/core.hpp"
#include "critchain/diffusion.hpp"
#include "critchain/moderation.hpp"

namespace critchain {

/// How the last-mile escape probability folds the enthalpy spectrum in.
///   rate_ratio:     integral(Sigma_d w) / integral((Sigma_d + Sigma_l) w)
///   pointwise_mean: flow-weighted mean of Sigma_d / (Sigma_d + Sigma_l)
/// Both agree for enthalpy-independent factors.
enum class LastMileMode { rate_ratio, pointwise_mean };

const char* to_string(LastMileMode mode) noexcept;

/// A full supply chain: entry at H_max, forwarding over [H_c, H_max] and a
/// last mile over [0, H_c].
struct ChainSpec {
    std::string name;
    StageSpec entry{StageKind::entry, {}, 0.0, 0.0};
    StageSpec forwarding{StageKind::forwarding, {}, 0.0, 0.0};
    StageSpec lastmile{StageKind::lastmile, {}, 0.0, 0.0};
    Inertia item_inertia{1.0};
    MarketTemperature lastmile_temperature{1.0};
    DiffusionSpec diffusion;
    double total_flow = 1.0;
    LastMileMode lastmile_mode = LastMileMode::rate_ratio;
    double isotropy_factor = default_isotropy_factor;

    double H_max() const noexcept { return forwarding.H_hi; }
    double H_c() const noexcept { return forwarding.H_lo; }

    /// Sets every stage window from the two bounding enthalpies.
    void set_window(double H_max, double H_c);
};

void validate(const ChainSpec& chain);

/// Modelling caveats that do not stop the computation (isotropy of weak
/// mediators and the like).
std::vector<std::string> chain_warnings(const ChainSpec& chain);

/// The constant-factor chain used throughout the documentation and tests:
/// entry 2.0 / 0.5, one mediator (M = 5, m = 1) with Sigma_f = 0.9 against an
/// absorber of 0.1, H_max / H_c = 100, last mile 3 / 1, and diffusion with
/// D = 4 and unit removal.
ChainSpec reference_chain();

struct ChainReport {
    double P_e = 0.0;
    double p = 0.0;
    double P_c = 0.0;
    double k = 0.0;
    double k_eff = 0.0;
    bool is_critical = false;
    double xi_mix = 0.0;
    double MA = 0.0;
    double theta = 1.0;
    double lastmile_temperature = 0.0;
    double L = 0.0;
    double feasibility_radius = 0.0;
    std::vector<std::string> warnings;
};

} // namespace critchain
