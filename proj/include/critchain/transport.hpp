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

#include <span>
#include <vector>

#include "critchain/chain.hpp"
#include "critchain/spectra.hpp"

namespace critchain {

/// Forwarding-stage evaluator with the per-mediator xi values precomputed.
class ForwardingModel {
public:
    ForwardingModel(const StageSpec& stage, Inertia item, double zeta = default_isotropy_factor);

    struct Point {
        double sigma_f;
        double sigma_l;
        double xi;
    };

    /// Throws no_forwarding when no mediator forwards at H.
    Point at(double H) const;

    double sigma_f(double H) const;
    double sigma_l(double H) const;

    /// Forwarding macro-factor of every mediator at H, in stage order; used
    /// to pick the mediator of a sampled interaction.
    void mediator_weights(double H, std::vector<double>& out) const;

    std::span<const double> mediator_alphas() const { return alphas_; }
    std::span<const double> mediator_xis() const { return xis_; }

    const StageSpec& stage() const { return stage_; }

private:
    StageSpec stage_;
    std::vector<std::size_t> mediators_; // indices into stage_.interactors
    std::vector<double> alphas_;
    std::vector<double> xis_;
};

/// Entry branching ratio at H_max, sum(Sigma_e) / (sum(Sigma_e) + sum(Sigma_l)).
double entry_escape(std::span<const Interactor> interactors, double H_max);

/// p(H) = exp(-integral_H^H_max Sigma_l / (xi (Sigma_f + Sigma_l)) dH'/H').
double forwarding_escape_to(const ChainSpec& chain, double H);
double forwarding_escape(const ChainSpec& chain);

struct EscapePoint {
    double H;
    double lethargy;
    double p;
    double step_loss_share; // 1 - p(H_i) / p(H_{i-1}); zero at the first point
};

struct EscapeProfile {
    std::vector<EscapePoint> points;
};

/// p(H) on n_steps log-spaced enthalpies from H_max down to H_c.
EscapeProfile escape_profile(const ChainSpec& chain, std::size_t n_steps);

/// theta for the chain: last-mile factors at T, forwarding xi * Sigma_f at H_c.
double temperature_multiplier(const ChainSpec& chain);

/// Spectrum of items in the last mile (temperature theta * T).
MBSpectrum lastmile_spectrum(const ChainSpec& chain);

double lastmile_escape(std::span<const Interactor> couriers_and_absorbers, double H_c,
                       const MBSpectrum& spectrum, LastMileMode mode);
double lastmile_escape(const ChainSpec& chain);

ChainReport analyze(const ChainSpec& chain);

} // namespace critchain
