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

#include "critchain/core.hpp"
#include "critchain/random.hpp"

namespace critchain {

inline constexpr double default_isotropy_factor = 4.0;

/// ((M - m) / (M + m))^2: the smallest fraction of its enthalpy an item can
/// keep after one forwarding interaction. Throws inertia_order if M <= m.
double alpha(Inertia item, Inertia mediator);

/// Isotropic forwarding kernel of one mediator type: the outgoing enthalpy
/// is uniform on [a H_in, H_in].
class ScatterKernel {
public:
    ScatterKernel(Inertia item, Inertia mediator, double zeta = default_isotropy_factor);

    double a() const noexcept { return a_; }
    Inertia item() const noexcept { return item_; }
    Inertia mediator() const noexcept { return mediator_; }

    /// True when M <= zeta * m, where a uniform kernel is a poor model.
    bool isotropy_dubious() const noexcept { return dubious_; }

private:
    Inertia item_;
    Inertia mediator_;
    double a_;
    bool dubious_;
};

double g_pdf(const ScatterKernel& k, double H_in, double H_out);
double g_sample(const ScatterKernel& k, double H_in, Rng& rng);

/// Mean lethargy gain per forwarding step, 1 + a ln(a) / (1 - a).
double xi_from_alpha(double a);
double xi_single(const ScatterKernel& k);

/// Mixture moderation parameter at H: the single-mediator xi values weighted
/// by each mediator's share of the forwarding macro-factor. Interactors
/// without a forwarding factor are ignored.
double xi_mixture(std::span<const Interactor> interactors, double H, Inertia item,
                  double zeta = default_isotropy_factor);

/// MA = xi * Sigma_f / Sigma_l; +infinity when Sigma_l is zero.
double mediation_ability(double xi, double sigma_f, double sigma_l);

/// MA of a forwarding stage at H. Losses are summed over every interactor,
/// mediators included.
double mediation_ability(std::span<const Interactor> interactors, double H, Inertia item,
                         double zeta = default_isotropy_factor);

} // namespace critchain
