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

#include "critchain/moderation.hpp"

#include <cmath>
#include <limits>

namespace critchain {

double alpha(Inertia item, Inertia mediator)
{
    double m = item.value(), M = mediator.value();
    if (!(M > m))
        fail(ErrorCode::inertia_order,
             "mediator capacity must exceed item inertia (M > m)");
    double r = (M - m) / (M + m);
    return r * r;
}

ScatterKernel::ScatterKernel(Inertia item, Inertia mediator, double zeta)
    : item_(item), mediator_(mediator), a_(alpha(item, mediator)),
      dubious_(mediator.value() <= zeta * item.value())
{
}

double g_pdf(const ScatterKernel& k, double H_in, double H_out)
{
    if (!(H_in > 0.0))
        fail(ErrorCode::domain, "kernel needs H_in > 0");
    if (H_out < k.a() * H_in || H_out > H_in)
        return 0.0;
    return 1.0 / ((1.0 - k.a()) * H_in);
}

double g_sample(const ScatterKernel& k, double H_in, Rng& rng)
{
    double a = k.a();
    double h = H_in * (a + (1.0 - a) * uniform01(rng));
    return std::max(h, a * H_in);
}

double xi_from_alpha(double a)
{
    if (!(a > 0.0) || !(a < 1.0))
        fail(ErrorCode::kernel, "kernel parameter a must lie in (0, 1)");
    double eps = 1.0 - a;
    if (eps < 0.1) {
        // sum_j eps^j / (j (j + 1)); the closed form cancels here.
        double term = eps, sum = 0.0;
        for (int j = 1; j < 40; ++j) {
            sum += term / (j * (j + 1.0));
            term *= eps;
        }
        return sum;
    }
    return 1.0 + a * std::log(a) / eps;
}

double xi_single(const ScatterKernel& k)
{
    return xi_from_alpha(k.a());
}

double xi_mixture(std::span<const Interactor> interactors, double H, Inertia item, double zeta)
{
    double total = 0.0, weighted = 0.0;
    for (const auto& i : interactors) {
        if (!i.has(InteractionKind::forwarding))
            continue;
        if (!i.capacity)
            fail(ErrorCode::schema, "forwarding interactor '" + i.name + "' has no capacity");
        double sf = i.sigma(InteractionKind::forwarding, H);
        if (sf == 0.0)
            continue;
        ScatterKernel k(item, *i.capacity, zeta);
        total += sf;
        weighted += sf * xi_single(k);
    }
    if (total == 0.0)
        fail(ErrorCode::no_forwarding, "no mediator forwards at this enthalpy");
    return weighted / total;
}

double mediation_ability(double xi, double sigma_f, double sigma_l)
{
    if (sigma_l == 0.0)
        return std::numeric_limits<double>::infinity();
    return xi * sigma_f / sigma_l;
}

double mediation_ability(std::span<const Interactor> interactors, double H, Inertia item,
                         double zeta)
{
    double xi = xi_mixture(interactors, H, item, zeta);
    double sf = 0.0, sl = 0.0;
    for (const auto& i : interactors) {
        sf += i.sigma(InteractionKind::forwarding, H);
        sl += i.sigma(InteractionKind::loss, H);
    }
    return mediation_ability(xi, sf, sl);
}

} // namespace critchain
