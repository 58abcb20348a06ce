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

#include "critchain/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "critchain/quadrature.hpp"

namespace critchain {

namespace {

constexpr double transport_rel_tol = 1e-12;

std::string at_str(double H)
{
    std::ostringstream os;
    os.precision(10);
    os << " at H = " << H;
    return os.str();
}

} // namespace

ForwardingModel::ForwardingModel(const StageSpec& stage, Inertia item, double zeta)
    : stage_(stage)
{
    for (std::size_t i = 0; i < stage_.interactors.size(); ++i) {
        const auto& it = stage_.interactors[i];
        if (!it.has(InteractionKind::forwarding))
            continue;
        if (!it.capacity)
            fail(ErrorCode::schema, "forwarding interactor '" + it.name + "' has no capacity");
        ScatterKernel k(item, *it.capacity, zeta);
        mediators_.push_back(i);
        alphas_.push_back(k.a());
        xis_.push_back(xi_single(k));
    }
    if (mediators_.empty())
        fail(ErrorCode::no_forwarding, "forwarding stage has no mediator");
}

double ForwardingModel::sigma_f(double H) const
{
    double s = 0.0;
    for (auto i : mediators_)
        s += stage_.interactors[i].sigma(InteractionKind::forwarding, H);
    return s;
}

double ForwardingModel::sigma_l(double H) const
{
    return stage_.total(InteractionKind::loss, H);
}

void ForwardingModel::mediator_weights(double H, std::vector<double>& out) const
{
    out.resize(mediators_.size());
    for (std::size_t j = 0; j < mediators_.size(); ++j)
        out[j] = stage_.interactors[mediators_[j]].sigma(InteractionKind::forwarding, H);
}

ForwardingModel::Point ForwardingModel::at(double H) const
{
    Point p{0.0, sigma_l(H), 0.0};
    double weighted = 0.0;
    for (std::size_t j = 0; j < mediators_.size(); ++j) {
        double sf = stage_.interactors[mediators_[j]].sigma(InteractionKind::forwarding, H);
        p.sigma_f += sf;
        weighted += sf * xis_[j];
    }
    if (p.sigma_f == 0.0)
        fail(ErrorCode::no_forwarding, "no mediator forwards" + at_str(H));
    p.xi = weighted / p.sigma_f;
    return p;
}

double entry_escape(std::span<const Interactor> interactors, double H_max)
{
    double se = 0.0, sl = 0.0;
    for (const auto& i : interactors) {
        se += i.sigma(InteractionKind::entry, H_max);
        sl += i.sigma(InteractionKind::loss, H_max);
    }
    if (se + sl == 0.0)
        fail(ErrorCode::empty_stage, "entry stage has no entry or loss interaction");
    return se / (se + sl);
}

namespace {

// Integral of the forwarding loss density over [ln H_lo, ln H_hi].
double forwarding_loss_integral(const ForwardingModel& model, double H_lo, double H_hi)
{
    if (H_lo >= H_hi)
        return 0.0;
    auto f = [&](double u) {
        double H = std::exp(u);
        double sl = model.sigma_l(H);
        double sf = model.sigma_f(H);
        if (sf + sl == 0.0)
            fail(ErrorCode::degenerate_forwarding, "Sigma_f + Sigma_l = 0" + at_str(H));
        if (sl == 0.0)
            return 0.0;
        if (sf == 0.0)
            fail(ErrorCode::degenerate_forwarding, "xi = 0 (no forwarding)" + at_str(H));
        auto pt = model.at(H);
        return pt.sigma_l / (pt.xi * (pt.sigma_f + pt.sigma_l));
    };
    auto bps = model.stage().breakpoints({InteractionKind::forwarding, InteractionKind::loss});
    for (double& b : bps)
        b = std::log(b);
    QuadratureOptions opt;
    opt.rel_tol = transport_rel_tol;
    return integrate(f, std::log(H_lo), std::log(H_hi), opt, bps).value;
}

ForwardingModel forwarding_model(const ChainSpec& chain)
{
    return ForwardingModel(chain.forwarding, chain.item_inertia, chain.isotropy_factor);
}

} // namespace

double forwarding_escape_to(const ChainSpec& chain, double H)
{
    if (!(H >= chain.H_c()) || !(H <= chain.H_max()))
        fail(ErrorCode::domain, "forwarding escape needs H_c <= H <= H_max");
    auto model = forwarding_model(chain);
    return std::exp(-forwarding_loss_integral(model, H, chain.H_max()));
}

double forwarding_escape(const ChainSpec& chain)
{
    return forwarding_escape_to(chain, chain.H_c());
}

EscapeProfile escape_profile(const ChainSpec& chain, std::size_t n_steps)
{
    if (n_steps < 2)
        fail(ErrorCode::domain, "escape profile needs at least two steps");
    auto model = forwarding_model(chain);
    double H_max = chain.H_max(), H_c = chain.H_c();
    double span = std::log(H_max / H_c);

    std::vector<double> H(n_steps);
    for (std::size_t i = 0; i < n_steps; ++i)
        H[i] = H_max * std::exp(-span * static_cast<double>(i) / static_cast<double>(n_steps - 1));
    H.front() = H_max;
    H.back() = H_c;

    // Segments are independent; ln p is their running sum.
    std::vector<double> segment(n_steps, 0.0);
    for (std::size_t i = 1; i < n_steps; ++i)
        segment[i] = forwarding_loss_integral(model, H[i], H[i - 1]);

    EscapeProfile out;
    out.points.reserve(n_steps);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        cumulative += segment[i];
        double u = std::log(H_max) - std::log(H[i]);
        out.points.push_back({H[i], i == 0 ? 0.0 : u, std::exp(-cumulative),
                              i == 0 ? 0.0 : -std::expm1(-segment[i])});
    }
    return out;
}

double temperature_multiplier(const ChainSpec& chain)
{
    double T = chain.lastmile_temperature.value();
    double sd = chain.lastmile.total(InteractionKind::delivery, T);
    double sl = chain.lastmile.total(InteractionKind::loss, T);
    auto model = forwarding_model(chain);
    double H_c = chain.H_c();
    if (model.sigma_f(H_c) == 0.0)
        fail(ErrorCode::singular_mediator, "no forwarding at H_c; theta is undefined");
    auto pt = model.at(H_c);
    return temperature_multiplier(sd, sl, pt.xi, pt.sigma_f);
}

MBSpectrum lastmile_spectrum(const ChainSpec& chain)
{
    double theta = temperature_multiplier(chain);
    return MBSpectrum{MarketTemperature(theta * chain.lastmile_temperature.value()),
                      chain.total_flow};
}

double lastmile_escape(std::span<const Interactor> interactors, double H_c,
                       const MBSpectrum& spectrum, LastMileMode mode)
{
    if (!(H_c > 0.0))
        fail(ErrorCode::domain, "last-mile window needs H_c > 0");
    auto total = [&](InteractionKind kind, double H) {
        double s = 0.0;
        for (const auto& i : interactors)
            s += i.sigma(kind, H);
        return s;
    };
    std::vector<double> bps;
    for (const auto& i : interactors)
        for (const auto& [kind, mf] : i.factors)
            for (double b : mf.sigma.breakpoints())
                bps.push_back(std::sqrt(b));
    std::sort(bps.begin(), bps.end());

    // Unit-flow density in r = sqrt(H); the total flow cancels in the ratio.
    MBSpectrum unit{spectrum.T, 1.0};
    auto weight = [&](double r) { return 2.0 * r * mb_pdf(unit, r * r); };
    QuadratureOptions opt;
    opt.rel_tol = transport_rel_tol;
    opt.abs_tol = 1e-300;
    double r_hi = std::sqrt(H_c);

    double num = 0.0, den = 0.0;
    if (mode == LastMileMode::rate_ratio) {
        num = integrate([&](double r) { return total(InteractionKind::delivery, r * r) * weight(r); },
                        0.0, r_hi, opt, bps).value;
        den = num + integrate([&](double r) { return total(InteractionKind::loss, r * r) * weight(r); },
                              0.0, r_hi, opt, bps).value;
    } else {
        num = integrate(
                  [&](double r) {
                      double H = r * r;
                      double sd = total(InteractionKind::delivery, H);
                      double sl = total(InteractionKind::loss, H);
                      if (sd + sl == 0.0)
                          fail(ErrorCode::empty_stage, "last mile has no interaction" + at_str(H));
                      return sd / (sd + sl) * weight(r);
                  },
                  0.0, r_hi, opt, bps).value;
        den = integrate(weight, 0.0, r_hi, opt).value;
    }
    if (den == 0.0)
        fail(ErrorCode::empty_stage, "last mile has no delivery or loss interaction");
    return std::clamp(num / den, 0.0, 1.0);
}

double lastmile_escape(const ChainSpec& chain)
{
    return lastmile_escape(chain.lastmile.interactors, chain.H_c(), lastmile_spectrum(chain),
                           chain.lastmile_mode);
}

ChainReport analyze(const ChainSpec& chain)
{
    validate(chain);
    ChainReport r;
    r.warnings = chain_warnings(chain);
    double H_max = chain.H_max();
    r.P_e = entry_escape(chain.entry.interactors, H_max);
    r.p = forwarding_escape(chain);
    r.theta = temperature_multiplier(chain);
    r.lastmile_temperature = r.theta * chain.lastmile_temperature.value();
    r.P_c = lastmile_escape(chain);
    r.k = r.P_e * r.p * r.P_c;
    auto crit = criticality(r.P_e, r.p, r.P_c, r.k);
    r.k_eff = crit.k_eff;
    r.is_critical = crit.is_critical;
    r.xi_mix = xi_mixture(chain.forwarding.interactors, H_max, chain.item_inertia,
                          chain.isotropy_factor);
    r.MA = mediation_ability(chain.forwarding.interactors, H_max, chain.item_inertia,
                             chain.isotropy_factor);
    r.L = chain.diffusion.length_at(0.0);
    r.feasibility_radius = feasibility_radius(chain.diffusion);
    return r;
}

} // namespace critchain
