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

#include "critchain/core.hpp"

#include <algorithm>
#include <sstream>

namespace critchain {

const char* error_code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_attribute: return "invalid-attribute";
    case ErrorCode::domain: return "domain";
    case ErrorCode::singular_chain: return "singular-chain";
    case ErrorCode::singular_mediator: return "singular-mediator";
    case ErrorCode::inertia_order: return "inertia-order";
    case ErrorCode::kernel: return "kernel";
    case ErrorCode::no_forwarding: return "no-forwarding";
    case ErrorCode::degenerate_forwarding: return "degenerate-forwarding";
    case ErrorCode::empty_stage: return "empty-stage";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::kernel_stall: return "kernel-stall";
    case ErrorCode::budget: return "budget";
    case ErrorCode::search_space: return "search-space";
    case ErrorCode::schema: return "schema";
    case ErrorCode::io: return "io";
    }
    return "unknown";
}

bool is_numeric_error(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::singular_chain:
    case ErrorCode::singular_mediator:
    case ErrorCode::degenerate_forwarding:
    case ErrorCode::numeric:
    case ErrorCode::kernel_stall:
        return true;
    default:
        return false;
    }
}

namespace {

std::string str(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace

Enthalpy::Enthalpy(double value) : value_(value), log_(0.0)
{
    if (!(value > 0.0) || !std::isfinite(value))
        fail(ErrorCode::domain, "enthalpy must be positive and finite, got " + str(value));
    log_ = std::log(value);
}

Enthalpy Enthalpy::from_log(double log_value)
{
    if (!std::isfinite(log_value))
        fail(ErrorCode::domain, "enthalpy log must be finite");
    return Enthalpy(std::exp(log_value), log_value);
}

Lethargy::Lethargy(double value) : value_(value)
{
    if (!(value >= 0.0) || !std::isfinite(value))
        fail(ErrorCode::domain, "lethargy must be non-negative, got " + str(value));
}

Inertia::Inertia(double value) : value_(value)
{
    if (!(value > 0.0) || !std::isfinite(value))
        fail(ErrorCode::domain, "inertia must be positive, got " + str(value));
}

MarketTemperature::MarketTemperature(double value) : value_(value)
{
    if (!(value > 0.0) || !std::isfinite(value))
        fail(ErrorCode::domain, "market temperature must be positive, got " + str(value));
}

Enthalpy enthalpy_from_attributes(std::span<const double> attrs)
{
    if (attrs.empty())
        fail(ErrorCode::invalid_attribute, "attribute list is empty");
    double log_sum = 0.0;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        double a = attrs[i];
        if (!(a > 0.0) || !std::isfinite(a))
            fail(ErrorCode::invalid_attribute,
                 "attribute " + std::to_string(i) + " must be positive, got " + str(a));
        log_sum += std::log(a);
    }
    // Exact product whenever it is representable; the log carries the rest.
    double product = 1.0;
    for (double a : attrs)
        product *= a;
    if (std::isfinite(product) && product > 0.0)
        return Enthalpy(product);
    return Enthalpy::from_log(log_sum);
}

Lethargy lethargy(Enthalpy H, Enthalpy H_max)
{
    if (H.log() > H_max.log())
        fail(ErrorCode::domain, "enthalpy above H_max");
    return Lethargy(H_max.log() - H.log());
}

Enthalpy enthalpy_at(Lethargy u, Enthalpy H_max)
{
    if (std::isfinite(H_max.value()))
        return Enthalpy(H_max.value() * std::exp(-u.value()));
    return Enthalpy::from_log(H_max.log() - u.value());
}

// --- SigmaProfile -------------------------------------------------------

namespace {

void check_domain(double lo, double hi)
{
    if (!(lo >= 0.0) || !(hi > lo))
        fail(ErrorCode::domain, "sigma domain must satisfy 0 <= lo < hi");
}

} // namespace

SigmaProfile SigmaProfile::constant(double c, double domain_lo, double domain_hi)
{
    if (!(c >= 0.0) || !std::isfinite(c))
        fail(ErrorCode::domain, "constant sigma must be non-negative");
    check_domain(domain_lo, domain_hi);
    SigmaProfile s;
    s.form_ = Form::constant;
    s.c_ = c;
    s.lo_ = domain_lo;
    s.hi_ = domain_hi;
    return s;
}

SigmaProfile SigmaProfile::power_law(double c, double beta, double domain_lo,
                                     double domain_hi)
{
    if (!(c >= 0.0) || !std::isfinite(c) || !std::isfinite(beta))
        fail(ErrorCode::domain, "power-law sigma needs c >= 0 and finite beta");
    check_domain(domain_lo, domain_hi);
    SigmaProfile s;
    s.form_ = Form::power_law;
    s.c_ = c;
    s.beta_ = beta;
    s.lo_ = domain_lo;
    s.hi_ = domain_hi;
    return s;
}

SigmaProfile SigmaProfile::piecewise(double H_lo, double H_hi, std::vector<double> values)
{
    if (!(H_lo > 0.0) || !(H_hi > H_lo) || !std::isfinite(H_hi))
        fail(ErrorCode::domain, "piecewise sigma needs 0 < H_lo < H_hi");
    if (values.empty())
        fail(ErrorCode::domain, "piecewise sigma needs at least one bin");
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            fail(ErrorCode::domain, "piecewise sigma values must be non-negative");
    SigmaProfile s;
    s.form_ = Form::piecewise;
    s.lo_ = 0.0;
    s.hi_ = H_hi;
    s.grid_lo_ = H_lo;
    s.values_ = std::move(values);
    return s;
}

double SigmaProfile::operator()(double H) const
{
    if (!(H >= lo_) || !(H <= hi_))
        fail(ErrorCode::domain,
             "enthalpy " + str(H) + " outside sigma domain [" + str(lo_) + ", " + str(hi_) + "]");
    switch (form_) {
    case Form::constant:
        return c_;
    case Form::power_law:
        if (H == 0.0) {
            if (beta_ < 0.0)
                fail(ErrorCode::domain, "power-law sigma with negative exponent at H = 0");
            return beta_ == 0.0 ? c_ : 0.0;
        }
        return c_ * std::pow(H, beta_);
    case Form::piecewise: {
        auto n = values_.size();
        if (H <= grid_lo_)
            return values_.front();
        double t = std::log(H / grid_lo_) / std::log(hi_ / grid_lo_);
        auto bin = static_cast<std::size_t>(std::floor(t * static_cast<double>(n)));
        return values_[std::min(bin, n - 1)];
    }
    }
    return 0.0;
}

std::vector<double> SigmaProfile::breakpoints() const
{
    std::vector<double> out;
    if (form_ != Form::piecewise)
        return out;
    auto n = values_.size();
    double span = std::log(hi_ / grid_lo_);
    for (std::size_t i = 1; i < n; ++i)
        if (values_[i] != values_[i - 1])
            out.push_back(grid_lo_ * std::exp(span * static_cast<double>(i) / static_cast<double>(n)));
    return out;
}

double SigmaProfile::max_on(double lo, double hi) const
{
    switch (form_) {
    case Form::constant:
        return c_;
    case Form::power_law:
        if (beta_ < 0.0 && lo <= 0.0)
            return std::numeric_limits<double>::infinity();
        return std::max((*this)(std::max(lo, lo_)), (*this)(std::min(hi, hi_)));
    case Form::piecewise: {
        double m = 0.0;
        auto n = values_.size();
        double span = std::log(hi_ / grid_lo_);
        for (std::size_t i = 0; i < n; ++i) {
            double a = i == 0 ? 0.0 : grid_lo_ * std::exp(span * double(i) / double(n));
            double b = grid_lo_ * std::exp(span * double(i + 1) / double(n));
            if (b >= lo && a <= hi)
                m = std::max(m, values_[i]);
        }
        return m;
    }
    }
    return 0.0;
}

SigmaProfile SigmaProfile::scaled(double factor) const
{
    SigmaProfile s = *this;
    s.c_ *= factor;
    for (double& v : s.values_)
        v *= factor;
    return s;
}

double macro_factor_value(const MacroFactor& mf, Enthalpy H)
{
    return mf(H.value());
}

double interaction_rate(const MacroFactor& mf, double flow, Enthalpy H)
{
    if (!(flow >= 0.0))
        fail(ErrorCode::domain, "flow must be non-negative");
    return mf(H.value()) * flow;
}

// --- Interactors and stages ---------------------------------------------

const char* to_string(InteractionKind kind) noexcept
{
    switch (kind) {
    case InteractionKind::entry: return "entry";
    case InteractionKind::forwarding: return "forwarding";
    case InteractionKind::delivery: return "delivery";
    case InteractionKind::loss: return "loss";
    }
    return "?";
}

const char* to_string(Role role) noexcept
{
    switch (role) {
    case Role::receptor: return "receptor";
    case Role::mediator: return "mediator";
    case Role::courier: return "courier";
    case Role::absorber: return "absorber";
    }
    return "?";
}

const char* to_string(StageKind kind) noexcept
{
    switch (kind) {
    case StageKind::entry: return "entry";
    case StageKind::forwarding: return "forwarding";
    case StageKind::lastmile: return "lastmile";
    }
    return "?";
}

double Interactor::sigma(InteractionKind kind, double H) const
{
    auto it = factors.find(kind);
    return it == factors.end() ? 0.0 : it->second(H);
}

Interactor Interactor::replicated(double copies) const
{
    Interactor out = *this;
    for (auto& [kind, mf] : out.factors)
        mf.count *= copies;
    return out;
}

void validate(const Interactor& interactor)
{
    if (interactor.role == Role::mediator && !interactor.capacity)
        fail(ErrorCode::schema, "mediator '" + interactor.name + "' has no capacity");
    if (!(interactor.cost >= 0.0))
        fail(ErrorCode::schema, "interactor '" + interactor.name + "' has negative cost");
    for (const auto& [kind, mf] : interactor.factors)
        if (!(mf.count >= 0.0) || !std::isfinite(mf.count))
            fail(ErrorCode::schema, "interactor '" + interactor.name + "' has invalid count");
}

double StageSpec::total(InteractionKind kind, double H) const
{
    double sum = 0.0;
    for (const auto& i : interactors)
        sum += i.sigma(kind, H);
    return sum;
}

std::vector<double> StageSpec::breakpoints(std::initializer_list<InteractionKind> kinds) const
{
    std::vector<double> out;
    for (const auto& i : interactors)
        for (auto kind : kinds) {
            auto it = i.factors.find(kind);
            if (it == i.factors.end())
                continue;
            auto bp = it->second.sigma.breakpoints();
            out.insert(out.end(), bp.begin(), bp.end());
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void validate(const StageSpec& stage)
{
    if (!(stage.H_lo < stage.H_hi))
        fail(ErrorCode::schema, std::string(to_string(stage.stage)) + " stage window must satisfy H_lo < H_hi");
    bool active = false;
    for (const auto& i : stage.interactors) {
        validate(i);
        active = active || i.role != Role::absorber;
    }
    if (!active)
        fail(ErrorCode::empty_stage,
             std::string(to_string(stage.stage)) + " stage has no non-absorber interactor");
}

CriticalityResult criticality(double P_e, double p, double P_c, double k, double tolerance)
{
    for (double prob : {P_e, p, P_c})
        if (!(prob >= 0.0 && prob <= 1.0))
            fail(ErrorCode::domain, "escape probability outside [0, 1]");
    if (!(k >= 0.0))
        fail(ErrorCode::domain, "k must be non-negative");
    double denom = P_e * p * P_c;
    if (denom == 0.0)
        fail(ErrorCode::singular_chain, "an escape probability is zero");
    CriticalityResult r;
    r.k_eff = k / denom;
    r.is_critical = std::abs(r.k_eff - 1.0) <= tolerance;
    return r;
}

} // namespace critchain
