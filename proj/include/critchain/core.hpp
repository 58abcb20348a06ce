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

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critchain/error.hpp"

namespace critchain {

/// Scalar item difficulty: product of the item's attributes (distance,
/// weight, volume, ...). Stored together with its natural logarithm so that
/// products of very large attributes stay representable.
class Enthalpy {
public:
    explicit Enthalpy(double value);

    static Enthalpy from_log(double log_value);

    /// May be +inf when the enthalpy only exists in the log domain.
    double value() const noexcept { return value_; }
    double log() const noexcept { return log_; }

private:
    Enthalpy(double value, double log_value) : value_(value), log_(log_value) {}

    double value_;
    double log_;
};

/// ln(H_max / H); zero at chain entry, growing towards delivery.
class Lethargy {
public:
    explicit Lethargy(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

class Inertia {
public:
    explicit Inertia(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

class MarketTemperature {
public:
    explicit MarketTemperature(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

Enthalpy enthalpy_from_attributes(std::span<const double> attrs);

Lethargy lethargy(Enthalpy H, Enthalpy H_max);
Enthalpy enthalpy_at(Lethargy u, Enthalpy H_max);

/// Enthalpy-dependent significance micro-factor sigma(H).
///
/// Three forms are supported: a constant, a power law c*H^beta, and
/// piecewise-constant values on log-spaced bins between H_lo and H_hi. The
/// first piecewise bin also covers (0, H_lo) so that last-mile windows
/// starting at zero enthalpy can be integrated.
class SigmaProfile {
public:
    enum class Form { constant, power_law, piecewise };

    static constexpr double unbounded = std::numeric_limits<double>::infinity();

    static SigmaProfile constant(double c, double domain_lo = 0.0,
                                 double domain_hi = unbounded);
    static SigmaProfile power_law(double c, double beta, double domain_lo = 0.0,
                                  double domain_hi = unbounded);
    static SigmaProfile piecewise(double H_lo, double H_hi, std::vector<double> values);

    /// Throws ErrorCode::domain outside [domain_lo, domain_hi].
    double operator()(double H) const;

    Form form() const noexcept { return form_; }
    double c() const noexcept { return c_; }
    double beta() const noexcept { return beta_; }
    double domain_lo() const noexcept { return lo_; }
    double domain_hi() const noexcept { return hi_; }
    /// Piecewise form only: lower edge of the log-spaced grid.
    double grid_lo() const noexcept { return grid_lo_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Interior points where the profile is discontinuous.
    std::vector<double> breakpoints() const;

    /// Largest value on [lo, hi], used to bound rejection samplers.
    double max_on(double lo, double hi) const;

    SigmaProfile scaled(double factor) const;

    friend bool operator==(const SigmaProfile&, const SigmaProfile&) = default;

private:
    SigmaProfile() = default;

    Form form_ = Form::constant;
    double c_ = 0.0;
    double beta_ = 0.0;
    double lo_ = 0.0;
    double hi_ = unbounded;
    double grid_lo_ = 0.0;
    std::vector<double> values_;
};

/// Sigma(H) = sigma(H) * N, with N the interactors available per unit time.
struct MacroFactor {
    SigmaProfile sigma;
    double count = 1.0;

    double operator()(double H) const { return sigma(H) * count; }

    friend bool operator==(const MacroFactor&, const MacroFactor&) = default;
};

double macro_factor_value(const MacroFactor& mf, Enthalpy H);

/// IR(H) = Sigma(H) * w. Throws on negative flow.
double interaction_rate(const MacroFactor& mf, double flow, Enthalpy H);

enum class InteractionKind { entry, forwarding, delivery, loss };

enum class Role { receptor, mediator, courier, absorber };

const char* to_string(InteractionKind kind) noexcept;
const char* to_string(Role role) noexcept;

struct Interactor {
    std::string name;
    Role role = Role::absorber;
    std::map<InteractionKind, MacroFactor> factors;
    std::optional<Inertia> capacity; // required for mediators
    double cost = 0.0;

    /// Sigma of the given kind at H, zero when the interactor lacks it.
    double sigma(InteractionKind kind, double H) const;
    bool has(InteractionKind kind) const { return factors.count(kind) != 0; }

    /// Copy with every factor count multiplied by `copies`.
    Interactor replicated(double copies) const;
};

void validate(const Interactor& interactor);

enum class StageKind { entry, forwarding, lastmile };

const char* to_string(StageKind kind) noexcept;

struct StageSpec {
    StageKind stage = StageKind::entry;
    std::vector<Interactor> interactors;
    double H_lo = 0.0;
    double H_hi = 0.0;

    /// Sum of the given kind over all interactors of the stage. Multiple
    /// interactors of a kind act additively.
    double total(InteractionKind kind, double H) const;

    /// Union of the breakpoints of every profile of the given kinds.
    std::vector<double> breakpoints(std::initializer_list<InteractionKind> kinds) const;
};

void validate(const StageSpec& stage);

struct CriticalityResult {
    double k_eff = 0.0;
    bool is_critical = false;
};

inline constexpr double default_tolerance = 1e-9;

/// k_eff = k / (P_e * p * P_c).
CriticalityResult criticality(double P_e, double p, double P_c, double k,
                              double tolerance = default_tolerance);

} // namespace critchain
