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

#include "critchain/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "critchain/error.hpp"

namespace critchain {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

const DiffusionSegment& segment_at(const DiffusionSpec& spec, double x)
{
    auto it = std::upper_bound(spec.segments.begin(), spec.segments.end(), x,
                               [](double v, const DiffusionSegment& s) { return v < s.x_begin; });
    return *std::prev(it);
}

double inverse_square_length(const DiffusionSegment& s)
{
    return (s.sigma_d + s.sigma_l) / s.D;
}

std::vector<double> grid(const DiffusionSpec& spec)
{
    std::vector<double> x(spec.grid_n + 1);
    double h = spec.x_max / static_cast<double>(spec.grid_n);
    for (std::size_t i = 0; i <= spec.grid_n; ++i)
        x[i] = h * static_cast<double>(i);
    x.back() = spec.x_max;
    return x;
}

} // namespace

bool DiffusionSpec::constant() const
{
    for (const auto& s : segments)
        if (inverse_square_length(s) != inverse_square_length(segments.front()))
            return false;
    return true;
}

double DiffusionSpec::length_at(double x) const
{
    const auto& s = segment_at(*this, x);
    return diffusion_length(s.D, s.sigma_d, s.sigma_l);
}

void validate(const DiffusionSpec& spec)
{
    if (spec.segments.empty() || spec.segments.front().x_begin != 0.0)
        fail(ErrorCode::schema, "diffusion segments must start at x = 0");
    bool removal = false;
    for (std::size_t i = 0; i < spec.segments.size(); ++i) {
        const auto& s = spec.segments[i];
        if (i > 0 && !(s.x_begin > spec.segments[i - 1].x_begin))
            fail(ErrorCode::schema, "diffusion segments must be strictly increasing in x");
        if (!(s.D > 0.0) || !std::isfinite(s.D))
            fail(ErrorCode::schema, "diffusion constant D must be positive");
        if (!(s.sigma_d >= 0.0) || !(s.sigma_l >= 0.0))
            fail(ErrorCode::schema, "diffusion removal factors must be non-negative");
        removal = removal || s.sigma_d + s.sigma_l > 0.0;
    }
    if (!removal)
        fail(ErrorCode::schema, "diffusion needs Sigma_d + Sigma_l > 0 somewhere");
    if (!(spec.phi0 > 0.0))
        fail(ErrorCode::schema, "front flux phi0 must be positive");
    if (!(spec.x_max > 0.0) || !std::isfinite(spec.x_max))
        fail(ErrorCode::schema, "diffusion x_max must be positive");
    if (spec.grid_n < 16)
        fail(ErrorCode::schema, "diffusion grid_n must be at least 16");
    if (!std::isfinite(spec.feasibility_multiple) || !(spec.feasibility_multiple > 0.0))
        fail(ErrorCode::schema, "feasibility multiple must be positive");
}

double diffusion_length(double D, double sigma_d, double sigma_l)
{
    if (!(D > 0.0))
        fail(ErrorCode::domain, "diffusion constant must be positive");
    if (!(sigma_d >= 0.0) || !(sigma_l >= 0.0))
        fail(ErrorCode::domain, "removal factors must be non-negative");
    double removal = sigma_d + sigma_l;
    if (removal == 0.0)
        return inf;
    return std::sqrt(D / removal);
}

FluxProfile flux_profile_analytic(const DiffusionSpec& spec)
{
    validate(spec);
    if (!spec.constant())
        fail(ErrorCode::domain, "analytic flux profile needs constant coefficients");
    double L = spec.length_at(0.0);
    FluxProfile out;
    out.phi0 = spec.phi0;
    out.x = grid(spec);
    out.phi.resize(out.x.size());
    for (std::size_t i = 0; i < out.x.size(); ++i)
        out.phi[i] = spec.phi0 * std::exp(-out.x[i] / L);
    return out;
}

FluxProfile flux_profile_numeric(const DiffusionSpec& spec)
{
    validate(spec);
    FluxProfile out;
    out.phi0 = spec.phi0;
    out.x = grid(spec);
    const std::size_t n = spec.grid_n;
    const double h = spec.x_max / static_cast<double>(n);

    // q_i = 1 / L(x_i)^2, averaged across a segment boundary sitting on a node.
    std::vector<double> q(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double left = inverse_square_length(segment_at(spec, std::max(0.0, out.x[i] - 0.5 * h)));
        double right = inverse_square_length(segment_at(spec, out.x[i] + 0.5 * h));
        bool on_edge = false;
        for (const auto& s : spec.segments)
            on_edge = on_edge || (s.x_begin > 0.0 && std::abs(s.x_begin - out.x[i]) < 1e-12 * h);
        q[i] = on_edge ? 0.5 * (left + right) : inverse_square_length(segment_at(spec, out.x[i]));
    }

    // Tridiagonal system: sub[i] phi_{i-1} + diag[i] phi_i + sup[i] phi_{i+1} = rhs[i].
    std::vector<double> sub(n + 1, 0.0), diag(n + 1, 0.0), sup(n + 1, 0.0), rhs(n + 1, 0.0);
    diag[0] = 1.0;
    rhs[0] = spec.phi0;
    for (std::size_t i = 1; i < n; ++i) {
        sub[i] = 1.0;
        diag[i] = -(2.0 + h * h * q[i]);
        sup[i] = 1.0;
    }
    // Ghost node from phi'(x_max) = -phi / L_last, central difference.
    double inv_L_last = std::sqrt(inverse_square_length(spec.segments.back()));
    sub[n] = 2.0;
    diag[n] = -(2.0 + 2.0 * h * inv_L_last + h * h * q[n]);

    std::vector<double> c(n + 1), d(n + 1);
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i <= n; ++i) {
        double m = diag[i] - sub[i] * c[i - 1];
        if (m == 0.0 || !std::isfinite(m))
            fail(ErrorCode::numeric, "diffusion solve hit a singular pivot");
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    out.phi.assign(n + 1, 0.0);
    out.phi[n] = d[n];
    for (std::size_t i = n; i-- > 0;)
        out.phi[i] = d[i] - c[i] * out.phi[i + 1];

    double residual = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double r = sub[i] * out.phi[i - 1] + diag[i] * out.phi[i] + sup[i] * out.phi[i + 1];
        residual = std::max(residual, std::abs(r));
    }
    bool finite = std::all_of(out.phi.begin(), out.phi.end(), [](double v) { return std::isfinite(v); });
    if (!finite || residual > 1e-9 * spec.phi0) {
        std::ostringstream os;
        os << "diffusion solve did not converge (max residual " << residual << ")";
        fail(ErrorCode::numeric, os.str());
    }
    return out;
}

double effective_feasibility_multiple(const DiffusionSpec& spec, std::vector<std::string>* warnings)
{
    double m = std::clamp(spec.feasibility_multiple, 5.0, 6.0);
    if (m != spec.feasibility_multiple && warnings) {
        std::ostringstream os;
        os << "feasibility multiple " << spec.feasibility_multiple << " clamped to " << m;
        warnings->push_back(os.str());
    }
    return m;
}

double feasibility_radius(const DiffusionSpec& spec, std::vector<std::string>* warnings)
{
    validate(spec);
    double multiple = effective_feasibility_multiple(spec, warnings);
    if (spec.constant())
        return multiple * spec.length_at(0.0);

    FluxProfile f = flux_profile_numeric(spec);
    double log_cut = -multiple;
    for (std::size_t i = 1; i < f.x.size(); ++i) {
        double l1 = std::log(f.phi[i] / f.phi0);
        if (l1 < log_cut) {
            double l0 = std::log(f.phi[i - 1] / f.phi0);
            double t = (log_cut - l0) / (l1 - l0);
            return f.x[i - 1] + t * (f.x[i] - f.x[i - 1]);
        }
    }
    return inf;
}

} // namespace critchain
