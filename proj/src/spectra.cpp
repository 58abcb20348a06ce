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

#include "critchain/spectra.hpp"

#include <cmath>
#include <numbers>

#include "critchain/quadrature.hpp"

namespace critchain {

namespace {

constexpr double two_over_sqrt_pi = std::numbers::inv_sqrtpi * 2.0;

// Regularized P(3/2, x).
double gamma_p_three_halves(double x)
{
    if (x <= 0.0)
        return 0.0;
    if (x < 1.0) {
        // Power series; avoids the cancellation of the erf form near zero.
        double term = 1.0 / 1.5, sum = term;
        for (int n = 1; n < 60 && term > 1e-18 * sum; ++n) {
            term *= x / (1.5 + n);
            sum += term;
        }
        return sum * x * std::sqrt(x) * std::exp(-x) / (0.5 * std::sqrt(std::numbers::pi));
    }
    double r = std::sqrt(x);
    return std::erf(r) - two_over_sqrt_pi * r * std::exp(-x);
}

} // namespace

double mb_pdf(const MBSpectrum& s, double H)
{
    if (!(H >= 0.0))
        fail(ErrorCode::domain, "spectrum evaluated at negative enthalpy");
    double T = s.T.value();
    return two_over_sqrt_pi * std::sqrt(H) / (T * std::sqrt(T)) * std::exp(-H / T);
}

double mb_cdf(const MBSpectrum& s, double H)
{
    if (!(H >= 0.0))
        fail(ErrorCode::domain, "spectrum evaluated at negative enthalpy");
    return gamma_p_three_halves(H / s.T.value());
}

double mb_draw(double T, Rng& rng)
{
    // Gamma(3/2) = Gamma(1) + Gamma(1/2) = Exp(1) + Z^2 / 2.
    double z = standard_normal(rng);
    return T * (-std::log(uniform_open01(rng)) + 0.5 * z * z);
}

double mb_draw_truncated(double T, double H_hi, Rng& rng)
{
    double x_hi = H_hi / T;
    double target = uniform01(rng) * gamma_p_three_halves(x_hi);
    // Safeguarded Newton on P(3/2, x) = target over [0, x_hi].
    double lo = 0.0, hi = x_hi;
    double x = std::min(x_hi, 1.5);
    for (int it = 0; it < 100; ++it) {
        double f = gamma_p_three_halves(x) - target;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        double dens = two_over_sqrt_pi * std::sqrt(x) * std::exp(-x);
        double next = dens > 0.0 ? x - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-14 * std::max(x, 1e-300) || hi - lo <= 1e-15 * hi) {
            x = next;
            break;
        }
        x = next;
    }
    return T * x;
}

std::vector<double> mb_sample(const MBSpectrum& s, std::uint64_t seed, std::size_t n)
{
    if (n < 1)
        fail(ErrorCode::domain, "sample count must be at least 1");
    Rng rng = make_stream(seed, 0);
    std::vector<double> out(n);
    for (auto& h : out)
        h = mb_draw(s.T.value(), rng);
    return out;
}

double total_flow(const MBSpectrum& s, double H_lo, double H_hi)
{
    if (!(H_lo >= 0.0) || !(H_hi > H_lo))
        fail(ErrorCode::domain, "total_flow needs 0 <= H_lo < H_hi");
    double T = s.T.value();
    double hi = std::min(H_hi, mb_truncation * T);
    if (H_lo >= hi)
        return 0.0;
    // With H = r^2 the integrand 2 r pdf(r^2) is smooth at the origin.
    auto f = [&](double r) { return 2.0 * r * mb_pdf(s, r * r); };
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-300;
    return s.w_total * integrate(f, std::sqrt(H_lo), std::sqrt(hi), opt).value;
}

double temperature_multiplier(double sigma_d_at_T, double sigma_l_at_T, double xi,
                              double sigma_f_at_Hbmin)
{
    if (!(sigma_d_at_T >= 0.0) || !(sigma_l_at_T >= 0.0) || !(xi >= 0.0) ||
        !(sigma_f_at_Hbmin >= 0.0))
        fail(ErrorCode::domain, "temperature multiplier inputs must be non-negative");
    double forwarding = xi * sigma_f_at_Hbmin;
    if (forwarding == 0.0)
        fail(ErrorCode::singular_mediator, "last forwarding mediator has xi * Sigma_f = 0");
    return 1.0 + (sigma_d_at_T + sigma_l_at_T) / forwarding;
}

std::vector<SpectrumRow> spectrum_table(const MBSpectrum& s, double H_hi, std::size_t points)
{
    if (points < 2 || !(H_hi > 0.0))
        fail(ErrorCode::domain, "spectrum table needs at least two points and H_hi > 0");
    std::vector<SpectrumRow> rows(points);
    for (std::size_t i = 0; i < points; ++i) {
        double H = H_hi * static_cast<double>(i) / static_cast<double>(points - 1);
        double pdf = mb_pdf(s, H);
        rows[i] = {H, pdf, pdf * s.w_total};
    }
    return rows;
}

} // namespace critchain
