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

#include <cstdint>
#include <vector>

#include "critchain/core.hpp"
#include "critchain/random.hpp"

namespace critchain {

/// Maxwell-Boltzmann enthalpy spectrum of an item flow:
///
///   w(H) / w = 2 pi sqrt(H) / (pi T)^(3/2) * exp(-H / T)
///
/// i.e. a gamma density with shape 3/2 and scale T. Mean 1.5 T, variance
/// 1.5 T^2, mode T / 2.
struct MBSpectrum {
    MarketTemperature T{1.0};
    double w_total = 1.0;
};

/// Integrals of the spectrum are cut at this multiple of T (tail < 1e-16).
inline constexpr double mb_truncation = 40.0;

double mb_pdf(const MBSpectrum& s, double H);

/// Closed-form cumulative distribution (regularized lower incomplete gamma
/// of order 3/2).
double mb_cdf(const MBSpectrum& s, double H);

std::vector<double> mb_sample(const MBSpectrum& s, std::uint64_t seed, std::size_t n);

/// One draw from the full spectrum.
double mb_draw(double T, Rng& rng);

/// One draw from the spectrum truncated to [0, H_hi], by CDF inversion.
double mb_draw_truncated(double T, double H_hi, Rng& rng);

/// w_total times the integral of the pdf over [H_lo, H_hi]. H_hi may be
/// +infinity. Adaptive quadrature in sqrt(H), relative tolerance 1e-9.
double total_flow(const MBSpectrum& s, double H_lo, double H_hi);

/// theta = 1 + (Sigma_d(T) + Sigma_l(T)) / (xi * Sigma_f(H_bmin)).
double temperature_multiplier(double sigma_d_at_T, double sigma_l_at_T, double xi,
                              double sigma_f_at_Hbmin);

struct SpectrumRow {
    double H;
    double pdf;
    double w;
};

/// Plot data on `points` equally spaced enthalpies over [0, H_hi].
std::vector<SpectrumRow> spectrum_table(const MBSpectrum& s, double H_hi, std::size_t points);

} // namespace critchain
