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

#include <cstddef>
#include <string>
#include <vector>

namespace critchain {

/// Coefficients that hold from x_begin up to the next segment (or x_max).
struct DiffusionSegment {
    double x_begin = 0.0;
    double D = 1.0;
    double sigma_d = 0.0;
    double sigma_l = 0.0;

    friend bool operator==(const DiffusionSegment&, const DiffusionSegment&) = default;
};

/// Planar last-mile delivery from a distribution front at x = 0.
struct DiffusionSpec {
    std::vector<DiffusionSegment> segments{DiffusionSegment{}};
    double phi0 = 1.0;
    double feasibility_multiple = 6.0;
    double x_max = 12.0;
    std::size_t grid_n = 1024;

    /// True when every segment has the same diffusion length.
    bool constant() const;
    double length_at(double x) const;

    friend bool operator==(const DiffusionSpec&, const DiffusionSpec&) = default;
};

void validate(const DiffusionSpec& spec);

/// sqrt(D / (Sigma_d + Sigma_l)); +infinity when nothing is removed.
double diffusion_length(double D, double sigma_d, double sigma_l);

struct FluxProfile {
    std::vector<double> x;
    std::vector<double> phi;
    double phi0 = 1.0;
};

/// phi0 * exp(-x / L) on the spec grid. Requires constant coefficients.
FluxProfile flux_profile_analytic(const DiffusionSpec& spec);

/// Second-order finite-difference solution of phi'' = phi / L(x)^2 with
/// phi(0) = phi0 and phi' = -phi / L at x_max.
FluxProfile flux_profile_numeric(const DiffusionSpec& spec);

/// The feasibility multiple clamped to [5, 6]; a note is appended to
/// `warnings` when clamping happens.
double effective_feasibility_multiple(const DiffusionSpec& spec,
                                      std::vector<std::string>* warnings = nullptr);

/// multiple * L for constant coefficients; otherwise the first x where the
/// numeric flux drops below exp(-multiple) * phi0 (+infinity if it never
/// does inside x_max).
double feasibility_radius(const DiffusionSpec& spec,
                          std::vector<std::string>* warnings = nullptr);

} // namespace critchain
