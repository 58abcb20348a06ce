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

#include <functional>
#include <span>

namespace critchain {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 4000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of f over [a, b].
/// The interval is split at `breakpoints` (those inside (a, b)) before any
/// refinement so that known discontinuities never sit inside a panel.
/// Throws ErrorCode::numeric when the tolerance cannot be met.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {},
                           std::span<const double> breakpoints = {});

} // namespace critchain
