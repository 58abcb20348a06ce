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

#include "critchain/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "critchain/error.hpp"

namespace critchain {

namespace {

// Kronrod nodes on [0, 1]; odd indices are the embedded Gauss nodes.
constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b, double& abs_integral)
{
    double center = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double fc = f(center);
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
        double dx = half * xgk[j];
        double f1 = f(center - dx);
        double f2 = f(center + dx);
        resk += wgk[j] * (f1 + f2);
        resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)
            resg += wg[j / 2] * (f1 + f2);
    }
    Panel p{a, b, resk * half, std::abs((resk - resg) * half)};
    abs_integral = resabs * std::abs(half);
    if (!std::isfinite(p.value))
        fail(ErrorCode::numeric, "non-finite integrand value");
    return p;
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options, std::span<const double> breakpoints)
{
    QuadratureResult result;
    if (a == b)
        return result;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::vector<double> edges{a};
    for (double x : breakpoints)
        if (x > a && x < b)
            edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0, total_abs = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double absint = 0.0;
        Panel p = gk15(f, edges[i], edges[i + 1], absint);
        total += p.value;
        total_err += p.error;
        total_abs += absint;
        heap.push(p);
    }

    auto converged = [&] {
        double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * total_abs;
        double tol = std::max({options.abs_tol, options.rel_tol * std::abs(total), roundoff});
        return total_err <= tol;
    };

    int count = static_cast<int>(heap.size());
    while (!converged()) {
        if (count >= options.max_intervals)
            fail(ErrorCode::numeric, "adaptive quadrature did not converge (estimated error " +
                                         std::to_string(total_err) + ")");
        Panel worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            fail(ErrorCode::numeric, "adaptive quadrature exhausted floating-point resolution");
        double abs_left = 0.0, abs_right = 0.0;
        Panel left = gk15(f, worst.a, mid, abs_left);
        Panel right = gk15(f, mid, worst.b, abs_right);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }

    // Re-sum from the panels so that the reported value does not carry the
    // cancellation from the running updates.
    double sum = 0.0, err = 0.0;
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const auto& p : panels) {
        sum += p.value;
        err += p.error;
    }
    result.value = sign * sum;
    result.error = err;
    result.intervals = count;
    return result;
}

} // namespace critchain
