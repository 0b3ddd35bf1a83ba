#pragma once

// Simultaneous polynomial root finding (Aberth-Ehrlich) with Newton-polygon
// starting points. The polynomial enters only through its Newton ratio
// p(z)/p'(z), so callers can evaluate by recurrence instead of coefficients.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "upoly.hpp"

namespace cubicpcf {

using Complex = std::complex<double>;

struct AberthOptions {
    int max_iterations = 2000;
    double relative_step = 4 * std::numeric_limits<double>::epsilon();
};

struct AberthResult {
    std::vector<Complex> roots;
    std::vector<bool> converged;
    int iterations = 0;
};

/// Starting points for a degree-d polynomial given log|c_i| (lowest degree
/// first, -inf for zero coefficients): one circle per upper-hull edge of the
/// Newton polygon, with as many points as the edge is wide.
inline std::vector<Complex> newton_polygon_start(const std::vector<double>& log_abs) {
    const int d = static_cast<int>(log_abs.size()) - 1;
    std::vector<Complex> pts;
    if (d <= 0) return pts;
    int low = 0;
    while (low < d && !std::isfinite(log_abs[low])) ++low;
    std::vector<int> hull;
    for (int i = low; i <= d; ++i) {
        if (!std::isfinite(log_abs[i])) continue;
        while (hull.size() >= 2) {
            const int i1 = hull[hull.size() - 2], i2 = hull.back();
            // drop i2 if it lies on or below the chord i1 -> i
            const double cross = (i2 - i1) * (log_abs[i] - log_abs[i1]) - (i - i1) * (log_abs[i2] - log_abs[i1]);
            if (cross >= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    double smallest = std::numeric_limits<double>::infinity();
    const double sigma = 0.7;
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        const int i = hull[e], j = hull[e + 1];
        const double r = std::exp((log_abs[i] - log_abs[j]) / (j - i));
        smallest = std::min(smallest, r);
        for (int k = 0; k < j - i; ++k) {
            const double theta = 2 * std::numbers::pi * k / (j - i) + 2 * std::numbers::pi * i / d + sigma;
            pts.push_back(std::polar(r, theta));
        }
    }
    // roots at the origin
    if (!std::isfinite(smallest)) smallest = 1.0;
    for (int k = 0; k < low; ++k) pts.push_back(std::polar(smallest * 1e-3, 2 * std::numbers::pi * k / low + sigma));
    return pts;
}

/// Gauss-Seidel Aberth iteration. `ratio(z)` returns p(z)/p'(z).
template <class NewtonRatio>
AberthResult aberth(std::vector<Complex> z, NewtonRatio&& ratio, const AberthOptions& opt = {}) {
    const std::size_t n = z.size();
    AberthResult res;
    res.converged.assign(n, false);
    std::size_t active = n;
    int it = 0;
    for (; it < opt.max_iterations && active > 0; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            if (res.converged[i]) continue;
            const Complex nr = ratio(z[i]);
            if (nr == Complex(0)) {
                res.converged[i] = true;
                --active;
                continue;
            }
            // sum of 1/(z_i - z_j), written out to avoid the checked complex division
            double sr = 0, si = 0;
            const double xr = z[i].real(), xi = z[i].imag();
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double dr = xr - z[j].real(), di = xi - z[j].imag();
                double nn = dr * dr + di * di;
                if (nn == 0) {
                    dr = di = 1e-150;
                    nn = 2e-300;
                }
                const double inv = 1.0 / nn;
                sr += dr * inv;
                si -= di * inv;
            }
            const Complex sum(sr, si);
            Complex w = nr / (1.0 - nr * sum);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) w = nr;
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
            z[i] -= w;
            if (std::abs(w) <= opt.relative_step * std::max(std::abs(z[i]), 1e-300)) {
                res.converged[i] = true;
                --active;
            }
        }
    }
    res.roots = std::move(z);
    res.iterations = it;
    return res;
}

/// Newton ratio of a coefficient polynomial (lowest degree first); uses the
/// reversed polynomial outside the unit disk to stay in range.
inline Complex coefficient_newton_ratio(const std::vector<Complex>& c, Complex z) {
    const int d = static_cast<int>(c.size()) - 1;
    if (std::abs(z) <= 1.0) {
        Complex p = 0, dp = 0;
        for (int i = d; i >= 0; --i) {
            dp = dp * z + p;
            p = p * z + c[i];
        }
        return p / dp;
    }
    const Complex w = 1.0 / z;
    Complex q = 0, dq = 0;  // q(w) = sum c_i w^{d-i}
    for (int i = 0; i <= d; ++i) {
        dq = dq * w + q;
        q = q * w + c[i];
    }
    // p'/p = d/z - w^2 q'(w)/q(w)
    const Complex log_deriv = double(d) * w - w * w * dq / q;
    return 1.0 / log_deriv;
}

/// All complex roots (with multiplicity) of an exact polynomial.
inline AberthResult polynomial_roots(const UniPoly& p, const AberthOptions& opt = {}) {
    AberthResult res;
    if (p.degree() <= 0) return res;
    auto [coeffs, scale] = p.scaled_complex_coeffs();
    (void)scale;
    auto start = newton_polygon_start(p.log_abs_coeffs());
    res = aberth(std::move(start), [&](Complex z) { return coefficient_newton_ratio(coeffs, z); }, opt);
    // a few Newton polishing steps
    for (auto& r : res.roots)
        for (int k = 0; k < 3; ++k) {
            const Complex step = coefficient_newton_ratio(coeffs, r);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            r -= step;
        }
    return res;
}

/// Greedy nearest-neighbour pairing; returns the largest paired distance
/// (infinity when the sizes differ).
inline double pairing_distance(std::vector<Complex> x, std::vector<Complex> y) {
    if (x.size() != y.size()) return std::numeric_limits<double>::infinity();
    double worst = 0;
    std::vector<bool> used(y.size(), false);
    for (const auto& p : x) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (!used[j] && std::abs(p - y[j]) < best) {
                best = std::abs(p - y[j]);
                bi = j;
            }
        used[bi] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace cubicpcf
