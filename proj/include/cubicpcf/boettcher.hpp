#pragma once

// Formal Boettcher coordinate Phi(z) = z + sum alpha_i z^{-i} of the cubic
// family near infinity, its powers, numeric evaluation, and the leading
// coefficient ratios of critical orbits at punctures.

#include <cmath>
#include <complex>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bivar_poly.hpp"
#include "heights.hpp"
#include "laurent.hpp"

namespace cubicpcf {

inline constexpr int kMaxBoettcherOrder = 48;

namespace detail {

// Power series in w with coefficients in Q[a, b], truncated after w^order.
using WSeries = std::vector<BivarPoly>;

inline WSeries w_mul(const WSeries& x, const WSeries& y, std::size_t len) {
    WSeries out(len);
    for (std::size_t i = 0; i < x.size() && i < len; ++i) {
        if (x[i].is_zero()) continue;
        for (std::size_t j = 0; j < y.size() && i + j < len; ++j)
            if (!y[j].is_zero()) out[i + j] += x[i] * y[j];
    }
    return out;
}

}  // namespace detail

struct BoettcherExpansion {
    int order = 0;
    std::vector<BivarPoly> alpha;  ///< alpha[i - 1] = alpha_i

    /// Coefficients u_0, ..., u_{order+1} of U(w) with Phi(z) = z U(1/z).
    std::vector<BivarPoly> u_coeffs() const {
        std::vector<BivarPoly> u(order + 2);
        u[0] = Rational(1);
        for (int i = 1; i <= order; ++i) u[i + 1] = alpha[i - 1];
        return u;
    }

    void write(std::ostream& os) const {
        os << "# boettcher order " << order << "\n";
        for (int i = 1; i <= order; ++i) {
            os << "alpha " << i << "\n";
            alpha[i - 1].write(os);
        }
    }

    static BoettcherExpansion read(std::istream& is) {
        BoettcherExpansion e;
        std::string line, chunk;
        int expected = 1;
        bool in_block = false;
        auto flush = [&] {
            if (in_block) e.alpha.push_back(BivarPoly::from_text(chunk));
            chunk.clear();
        };
        while (std::getline(is, line)) {
            if (line.rfind("alpha ", 0) == 0) {
                flush();
                if (line != "alpha " + std::to_string(expected))
                    throw UsageError("boettcher file: expected 'alpha " + std::to_string(expected) + "'");
                ++expected;
                in_block = true;
                continue;
            }
            if (!in_block) {
                if (!line.empty() && line[0] != '#') throw UsageError("boettcher file: data before first alpha header");
                continue;
            }
            chunk += line + "\n";
        }
        flush();
        e.order = static_cast<int>(e.alpha.size());
        return e;
    }
};

/// alpha_1..alpha_N from V(w) U(w^3 / V(w)) = U(w)^3 with V = 1 - 3a^2 w^2 + b w^3,
/// solved one power of w at a time.
inline BoettcherExpansion boettcher_coeffs(int N) {
    if (N < 1) throw UsageError("boettcher_coeffs: N must be >= 1");
    if (N > kMaxBoettcherOrder)
        throw BudgetExceeded("boettcher_coeffs: N = " + std::to_string(N) + " exceeds the order limit " +
                             std::to_string(kMaxBoettcherOrder));
    const std::size_t len = static_cast<std::size_t>(N) + 2;  // w^0 .. w^{N+1}
    detail::WSeries V(len);
    V[0] = Rational(1);
    if (len > 2) V[2] = BivarPoly::monomial(-3, 2, 0);
    if (len > 3) V[3] = BivarPoly::b();
    // 1/V: inv[k] = 3a^2 inv[k-2] - b inv[k-3]
    detail::WSeries vinv(len);
    vinv[0] = Rational(1);
    for (std::size_t k = 1; k < len; ++k) {
        if (k >= 2) vinv[k] += BivarPoly::monomial(3, 2, 0) * vinv[k - 2];
        if (k >= 3) vinv[k] -= BivarPoly::b() * vinv[k - 3];
    }
    std::vector<detail::WSeries> vpow{detail::WSeries{Rational(1)}};  // V^{-i}

    std::vector<BivarPoly> u(len), sq(len);  // U and U^2
    u[0] = Rational(1);
    sq[0] = Rational(1);
    BoettcherExpansion e;
    e.order = N;
    for (int k = 1; k <= N; ++k) {
        const std::size_t m = static_cast<std::size_t>(k) + 1;
        // [w^m] of V + sum_i alpha_i w^{3i+3} V^{-i}
        BivarPoly t = V[m];
        for (int i = 1; 3 * i + 3 <= static_cast<int>(m); ++i) {
            while (static_cast<int>(vpow.size()) <= i) vpow.push_back(detail::w_mul(vpow.back(), vinv, len));
            const std::size_t off = m - (3 * i + 3);
            if (off < vpow[i].size()) t += e.alpha[i - 1] * vpow[i][off];
        }
        // [w^m] U^3 = 3 alpha_k + sq'[m] + sum_{i=1..k} u_i sq[m-i]
        BivarPoly sq_rest;
        for (std::size_t i = 1; i < m; ++i) sq_rest += u[i] * u[m - i];
        BivarPoly cube_rest = sq_rest;
        for (std::size_t i = 1; i < m; ++i) cube_rest += u[i] * sq[m - i];
        const BivarPoly alpha_k = (t - cube_rest) * Rational(1, 3);
        e.alpha.push_back(alpha_k);
        u[m] = alpha_k;
        sq[m] = sq_rest + alpha_k * Rational(2);
    }
    return e;
}

/// Lowest power of w at which V U(w^3/V) - U^3 has a nonzero coefficient,
/// or nullopt if none up to w^{N+1}.
inline std::optional<int> functional_equation_residual(const BoettcherExpansion& e) {
    const std::size_t len = static_cast<std::size_t>(e.order) + 2;
    const auto u = e.u_coeffs();
    const detail::WSeries U(u.begin(), u.end());
    detail::WSeries V(len), vinv(len);
    V[0] = Rational(1);
    if (len > 2) V[2] = BivarPoly::monomial(-3, 2, 0);
    if (len > 3) V[3] = BivarPoly::b();
    vinv[0] = Rational(1);
    for (std::size_t k = 1; k < len; ++k) {
        if (k >= 2) vinv[k] += BivarPoly::monomial(3, 2, 0) * vinv[k - 2];
        if (k >= 3) vinv[k] -= BivarPoly::b() * vinv[k - 3];
    }
    detail::WSeries lhs = V;
    detail::WSeries vneg{Rational(1)};
    for (int i = 1; 3 * i + 3 < static_cast<int>(len); ++i) {
        vneg = detail::w_mul(vneg, vinv, len);
        for (std::size_t j = 0; j + 3 * i + 3 < len; ++j) lhs[j + 3 * i + 3] += e.alpha[i - 1] * vneg[j];
    }
    const detail::WSeries cube = detail::w_mul(detail::w_mul(U, U, len), U, len);
    for (std::size_t k = 0; k < len; ++k)
        if (lhs[k] != cube[k]) return static_cast<int>(k);
    return std::nullopt;
}

struct PhiPower {
    int k = 1;
    std::vector<BivarPoly> poly_part;  ///< coefficients of z^0 .. z^k
    std::vector<BivarPoly> tail;       ///< tail[i - 1] multiplies z^{-i}
};

/// Phi^k = P_k(z) + sum_i alpha_{k,i} z^{-i}, with the tail known through
/// z^{-(N + 1 - k)}.
inline PhiPower phi_power(int k, int N) {
    if (k < 1) throw UsageError("phi_power: k must be >= 1");
    const BoettcherExpansion e = boettcher_coeffs(N);
    const std::size_t len = static_cast<std::size_t>(N) + 2;
    const auto u = e.u_coeffs();
    detail::WSeries uk{Rational(1)};
    for (int i = 0; i < k; ++i) uk = detail::w_mul(uk, detail::WSeries(u.begin(), u.end()), len);
    uk.resize(len);
    PhiPower p;
    p.k = k;
    p.poly_part.resize(k + 1);
    for (int j = 0; j <= k && j < static_cast<int>(len); ++j) p.poly_part[k - j] = uk[j];
    for (std::size_t j = static_cast<std::size_t>(k) + 1; j < len; ++j) p.tail.push_back(uk[j]);
    return p;
}

struct PhiValue {
    Complex value;
    double truncation_estimate = 0.0;  ///< twice the size of the last retained term
};

/// Truncated Phi at numeric parameters; only for |z| >= 4 * escape_bound.
inline PhiValue phi_eval(const NumericParam& p, Complex z, int N) {
    const double B = escape_bound(p);
    if (std::abs(z) < 4 * B)
        throw DomainError("phi_eval: |z| = " + std::to_string(std::abs(z)) + " is inside the region |z| < 4B = " +
                          std::to_string(4 * B));
    const BoettcherExpansion e = boettcher_coeffs(N);
    const Complex w = 1.0 / z;
    Complex sum = 0, wp = 1.0;
    double last = 0;
    for (int i = 1; i <= N; ++i) {
        wp *= w;
        const Complex term = e.alpha[i - 1].eval(p.a, p.b) * wp;
        sum += term;
        last = std::abs(term);
    }
    return {z + sum, 2 * last};
}

namespace detail {

inline LaurentSeries eval_on_series(const BivarPoly& q, const LaurentSeries& a, const LaurentSeries& b,
                                    std::size_t terms) {
    LaurentSeries acc = LaurentSeries::constant(0);
    for (const auto& [e, c] : q.terms())
        acc = (acc + c * (a.pow(e.first, terms) * b.pow(e.second, terms)).truncated(terms)).truncated(terms);
    return acc;
}

}  // namespace detail

struct ZetaReport {
    Rational zeta;
    bool root_of_unity = false;  ///< exactly +1 or -1
    double abs_deviation = 0.0;  ///< | |zeta| - 1 |
    int candidate_order = 0;     ///< 1 or 2 when zeta = 1 or -1, else 0 (undecided)
};

/// lim (c_n^-)^{deg_plus} / (c_n^+)^{deg_minus} at a puncture that is a
/// GoodPole for both signs: a ratio of leading Laurent coefficients.
inline ZetaReport zeta_limit(const ParamCurve& C, const Puncture& t0, int n, int deg_plus, int deg_minus,
                             std::size_t terms = kDefaultSeriesTerms) {
    if (n < 1 || deg_plus < 1 || deg_minus < 1) throw UsageError("zeta_limit: n and degrees must be >= 1");
    const LocalParam lp = expand_curve(C, t0, terms);
    ClassifyOptions opt;
    opt.terms = terms;
    for (Sign s : {Sign::Plus, Sign::Minus})
        if (classify_puncture(lp.a, lp.b, s, opt).kind != PunctureClass::GoodPole)
            throw UsageError("zeta_limit: t = " + to_string(t0) + " is not a GoodPole for sign " + sign_char(s));
    const LaurentSeries cp = laurent_orbit(lp.a, lp.b, Sign::Plus, n, terms).back();
    const LaurentSeries cm = laurent_orbit(lp.a, lp.b, Sign::Minus, n, terms).back();
    if (std::int64_t(deg_plus) * cm.valuation() != std::int64_t(deg_minus) * cp.valuation())
        throw NumericalError("zeta_limit: valuations do not cancel (" + std::to_string(deg_plus) + " * " +
                             std::to_string(cm.valuation()) + " != " + std::to_string(deg_minus) + " * " +
                             std::to_string(cp.valuation()) + ")");
    ZetaReport r;
    Rational num = 1, den = 1;
    for (int i = 0; i < deg_plus; ++i) num *= cm.leading();
    for (int i = 0; i < deg_minus; ++i) den *= cp.leading();
    r.zeta = num / den;
    r.root_of_unity = abs(r.zeta) == 1;
    r.candidate_order = r.zeta == 1 ? 1 : (r.zeta == -1 ? 2 : 0);
    r.abs_deviation = std::fabs(std::exp(log_abs(r.zeta)) - 1.0);
    return r;
}

struct OrderGrowthReport {
    std::vector<int> n_values;
    std::vector<std::optional<std::int64_t>> orders;  ///< nullopt: difference vanished identically
    bool strictly_increasing = true;
};

/// ord of Phi_N(c)^k - P_k(c) for a series c, where a and b are the local
/// parameter series. nullopt if the difference is identically zero.
inline std::optional<std::int64_t> phi_tail_order(const PhiPower& pk, const LaurentSeries& a, const LaurentSeries& b,
                                                  const LaurentSeries& c, std::size_t terms) {
    const LaurentSeries inv = c.inverse(terms);
    LaurentSeries sum = LaurentSeries::constant(0), ip = LaurentSeries::constant(1);
    bool any = false;
    for (const auto& coeff : pk.tail) {
        ip = (ip * inv).truncated(terms);
        if (coeff.is_zero()) continue;
        any = true;
        sum = (sum + (detail::eval_on_series(coeff, a, b, terms) * ip).truncated(terms)).truncated(terms);
    }
    if (!any || (sum.is_zero() && sum.is_exact())) return std::nullopt;
    return sum.valuation();
}

inline OrderGrowthReport order_growth_check(const ParamCurve& C, const Puncture& t0, Sign sign, int k, int n_first,
                                            int n_last, int N = 24, std::size_t terms = kDefaultSeriesTerms) {
    if (n_first < 0 || n_last < n_first) throw UsageError("order_growth_check: bad n range");
    const LocalParam lp = expand_curve(C, t0, terms);
    ClassifyOptions opt;
    opt.terms = terms;
    if (classify_puncture(lp.a, lp.b, sign, opt).kind != PunctureClass::GoodPole)
        throw UsageError("order_growth_check: t = " + to_string(t0) + " is not a GoodPole");
    const PhiPower pk = phi_power(k, N);
    const auto orbit = laurent_orbit(lp.a, lp.b, sign, n_last, terms);
    OrderGrowthReport r;
    for (int n = n_first; n <= n_last; ++n) {
        r.n_values.push_back(n);
        r.orders.push_back(phi_tail_order(pk, lp.a, lp.b, orbit[n], terms));
    }
    for (std::size_t i = 1; i < r.orders.size(); ++i)
        if (r.orders[i] && r.orders[i - 1] && *r.orders[i] <= *r.orders[i - 1]) r.strictly_increasing = false;
    return r;
}

}  // namespace cubicpcf
