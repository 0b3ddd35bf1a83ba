#pragma once

// Orbit polynomials c_n(a, b), the relation curves between critical orbits,
// resultant elimination and the search for PCF parameters at their
// intersections.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bivar_poly.hpp"
#include "dynamics.hpp"
#include "roots.hpp"

namespace cubicpcf {

inline constexpr int kDefaultOrbitDegreeCap = 6;

/// c_n^sign as an exact polynomial in (a, b). Memoized; the cache only ever
/// grows and every entry is a pure function of (sign, n).
inline BivarPoly orbit_poly(Sign sign, int n, int n_max = kDefaultOrbitDegreeCap) {
    if (n < 0) throw UsageError("orbit_poly: n must be nonnegative");
    if (n > n_max) throw BudgetExceeded("orbit_poly: n = " + std::to_string(n) + " exceeds the cap " + std::to_string(n_max));
    static std::mutex mu;
    static std::array<std::vector<BivarPoly>, 2> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& orbit = cache[sign == Sign::Plus ? 0 : 1];
    if (orbit.empty()) orbit.push_back(sign == Sign::Plus ? BivarPoly::a() : -BivarPoly::a());
    const BivarPoly three_a2 = BivarPoly::monomial(3, 2, 0);
    while (static_cast<int>(orbit.size()) <= n) {
        const BivarPoly& c = orbit.back();
        orbit.push_back(c * c * c - three_a2 * c + BivarPoly::b());
    }
    return orbit[n];
}

/// I: c_n^+ = c_m^+ (n > m), II: c_n^- = c_m^- (n > m), III: c_n^+ = c_m^-.
struct RelationKind {
    enum Kind { I, II, III };
    Kind kind = I;
    int n = 1;
    int m = 0;

    void validate() const {
        if (n < 0 || m < 0) throw UsageError("relation: indices must be nonnegative");
        if (kind != III && n <= m) throw UsageError("relation: kinds I and II need n > m");
    }
    Sign first_sign() const { return kind == II ? Sign::Minus : Sign::Plus; }
    Sign second_sign() const { return kind == I ? Sign::Plus : Sign::Minus; }
    friend bool operator==(const RelationKind&, const RelationKind&) = default;
};

inline std::string to_string(const RelationKind& k) {
    static const char* names[] = {"I", "II", "III"};
    return std::string(names[k.kind]) + "(" + std::to_string(k.n) + "," + std::to_string(k.m) + ")";
}

inline RelationKind::Kind parse_relation_kind(const std::string& s) {
    if (s == "I") return RelationKind::I;
    if (s == "II") return RelationKind::II;
    if (s == "III") return RelationKind::III;
    throw UsageError("relation kind must be I, II or III, got '" + s + "'");
}

/// Parses "I(2,1)" style text.
inline RelationKind parse_relation(const std::string& s) {
    const auto open = s.find('('), comma = s.find(','), close = s.find(')');
    if (open == std::string::npos || comma == std::string::npos || close != s.size() - 1 || comma < open)
        throw UsageError("relation must look like I(n,m), got '" + s + "'");
    RelationKind k;
    k.kind = parse_relation_kind(s.substr(0, open));
    try {
        std::size_t used = 0;
        const std::string ns = s.substr(open + 1, comma - open - 1), ms = s.substr(comma + 1, close - comma - 1);
        k.n = std::stoi(ns, &used);
        if (used != ns.size()) throw std::invalid_argument("n");
        k.m = std::stoi(ms, &used);
        if (used != ms.size()) throw std::invalid_argument("m");
    } catch (const std::exception&) {
        throw UsageError("relation indices must be integers in '" + s + "'");
    }
    k.validate();
    return k;
}

namespace detail {

// Polynomials in b with coefficients in Q[a], lowest b-degree first.
using BMajor = std::vector<UniPoly>;

inline void bm_trim(BMajor& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline int bm_degree(const BMajor& p) { return static_cast<int>(p.size()) - 1; }

/// Monic gcd of the coefficients.
inline UniPoly bm_content(const BMajor& p) {
    // a monomial coefficient c*a^k forces the content to be a power of a
    int mono = -1;
    for (const auto& c : p)
        if (!c.is_zero() && c.is_monomial()) mono = mono < 0 ? c.degree() : std::min(mono, c.degree());
    if (mono >= 0) {
        int k = mono;
        for (const auto& c : p)
            if (!c.is_zero()) k = std::min(k, c.low_degree());
        return UniPoly::monomial(1, k);
    }
    UniPoly g;
    for (const auto& c : p) {
        g = gcd(g, c);
        if (g.degree() == 0) break;
    }
    return g;
}

inline BMajor bm_div(const BMajor& p, const UniPoly& d) {
    BMajor out;
    out.reserve(p.size());
    for (const auto& c : p) out.push_back(c.is_zero() ? c : c.exact_div(d));
    return out;
}

inline BMajor bm_derivative(const BMajor& p) {
    BMajor d;
    for (std::size_t j = 1; j < p.size(); ++j) d.push_back(p[j] * Rational(static_cast<long>(j)));
    bm_trim(d);
    return d;
}

/// Scales by a rational so all coefficients are integers with gcd 1; the
/// sign is left alone.
inline BivarPoly int_primitive(const BivarPoly& p) {
    if (p.is_zero()) return p;
    BigInt den = 1, num = 0;
    for (const auto& [e, c] : p.terms()) {
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
        mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.get_num_mpz_t());
    }
    Rational s(den, num);
    s.canonicalize();
    return p * s;
}

inline BMajor bm_primitive(BMajor p) {
    bm_trim(p);
    if (p.empty()) return p;
    p = bm_div(p, bm_content(p));
    return int_primitive(BivarPoly::from_b_major(p)).coefficients_in(Var::B);
}

/// lc(B)^k A mod B with k just large enough; no content removal.
inline BMajor bm_prem(BMajor a, const BMajor& b) {
    const int db = bm_degree(b);
    while (bm_degree(a) >= db && !a.empty()) {
        const int shift = bm_degree(a) - db;
        const UniPoly la = a.back();
        for (auto& c : a) c = c * b.back();
        for (int j = 0; j <= db; ++j) a[j + shift] -= la * b[j];
        bm_trim(a);
    }
    return a;
}

/// gcd in Q[a][b] of two polynomials, primitive PRS.
inline BMajor bm_gcd(BMajor a, BMajor b) {
    a = bm_primitive(std::move(a));
    b = bm_primitive(std::move(b));
    if (bm_degree(a) < bm_degree(b)) std::swap(a, b);
    while (!b.empty()) {
        BMajor r = bm_primitive(bm_prem(a, b));
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

/// Exact quotient a / g in Q[a][b].
inline BMajor bm_exact_div(BMajor a, const BMajor& g) {
    const int dg = bm_degree(g);
    if (bm_degree(a) < dg) throw NumericalError("inexact bivariate division");
    BMajor q(bm_degree(a) - dg + 1);
    while (!a.empty() && bm_degree(a) >= dg) {
        const int shift = bm_degree(a) - dg;
        UniPoly f = a.back().exact_div(g.back());
        q[shift] = f;
        for (int j = 0; j <= dg; ++j) a[j + shift] -= f * g[j];
        bm_trim(a);
    }
    if (!a.empty()) throw NumericalError("inexact bivariate division");
    bm_trim(q);
    return q;
}

constexpr std::uint64_t kModPrime = 2147483647ULL;

inline std::uint64_t mod_pow(std::uint64_t x, std::uint64_t e) {
    std::uint64_t r = 1;
    x %= kModPrime;
    while (e) {
        if (e & 1) r = r * x % kModPrime;
        x = x * x % kModPrime;
        e >>= 1;
    }
    return r;
}

inline std::optional<std::uint64_t> mod_reduce(const Rational& c) {
    BigInt n = c.get_num(), d = c.get_den();
    const unsigned long dm = mpz_fdiv_ui(d.get_mpz_t(), kModPrime);
    if (dm == 0) return std::nullopt;
    const unsigned long nm = mpz_fdiv_ui(n.get_mpz_t(), kModPrime);
    return std::uint64_t(nm) * mod_pow(dm, kModPrime - 2) % kModPrime;
}

inline std::size_t mod_gcd_degree(std::vector<std::uint64_t> x, std::vector<std::uint64_t> y) {
    auto trim = [](std::vector<std::uint64_t>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    trim(x);
    trim(y);
    while (!y.empty()) {
        // x <- x mod y
        const std::uint64_t inv = mod_pow(y.back(), kModPrime - 2);
        while (x.size() >= y.size()) {
            const std::uint64_t f = x.back() * inv % kModPrime;
            const std::size_t shift = x.size() - y.size();
            for (std::size_t j = 0; j < y.size(); ++j)
                x[j + shift] = (x[j + shift] + kModPrime - f * y[j] % kModPrime) % kModPrime;
            trim(x);
        }
        std::swap(x, y);
    }
    return x.empty() ? 0 : x.size() - 1;
}

/// True when a specialization a = a0 (mod a large prime) keeps the b-degree
/// of p and p' and has gcd(p, p') = 1; then p is squarefree over Q(a).
inline bool certify_squarefree_mod_p(const BMajor& p) {
    const BMajor dp = bm_derivative(p);
    for (std::uint64_t a0 : {1234567ULL, 7654321ULL, 31337ULL}) {
        auto reduce = [&](const BMajor& q) -> std::optional<std::vector<std::uint64_t>> {
            std::vector<std::uint64_t> out;
            for (const auto& c : q) {
                std::uint64_t acc = 0;
                for (int i = c.degree(); i >= 0; --i) {
                    auto r = mod_reduce(c.coeff(i));
                    if (!r) return std::nullopt;
                    acc = (acc * a0 + *r) % kModPrime;
                }
                out.push_back(acc);
            }
            if (out.empty() || out.back() == 0) return std::nullopt;
            return out;
        };
        auto pm = reduce(p), dm = reduce(dp);
        if (!pm || !dm) continue;
        return mod_gcd_degree(*pm, *dm) == 0;
    }
    return false;
}

/// Leading term order: highest b-degree, then highest a-degree.
inline Rational leading_coefficient(const BivarPoly& p) {
    const auto cols = p.coefficients_in(Var::B);
    return cols.back().lead();
}

}  // namespace detail

/// Content-free, squarefree normalization of a nonzero polynomial: integer
/// coefficients with gcd 1, leading-term sign kept.
inline BivarPoly squarefree_normalize(const BivarPoly& p) {
    if (p.is_zero()) throw IdenticallyZero("squarefree_normalize: zero polynomial");
    const bool negative = detail::leading_coefficient(p) < 0;
    detail::BMajor bm = p.coefficients_in(Var::B);
    const UniPoly content = detail::bm_content(bm);
    detail::BMajor prim = detail::bm_primitive(detail::bm_div(bm, content));
    if (detail::bm_degree(prim) > 0 && !detail::certify_squarefree_mod_p(prim)) {
        const detail::BMajor g = detail::bm_gcd(prim, detail::bm_derivative(prim));
        if (detail::bm_degree(g) > 0) prim = detail::bm_primitive(detail::bm_exact_div(prim, g));
    }
    const UniPoly sq_content = squarefree_part(content);
    BivarPoly out = detail::int_primitive(BivarPoly::from_b_major(prim) *
                                          BivarPoly::from_b_major(std::vector<UniPoly>{sq_content}));
    if ((detail::leading_coefficient(out) < 0) != negative) out = -out;
    return out;
}

/// c_n - c_m for the signs of k, normalized by squarefree_normalize.
inline BivarPoly relation_poly(const RelationKind& k, int n_max = kDefaultOrbitDegreeCap) {
    k.validate();
    const BivarPoly diff = orbit_poly(k.first_sign(), k.n, n_max) - orbit_poly(k.second_sign(), k.m, n_max);
    return squarefree_normalize(diff);
}

/// Resultant of univariate polynomials over Q with the formal degrees of
/// the inputs (a constant operand c gives c^deg(other)).
inline Rational univariate_resultant(UniPoly a, UniPoly b) {
    if (a.is_zero() || b.is_zero()) return 0;
    Rational scale = 1;
    while (true) {
        const int da = a.degree(), db = b.degree();
        if (db == 0) {
            Rational r = scale;
            for (int i = 0; i < da; ++i) r *= b.lead();
            return r;
        }
        if (da == 0) {
            Rational r = scale;
            for (int i = 0; i < db; ++i) r *= a.lead();
            return r;
        }
        if (da < db) {
            if ((da * db) % 2) scale = -scale;
            std::swap(a, b);
            continue;
        }
        UniPoly r = a.divmod(b).second;
        if (r.is_zero()) return 0;
        // res(a, b) = (-1)^{da db} lc(b)^{da - dr} res(b, r)
        if ((da * db) % 2) scale = -scale;
        for (int i = 0; i < da - r.degree(); ++i) scale *= b.lead();
        a = std::move(b);
        b = std::move(r);
    }
}

struct Eliminant {
    UniPoly poly;                   ///< in the remaining variable
    bool common_component = false;  ///< resultant vanished identically
};

/// Res(P, Q) with respect to `eliminate`, by evaluation at integer points
/// of the other variable and Newton interpolation.
inline Eliminant resultant_elim(const BivarPoly& P, const BivarPoly& Q, Var eliminate) {
    if (P.is_zero() || Q.is_zero()) throw UsageError("resultant_elim: zero operand");
    const Var other = eliminate == Var::A ? Var::B : Var::A;
    const int dp = P.degree(eliminate), dq = Q.degree(eliminate);
    if (dp <= 0 && dq <= 0) throw UsageError("resultant_elim: neither operand involves the eliminated variable");
    const int bound = std::max(0, dp * std::max(0, Q.degree(other)) + dq * std::max(0, P.degree(other)));
    const auto pc = P.coefficients_in(eliminate), qc = Q.coefficients_in(eliminate);
    std::vector<Rational> xs, ys;
    for (long x = 0; static_cast<int>(xs.size()) <= bound; ++x) {
        for (long sx : {x, -x}) {
            if (x == 0 && !xs.empty() && xs.back() == 0) continue;
            if (static_cast<int>(xs.size()) > bound) break;
            const Rational xv(sx);
            if (pc.back().eval(xv) == 0 || qc.back().eval(xv) == 0) continue;
            xs.push_back(xv);
            ys.push_back(univariate_resultant(P.specialize(other, xv), Q.specialize(other, xv)));
        }
    }
    // Newton divided differences
    std::vector<Rational> dd = ys;
    for (std::size_t j = 1; j < xs.size(); ++j)
        for (std::size_t i = xs.size() - 1; i >= j; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
    UniPoly out;
    for (std::size_t i = xs.size(); i-- > 0;) out = out * UniPoly{-xs[i], 1} + UniPoly::constant(dd[i]);
    Eliminant e;
    e.poly = out;
    e.common_component = out.is_zero();
    return e;
}

struct PcfCandidate {
    Complex a, b;
    double residual_first = 0.0;  ///< |k1 polynomial| at (a, b)
    double residual_second = 0.0;
    bool certified = false;
    std::optional<ExactParam> exact;  ///< set when an exact rational check passed
};

struct PcfSearch {
    std::vector<PcfCandidate> candidates;
    bool common_component = false;
    int unconverged = 0;  ///< eliminant roots the root finder did not settle
};

struct PcfOptions {
    double certify_tol = 1e-8;
    long rational_max_den = 1000;
    int n_max = kDefaultOrbitDegreeCap;
};

namespace detail {

// Dense complex coefficient table for fast repeated evaluation.
struct NumericBivar {
    std::vector<std::vector<Complex>> cols;  // cols[j][i]: a^i b^j

    explicit NumericBivar(const BivarPoly& p) {
        for (const auto& col : p.coefficients_in(Var::B)) {
            std::vector<Complex> c;
            for (const auto& v : col.coeffs()) c.emplace_back(v.get_d(), 0);
            cols.push_back(std::move(c));
        }
    }
    static Complex horner(const std::vector<Complex>& c, Complex x) {
        Complex acc = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    Complex operator()(Complex a, Complex b) const {
        Complex acc = 0;
        for (auto it = cols.rbegin(); it != cols.rend(); ++it) acc = acc * b + horner(*it, a);
        return acc;
    }
    std::vector<Complex> in_b(Complex a) const {
        std::vector<Complex> out;
        for (const auto& c : cols) out.push_back(horner(c, a));
        return out;
    }
};

inline std::vector<Complex> complex_poly_roots(std::vector<Complex> c) {
    double mx = 0;
    for (const auto& v : c) mx = std::max(mx, std::abs(v));
    while (!c.empty() && std::abs(c.back()) <= 1e-12 * mx) c.pop_back();
    if (c.size() <= 1) return {};
    std::vector<double> la;
    for (const auto& v : c) la.push_back(v == Complex(0) ? -std::numeric_limits<double>::infinity() : std::log(std::abs(v)));
    auto res = aberth(newton_polygon_start(la), [&](Complex z) { return coefficient_newton_ratio(c, z); });
    return res.roots;
}

}  // namespace detail

/// Intersections of the k1 and k2 relation curves: eliminate b, isolate the
/// a-roots, back-substitute, Newton-refine the 2x2 system and certify.
inline PcfSearch pcf_candidates(const RelationKind& k1, const RelationKind& k2, const PcfOptions& opt = {}) {
    k1.validate();
    k2.validate();
    if (k1.kind == RelationKind::II) throw UsageError("pcf_candidates: the first relation must be of kind I or III");
    if (k2.kind == RelationKind::I) throw UsageError("pcf_candidates: the second relation must be of kind II or III");
    const BivarPoly P = relation_poly(k1, opt.n_max), Q = relation_poly(k2, opt.n_max);
    PcfSearch out;
    const Eliminant el = resultant_elim(P, Q, Var::B);
    if (el.common_component) {
        out.common_component = true;
        return out;
    }
    const detail::NumericBivar np(P), nq(Q), pa(P.derivative(Var::A)), pb(P.derivative(Var::B)),
        qa(Q.derivative(Var::A)), qb(Q.derivative(Var::B));
    const UniPoly R = squarefree_part(el.poly);
    const AberthResult ar = polynomial_roots(R);
    for (std::size_t i = 0; i < ar.roots.size(); ++i)
        if (!ar.converged[i]) ++out.unconverged;

    for (const Complex a0 : ar.roots) {
        std::vector<Complex> bs = detail::complex_poly_roots(np.in_b(a0));
        for (const Complex b : detail::complex_poly_roots(nq.in_b(a0))) bs.push_back(b);
        for (Complex b0 : bs) {
            Complex a = a0, b = b0;
            for (int it = 0; it < 60; ++it) {
                const Complex f1 = np(a, b), f2 = nq(a, b);
                const Complex j11 = pa(a, b), j12 = pb(a, b), j21 = qa(a, b), j22 = qb(a, b);
                const Complex det = j11 * j22 - j12 * j21;
                if (std::abs(det) == 0) break;
                const Complex da = (f1 * j22 - f2 * j12) / det, db = (j11 * f2 - j21 * f1) / det;
                if (!std::isfinite(std::abs(da)) || !std::isfinite(std::abs(db))) break;
                a -= da;
                b -= db;
                if (std::abs(da) + std::abs(db) <= 1e-15 * (1 + std::abs(a) + std::abs(b))) break;
            }
            // snap rounding noise in either component to zero
            auto snap = [](Complex z) {
                const double eps = 1e-13 * (1 + std::abs(z));
                return Complex(std::fabs(z.real()) <= eps ? 0.0 : z.real(), std::fabs(z.imag()) <= eps ? 0.0 : z.imag());
            };
            a = snap(a);
            b = snap(b);
            PcfCandidate c;
            c.a = a;
            c.b = b;
            c.residual_first = std::abs(np(a, b));
            c.residual_second = std::abs(nq(a, b));
            if (!(c.residual_first <= opt.certify_tol && c.residual_second <= opt.certify_tol)) continue;
            c.certified = true;
            const bool dup = std::any_of(out.candidates.begin(), out.candidates.end(), [&](const PcfCandidate& o) {
                return std::abs(o.a - a) + std::abs(o.b - b) <= 1e-7 * (1 + std::abs(a) + std::abs(b));
            });
            if (dup) continue;
            if (std::abs(a.imag()) <= 1e-9 && std::abs(b.imag()) <= 1e-9) {
                auto ar_ = rationalize(a.real(), opt.rational_max_den, 1e-9);
                auto br_ = rationalize(b.real(), opt.rational_max_den, 1e-9);
                if (ar_ && br_ && P.eval(*ar_, *br_) == 0 && Q.eval(*ar_, *br_) == 0) {
                    const ExactParam ep{*ar_, *br_};
                    if (is_preperiodic(is_preperiodic_exact(ep, ep.a, 64)) &&
                        is_preperiodic(is_preperiodic_exact(ep, Rational(-ep.a), 64))) {
                        c.exact = ep;
                        c.a = Complex(ep.a.get_d(), 0);
                        c.b = Complex(ep.b.get_d(), 0);
                    }
                }
            }
            out.candidates.push_back(c);
        }
    }
    std::sort(out.candidates.begin(), out.candidates.end(), [](const PcfCandidate& x, const PcfCandidate& y) {
        if (x.a.real() != y.a.real()) return x.a.real() < y.a.real();
        if (x.a.imag() != y.a.imag()) return x.a.imag() < y.a.imag();
        if (x.b.real() != y.b.real()) return x.b.real() < y.b.real();
        return x.b.imag() < y.b.imag();
    });
    return out;
}

struct SpecialCurveHit {
    std::optional<RelationKind> relation;
    bool on_b_zero_line = false;
};

/// First relation with indices <= N (ordered by (n + m, n), then kind
/// I, II, III) satisfied at p, plus whether p lies on b = 0.
inline SpecialCurveHit check_point_on_special_curve(const ExactParam& p, int N,
                                                    std::size_t bit_budget = kDefaultBitBudget) {
    if (N < 0) throw UsageError("check_point_on_special_curve: N must be nonnegative");
    const auto plus = critical_orbit(p, Sign::Plus, N, bit_budget);
    const auto minus = critical_orbit(p, Sign::Minus, N, bit_budget);
    SpecialCurveHit hit;
    hit.on_b_zero_line = p.b == 0;
    for (int s = 0; s <= 2 * N && !hit.relation; ++s)
        for (int n = std::max(0, s - N); n <= std::min(s, N) && !hit.relation; ++n) {
            const int m = s - n;
            if (n > m && plus[n] == plus[m])
                hit.relation = RelationKind{RelationKind::I, n, m};
            else if (n > m && minus[n] == minus[m])
                hit.relation = RelationKind{RelationKind::II, n, m};
            else if (plus[n] == minus[m])
                hit.relation = RelationKind{RelationKind::III, n, m};
        }
    return hit;
}

}  // namespace cubicpcf
