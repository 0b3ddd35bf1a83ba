#pragma once

// Truncated Laurent series with exact coefficients, local expansions of a
// parametrized curve at its punctures, pole-order sequences of critical
// orbits and the divisors they define.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "curve.hpp"
#include "roots.hpp"

namespace cubicpcf {

inline constexpr int kDefaultSeriesTerms = 64;

/// sum_{k >= val} c_k t^k known modulo t^prec. Coefficients are stored
/// relative to val; prec == kExact marks a finite, exact expansion.
class LaurentSeries {
public:
    static constexpr std::int64_t kExact = std::numeric_limits<std::int64_t>::max() / 4;

    LaurentSeries() = default;  // exact zero

    /// Exact Laurent polynomial t^shift * p(t).
    static LaurentSeries from_poly(const UniPoly& p, std::int64_t shift = 0) {
        LaurentSeries s;
        s.prec_ = kExact;
        if (p.is_zero()) return s;
        const int low = p.low_degree();
        s.val_ = shift + low;
        s.c_.assign(p.coeffs().begin() + low, p.coeffs().end());
        return s;
    }
    static LaurentSeries constant(const Rational& c) { return from_poly(UniPoly::constant(c)); }
    static LaurentSeries monomial(const Rational& c, std::int64_t k) { return from_poly(UniPoly::constant(c), k); }

    /// t^val * (c_0 + c_1 t + ...) known modulo t^prec.
    static LaurentSeries make(std::int64_t val, std::vector<Rational> coeffs, std::int64_t prec) {
        LaurentSeries s;
        s.val_ = val;
        s.c_ = std::move(coeffs);
        s.prec_ = prec;
        s.normalize();
        return s;
    }

    bool is_exact() const { return prec_ >= kExact; }
    /// True when no nonzero term is known (exact zero or cancelled to precision).
    bool is_zero() const { return c_.empty(); }
    std::int64_t precision() const { return prec_; }
    std::size_t known_terms() const { return c_.size(); }

    /// Order of the leading term; throws if all known terms vanished.
    std::int64_t valuation() const {
        if (c_.empty()) {
            if (is_exact()) return kExact;
            throw PrecisionExhausted("series is zero to precision t^" + std::to_string(prec_));
        }
        return val_;
    }
    const Rational& leading() const {
        if (c_.empty()) throw PrecisionExhausted("series has no known nonzero term");
        return c_.front();
    }
    /// Coefficient of t^k; throws when k is at or beyond the precision.
    Rational coeff(std::int64_t k) const {
        if (k >= prec_) throw PrecisionExhausted("coefficient of t^" + std::to_string(k) + " is beyond precision");
        if (c_.empty() || k < val_ || k - val_ >= static_cast<std::int64_t>(c_.size())) return 0;
        return c_[k - val_];
    }

    /// Drops terms so at most n remain past the leading one.
    LaurentSeries truncated(std::size_t n) const {
        if (c_.size() <= n && (is_exact() || prec_ - val_ <= static_cast<std::int64_t>(n))) return *this;
        LaurentSeries s = *this;
        if (s.c_.empty()) return s;
        s.c_.resize(std::min(s.c_.size(), n));
        s.prec_ = std::min(s.prec_, s.val_ + static_cast<std::int64_t>(n));
        s.normalize();
        return s;
    }

    LaurentSeries operator-() const {
        LaurentSeries s = *this;
        for (auto& v : s.c_) v = -v;
        return s;
    }

    friend LaurentSeries operator+(const LaurentSeries& x, const LaurentSeries& y) {
        const std::int64_t prec = std::min(x.prec_, y.prec_);
        if (x.c_.empty() && y.c_.empty()) return make(prec, {}, prec);
        std::int64_t lo = std::min(x.c_.empty() ? kExact : x.val_, y.c_.empty() ? kExact : y.val_);
        if (lo >= prec) return make(prec, {}, prec);
        std::int64_t hi = std::max(x.end(), y.end());
        if (prec < kExact) hi = std::min(hi, prec);
        std::vector<Rational> c(static_cast<std::size_t>(hi - lo));
        auto acc = [&](const LaurentSeries& s) {
            for (std::size_t i = 0; i < s.c_.size(); ++i) {
                const std::int64_t k = s.val_ + static_cast<std::int64_t>(i);
                if (k < hi) c[k - lo] += s.c_[i];
            }
        };
        acc(x);
        acc(y);
        return make(lo, std::move(c), prec);
    }
    friend LaurentSeries operator-(const LaurentSeries& x, const LaurentSeries& y) { return x + (-y); }

    friend LaurentSeries operator*(const LaurentSeries& x, const Rational& s) {
        if (s == 0) return make(x.prec_ >= kExact ? kExact : x.prec_, {}, x.prec_);
        LaurentSeries r = x;
        for (auto& v : r.c_) v *= s;
        return r;
    }
    friend LaurentSeries operator*(const Rational& s, const LaurentSeries& x) { return x * s; }

    friend LaurentSeries operator*(const LaurentSeries& x, const LaurentSeries& y) {
        // an exact zero absorbs everything
        if (x.c_.empty() && x.is_exact()) return x;
        if (y.c_.empty() && y.is_exact()) return y;
        if (x.c_.empty() || y.c_.empty()) {
            // only a lower bound on the valuation is known
            const std::int64_t p = std::min(x.c_.empty() ? x.prec_ + y.low() : kExact,
                                            y.c_.empty() ? y.prec_ + x.low() : kExact);
            return make(p, {}, p);
        }
        const std::int64_t val = x.val_ + y.val_;
        std::int64_t prec = kExact;
        if (!x.is_exact()) prec = std::min(prec, x.prec_ + y.val_);
        if (!y.is_exact()) prec = std::min(prec, y.prec_ + x.val_);
        std::size_t len = x.c_.size() + y.c_.size() - 1;
        if (prec < kExact) len = std::min<std::size_t>(len, static_cast<std::size_t>(prec - val));
        std::vector<Rational> c(len);
        for (std::size_t i = 0; i < x.c_.size() && i < len; ++i)
            for (std::size_t j = 0; j < y.c_.size() && i + j < len; ++j) c[i + j] += x.c_[i] * y.c_[j];
        return make(val, std::move(c), prec);
    }

    /// 1/x to n relative terms.
    LaurentSeries inverse(std::size_t n) const {
        if (c_.empty()) throw PrecisionExhausted("inverse of a series that is zero to precision");
        std::size_t rel = is_exact() ? n : std::min<std::size_t>(n, static_cast<std::size_t>(prec_ - val_));
        std::vector<Rational> inv(rel);
        const Rational c0inv = 1 / c_[0];
        for (std::size_t k = 0; k < rel; ++k) {
            Rational acc = k == 0 ? Rational(1) : Rational(0);
            for (std::size_t j = 1; j <= k && j < c_.size(); ++j) acc -= c_[j] * inv[k - j];
            inv[k] = acc * c0inv;
        }
        // exact only when x is a monomial
        const bool exact = is_exact() && c_.size() == 1;
        return make(-val_, std::move(inv), exact ? kExact : -val_ + static_cast<std::int64_t>(rel));
    }

    LaurentSeries pow(unsigned e, std::size_t n) const {
        LaurentSeries r = constant(1), base = *this;
        while (e) {
            if (e & 1u) r = (r * base).truncated(n);
            e >>= 1;
            if (e) base = (base * base).truncated(n);
        }
        return r;
    }

    friend bool operator==(const LaurentSeries& x, const LaurentSeries& y) {
        return x.c_ == y.c_ && x.prec_ == y.prec_ && (x.c_.empty() || x.val_ == y.val_);
    }

    std::string to_string() const {
        if (c_.empty()) return is_exact() ? "0" : "O(t^" + std::to_string(prec_) + ")";
        std::string out;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            if (!out.empty()) out += " + ";
            out += "(" + cubicpcf::to_string(c_[i]) + ")*t^" + std::to_string(val_ + static_cast<std::int64_t>(i));
        }
        if (!is_exact()) out += " + O(t^" + std::to_string(prec_) + ")";
        return out;
    }

private:
    std::int64_t end() const { return c_.empty() ? std::numeric_limits<std::int64_t>::min() : val_ + std::int64_t(c_.size()); }
    std::int64_t low() const { return c_.empty() ? prec_ : val_; }

    void normalize() {
        std::size_t lead = 0;
        while (lead < c_.size() && c_[lead] == 0) ++lead;
        if (lead == c_.size()) {
            c_.clear();
            val_ = prec_;
            return;
        }
        if (lead) {
            c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lead));
            val_ += static_cast<std::int64_t>(lead);
        }
        if (prec_ < kExact && static_cast<std::int64_t>(c_.size()) > prec_ - val_) c_.resize(prec_ - val_);
        if (prec_ >= kExact)
            while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::int64_t val_ = 0;
    std::vector<Rational> c_;
    std::int64_t prec_ = kExact;
};

/// A point of P^1 where the curve may have a pole: a rational t0 or infinity.
struct Puncture {
    bool at_infinity = false;
    Rational t0 = 0;

    static Puncture infinity() { return {true, 0}; }
    static Puncture at(const Rational& t) { return {false, t}; }

    friend bool operator<(const Puncture& x, const Puncture& y) {
        if (x.at_infinity != y.at_infinity) return !x.at_infinity;
        return !x.at_infinity && x.t0 < y.t0;
    }
    friend bool operator==(const Puncture& x, const Puncture& y) {
        return x.at_infinity == y.at_infinity && (x.at_infinity || x.t0 == y.t0);
    }
};

inline std::string to_string(const Puncture& p) { return p.at_infinity ? "inf" : to_string(p.t0); }

inline Puncture parse_puncture(const std::string& s) {
    if (s == "inf" || s == "infinity") return Puncture::infinity();
    return Puncture::at(parse_rational(s));
}

/// Local expansion of num/den in the parameter s = t - t0 (or s = 1/t).
inline LaurentSeries expand_at(const RationalFunction& f, const Puncture& p, std::size_t terms = kDefaultSeriesTerms) {
    LaurentSeries num, den;
    if (p.at_infinity) {
        const int dn = std::max(f.num.degree(), 0), dd = std::max(f.den.degree(), 0);
        num = LaurentSeries::from_poly(f.num.reversed(dn), -dn);
        den = LaurentSeries::from_poly(f.den.reversed(dd), -dd);
    } else {
        num = LaurentSeries::from_poly(f.num.taylor_shift(p.t0));
        den = LaurentSeries::from_poly(f.den.taylor_shift(p.t0));
    }
    if (num.is_zero()) return num;
    return (num * den.inverse(terms)).truncated(terms);
}

struct LocalParam {
    LaurentSeries a, b;
};

inline LocalParam expand_curve(const ParamCurve& C, const Puncture& p, std::size_t terms = kDefaultSeriesTerms) {
    return {expand_at(C.a, p, terms), expand_at(C.b, p, terms)};
}

/// [c_0, ..., c_n] as series, each kept to `terms` relative terms.
inline std::vector<LaurentSeries> laurent_orbit(const LaurentSeries& a, const LaurentSeries& b, Sign sign, int n,
                                                std::size_t terms = kDefaultSeriesTerms) {
    if (n < 0) throw UsageError("laurent_orbit: n must be nonnegative");
    if (terms < 1) throw UsageError("laurent_orbit: need at least one term");
    const LaurentSeries three_a2 = (Rational(3) * (a * a)).truncated(terms);
    std::vector<LaurentSeries> orbit{(sign == Sign::Plus ? a : -a).truncated(terms)};
    for (int k = 0; k < n; ++k) {
        const LaurentSeries& c = orbit.back();
        LaurentSeries next = (c * c).truncated(terms) * c - three_a2 * c + b;
        next = next.truncated(terms);
        if (next.is_zero() && !next.is_exact())
            throw PrecisionExhausted("laurent_orbit: c_" + std::to_string(k + 1) +
                                     " cancelled to precision; raise the term count");
        orbit.push_back(std::move(next));
    }
    return orbit;
}

namespace detail {
// -ord of a series, with exact zero mapped to a large negative sentinel
inline std::int64_t pole_order(const LaurentSeries& s) {
    if (s.is_zero() && s.is_exact()) return -LaurentSeries::kExact;
    return -s.valuation();
}
}  // namespace detail

/// gamma_k = -ord c_k for k = 1..n.
inline std::vector<std::int64_t> gamma_sequence(const LaurentSeries& a, const LaurentSeries& b, Sign sign, int n,
                                                std::size_t terms = kDefaultSeriesTerms) {
    const auto orbit = laurent_orbit(a, b, sign, n, terms);
    std::vector<std::int64_t> g;
    for (int k = 1; k <= n; ++k) g.push_back(detail::pole_order(orbit[k]));
    return g;
}

struct PunctureClass {
    enum Kind { NotPole, BadPole, GoodPole };
    Kind kind = NotPole;
    std::int64_t gamma_a = 0, gamma_b = 0, gamma_max = 0;
    int n0 = 0;                         ///< GoodPole: first n with 3 gamma_n > gamma_max
    int horizon = 0;                    ///< iterations examined
    std::vector<std::int64_t> gammas;  ///< gamma_1, ..., gamma_horizon (or up to n0)
};

inline const char* to_string(PunctureClass::Kind k) {
    switch (k) {
        case PunctureClass::NotPole: return "NotPole";
        case PunctureClass::BadPole: return "BadPole";
        default: return "GoodPole";
    }
}

struct ClassifyOptions {
    std::size_t terms = kDefaultSeriesTerms;
    int horizon_slack = 16;  ///< horizon = 3 gamma_max + slack
};

/// Pole-growth dichotomy at one puncture: the orbit's pole order either
/// triples from some n0 on, or stays at gamma_a with gamma_b = 3 gamma_a.
inline PunctureClass classify_puncture(const LaurentSeries& a, const LaurentSeries& b, Sign sign,
                                       const ClassifyOptions& opt = {}) {
    PunctureClass pc;
    pc.gamma_a = detail::pole_order(a);
    pc.gamma_b = detail::pole_order(b);
    pc.gamma_max = std::max(pc.gamma_a > -LaurentSeries::kExact ? 3 * pc.gamma_a : pc.gamma_a, pc.gamma_b);
    if (pc.gamma_max <= 0) return pc;
    pc.horizon = static_cast<int>(3 * pc.gamma_max + opt.horizon_slack);
    const LaurentSeries three_a2 = (Rational(3) * (a * a)).truncated(opt.terms);
    LaurentSeries c = (sign == Sign::Plus ? a : -a).truncated(opt.terms);
    bool stationary = true;
    for (int n = 1; n <= pc.horizon; ++n) {
        c = ((c * c).truncated(opt.terms) * c - three_a2 * c + b).truncated(opt.terms);
        if (c.is_zero() && !c.is_exact())
            throw PrecisionExhausted("classify_puncture: c_" + std::to_string(n) +
                                     " cancelled to precision; raise the term count");
        const std::int64_t g = detail::pole_order(c);
        pc.gammas.push_back(g);
        if (3 * g > pc.gamma_max) {
            pc.kind = PunctureClass::GoodPole;
            pc.n0 = n;
            return pc;
        }
        stationary = stationary && g == pc.gamma_a;
    }
    if (stationary && pc.gamma_b == 3 * pc.gamma_a) {
        pc.kind = PunctureClass::BadPole;
        return pc;
    }
    throw NumericalError("classify_puncture: pole orders neither tripled nor stayed at gamma_a within " +
                         std::to_string(pc.horizon) + " iterations; raise the horizon or the term count");
}

/// Rational poles of a(t), b(t) plus infinity. Irrational poles are not
/// representable as punctures and raise an error.
inline std::vector<Puncture> curve_punctures(const ParamCurve& C) {
    std::set<Puncture> out{Puncture::infinity()};
    for (const UniPoly* den : {&C.a.den, &C.b.den}) {
        if (den->degree() <= 0) continue;
        const UniPoly sq = squarefree_part(*den);
        const AberthResult roots = polynomial_roots(sq);
        int found = 0;
        std::set<Rational> seen;
        for (const Complex& r : roots.roots) {
            if (std::abs(r.imag()) > 1e-6 * (1 + std::abs(r))) continue;
            auto q = rationalize(r.real(), 1000000, 1e-7 * (1 + std::abs(r.real())));
            if (q && sq.eval(*q) == 0 && seen.insert(*q).second) {
                out.insert(Puncture::at(*q));
                ++found;
            }
        }
        if (found != sq.degree())
            throw NumericalError("curve_punctures: denominator has irrational roots; only rational punctures are supported");
    }
    return {out.begin(), out.end()};
}

using Divisor = std::map<Puncture, std::int64_t>;

inline std::int64_t degree(const Divisor& d) {
    std::int64_t s = 0;
    for (const auto& [p, m] : d) s += m;
    return s;
}

/// Per-puncture classifications for one sign.
inline std::map<Puncture, PunctureClass> classify_curve(const ParamCurve& C, Sign sign, const ClassifyOptions& opt = {}) {
    std::map<Puncture, PunctureClass> out;
    for (const auto& p : curve_punctures(C)) {
        const LocalParam lp = expand_curve(C, p, opt.terms);
        out.emplace(p, classify_puncture(lp.a, lp.b, sign, opt));
    }
    return out;
}

/// Smallest n with 3 gamma_n > gamma_max at every GoodPole (0 if none).
inline int tripling_onset(const ParamCurve& C, Sign sign, const ClassifyOptions& opt = {}) {
    int n0 = 0;
    for (const auto& [p, pc] : classify_curve(C, sign, opt))
        if (pc.kind == PunctureClass::GoodPole) n0 = std::max(n0, pc.n0);
    return n0;
}

/// D_n: GoodPole punctures weighted by gamma_n.
inline Divisor divisor_Dn(const ParamCurve& C, Sign sign, int n, const ClassifyOptions& opt = {}) {
    Divisor d;
    for (const auto& [p, pc] : classify_curve(C, sign, opt)) {
        if (pc.kind != PunctureClass::GoodPole) continue;
        if (n < pc.n0)
            throw UsageError("divisor_Dn: n = " + std::to_string(n) + " is before the tripling onset " +
                             std::to_string(pc.n0) + " at t = " + to_string(p));
        const LocalParam lp = expand_curve(C, p, opt.terms);
        d[p] = gamma_sequence(lp.a, lp.b, sign, n, opt.terms).back();
    }
    return d;
}

/// D_{n+i} == 3^i D_n componentwise.
inline bool check_divisor_growth(const ParamCurve& C, Sign sign, int n, int i, const ClassifyOptions& opt = {}) {
    if (i < 0) throw UsageError("check_divisor_growth: i must be nonnegative");
    const Divisor dn = divisor_Dn(C, sign, n, opt), dni = divisor_Dn(C, sign, n + i, opt);
    std::int64_t scale = 1;
    for (int k = 0; k < i; ++k) scale *= 3;
    if (dn.size() != dni.size()) return false;
    for (const auto& [p, m] : dn) {
        auto it = dni.find(p);
        if (it == dni.end() || it->second != scale * m) return false;
    }
    return true;
}

struct CoefficientReport {
    std::int64_t gamma_a = 0;
    Rational alpha;                           ///< leading coefficient of the critical point
    std::vector<Rational> x0;                 ///< x_{n,0}, n = 1..N
    bool all_roots = true;                    ///< every x_{n,0} is 1 or -2
    std::set<std::vector<Rational>> tuples;   ///< distinct (x_{n,0}, ..., x_{n,gamma_a})
    bool saturated = false;                   ///< second half of the run added no new tuple
};

/// Leading-coefficient check at a BadPole: after dividing by the leading
/// coefficient alpha of the critical point +-a, the constant term of t^{gamma_a} c_n must be a
/// root of x^3 - 3x + 2. Higher x_{n,i} carry an extra fixed factor per i.
inline CoefficientReport coefficient_lemma_check(const LaurentSeries& a, const LaurentSeries& b, Sign sign, int n,
                                                 std::size_t terms = kDefaultSeriesTerms) {
    if (n < 1) throw UsageError("coefficient_lemma_check: n must be >= 1");
    CoefficientReport r;
    r.gamma_a = detail::pole_order(a);
    if (r.gamma_a <= 0 || detail::pole_order(b) != 3 * r.gamma_a)
        throw UsageError("coefficient_lemma_check: need gamma_b = 3 gamma_a > 0");
    // frame of the critical point +-a
    r.alpha = sign == Sign::Plus ? a.leading() : Rational(-a.leading());
    if (b.leading() != 2 * r.alpha * r.alpha * r.alpha)
        throw UsageError("coefficient_lemma_check: lim 2a^3/b != 1; puncture is not a BadPole");
    const auto orbit = laurent_orbit(a, b, sign, n, terms);
    const std::int64_t g = r.gamma_a;
    std::size_t half_size = 0;
    for (int k = 1; k <= n; ++k) {
        const LaurentSeries& c = orbit[k];
        std::vector<Rational> tup;
        for (std::int64_t i = 0; i <= g; ++i) tup.push_back(c.coeff(-g + i) / r.alpha);
        r.x0.push_back(tup[0]);
        if (tup[0] != 1 && tup[0] != -2) r.all_roots = false;
        r.tuples.insert(tup);
        if (k == n / 2) half_size = r.tuples.size();
    }
    r.saturated = n >= 2 && r.tuples.size() == half_size;
    return r;
}

}  // namespace cubicpcf
