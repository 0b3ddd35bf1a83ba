#pragma once

// Dense univariate polynomials over Q, lowest degree first. Large products
// go through Kronecker substitution so GMP's FFT multiplication does the work.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace cubicpcf {

namespace detail {

inline std::size_t max_bits(const std::vector<BigInt>& v) {
    std::size_t bits = 0;
    for (const auto& x : v)
        if (x != 0) bits = std::max(bits, mpz_sizeinbase(x.get_mpz_t(), 2));
    return bits;
}

inline BigInt kronecker_pack(const std::vector<BigInt>& v, std::size_t slot_limbs, int sign) {
    std::vector<mp_limb_t> buf(v.size() * slot_limbs, 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (sgn(v[i]) != sign) continue;
        std::size_t count = 0;
        mpz_export(&buf[i * slot_limbs], &count, -1, sizeof(mp_limb_t), 0, 0, v[i].get_mpz_t());
    }
    BigInt out;
    mpz_import(out.get_mpz_t(), buf.size(), -1, sizeof(mp_limb_t), 0, 0, buf.data());
    return out;
}

/// Integer polynomial product via a single big-integer multiplication.
inline std::vector<BigInt> kronecker_mul(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t len = a.size() + b.size() - 1;
    std::size_t guard = 2;
    for (std::size_t m = std::min(a.size(), b.size()); m > 0; m >>= 1) ++guard;
    const std::size_t bits = max_bits(a) + max_bits(b) + guard;
    const std::size_t limb_bits = sizeof(mp_limb_t) * 8;
    const std::size_t slot_limbs = (bits + limb_bits - 1) / limb_bits;
    const std::size_t slot_bits = slot_limbs * limb_bits;

    BigInt x = kronecker_pack(a, slot_limbs, 1) - kronecker_pack(a, slot_limbs, -1);
    BigInt y = kronecker_pack(b, slot_limbs, 1) - kronecker_pack(b, slot_limbs, -1);
    BigInt z = x * y;
    const int s = sgn(z);
    z = abs(z);

    const std::size_t zsize = mpz_size(z.get_mpz_t());
    const mp_limb_t* limbs = mpz_limbs_read(z.get_mpz_t());
    std::vector<BigInt> out(len);
    BigInt half, full;
    mpz_ui_pow_ui(full.get_mpz_t(), 2, slot_bits);
    half = full / 2;
    int carry = 0;
    std::vector<mp_limb_t> slot(slot_limbs);
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t l = 0; l < slot_limbs; ++l) {
            std::size_t idx = i * slot_limbs + l;
            slot[l] = idx < zsize ? limbs[idx] : 0;
        }
        BigInt d;
        mpz_import(d.get_mpz_t(), slot_limbs, -1, sizeof(mp_limb_t), 0, 0, slot.data());
        d += carry;
        if (d >= half) {
            d -= full;
            carry = 1;
        } else {
            carry = 0;
        }
        out[i] = s < 0 ? BigInt(-d) : d;
    }
    return out;
}

inline std::vector<BigInt> schoolbook_mul(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<BigInt> out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j] != 0) mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
    return out;
}

inline std::vector<BigInt> int_poly_mul(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    if (std::min(a.size(), b.size()) >= 24) return kronecker_mul(a, b);
    return schoolbook_mul(a, b);
}

/// Splits rationals into a common denominator and integer numerators.
inline std::pair<std::vector<BigInt>, BigInt> clear_denominators(const std::vector<Rational>& v) {
    BigInt den = 1;
    for (const auto& x : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
    std::vector<BigInt> nums(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        nums[i] = den / v[i].get_den();
        nums[i] *= v[i].get_num();
    }
    return {std::move(nums), den};
}

}  // namespace detail

class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    UniPoly(std::initializer_list<Rational> coeffs) : c_(coeffs) { trim(); }

    static UniPoly constant(const Rational& v) { return UniPoly(std::vector<Rational>{v}); }
    static UniPoly monomial(const Rational& v, std::size_t deg) {
        std::vector<Rational> c(deg + 1);
        c[deg] = v;
        return UniPoly(std::move(c));
    }
    static UniPoly x() { return monomial(1, 1); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    std::size_t size() const { return c_.size(); }
    const std::vector<Rational>& coeffs() const { return c_; }
    Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    const Rational& lead() const { return c_.back(); }

    /// Exponent of the lowest nonzero term (order of vanishing at 0).
    int low_degree() const {
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] != 0) return static_cast<int>(i);
        return -1;
    }

    bool is_monomial() const {
        int nz = 0;
        for (const auto& v : c_) nz += v != 0;
        return nz == 1;
    }

    friend bool operator==(const UniPoly& p, const UniPoly& q) { return p.c_ == q.c_; }

    UniPoly& operator+=(const UniPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    UniPoly& operator-=(const UniPoly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    UniPoly& operator*=(const Rational& s) {
        if (s == 0) {
            c_.clear();
            return *this;
        }
        for (auto& v : c_) v *= s;
        return *this;
    }
    friend UniPoly operator+(UniPoly p, const UniPoly& q) { return p += q; }
    friend UniPoly operator-(UniPoly p, const UniPoly& q) { return p -= q; }
    friend UniPoly operator*(UniPoly p, const Rational& s) { return p *= s; }
    friend UniPoly operator*(const Rational& s, UniPoly p) { return p *= s; }
    UniPoly operator-() const {
        UniPoly r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }

    friend UniPoly operator*(const UniPoly& p, const UniPoly& q) {
        if (p.is_zero() || q.is_zero()) return {};
        auto [pn, pd] = detail::clear_denominators(p.c_);
        auto [qn, qd] = detail::clear_denominators(q.c_);
        auto prod = detail::int_poly_mul(pn, qn);
        BigInt den = pd * qd;
        std::vector<Rational> out(prod.size());
        for (std::size_t i = 0; i < prod.size(); ++i) {
            out[i] = Rational(prod[i], den);
            out[i].canonicalize();
        }
        return UniPoly(std::move(out));
    }
    UniPoly& operator*=(const UniPoly& o) { return *this = *this * o; }

    UniPoly pow(unsigned e) const {
        UniPoly result = constant(1), base = *this;
        while (e) {
            if (e & 1u) result *= base;
            e >>= 1;
            if (e) base = base * base;
        }
        return result;
    }

    UniPoly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<Rational> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<unsigned long>(i);
        return UniPoly(std::move(d));
    }

    /// Quotient and remainder; throws on division by zero.
    std::pair<UniPoly, UniPoly> divmod(const UniPoly& d) const {
        if (d.is_zero()) throw UsageError("polynomial division by zero");
        if (degree() < d.degree()) return {UniPoly{}, *this};
        std::vector<Rational> r = c_;
        std::vector<Rational> q(c_.size() - d.c_.size() + 1);
        const Rational inv = 1 / d.lead();
        for (int i = degree() - d.degree(); i >= 0; --i) {
            Rational f = r[i + d.degree()] * inv;
            q[i] = f;
            if (f == 0) continue;
            for (int j = 0; j <= d.degree(); ++j) r[i + j] -= f * d.c_[j];
        }
        r.resize(d.c_.size() - 1);
        return {UniPoly(std::move(q)), UniPoly(std::move(r))};
    }

    /// Exact division; throws if d does not divide *this.
    UniPoly exact_div(const UniPoly& d) const {
        auto [q, r] = divmod(d);
        if (!r.is_zero()) throw NumericalError("inexact polynomial division");
        return q;
    }

    UniPoly monic() const {
        if (is_zero()) return {};
        return *this * (1 / lead());
    }

    /// Integer-coefficient polynomial with positive content 1, sign preserved.
    UniPoly primitive() const {
        if (is_zero()) return {};
        auto [nums, den] = detail::clear_denominators(c_);
        BigInt g = 0;
        for (const auto& v : nums) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        std::vector<Rational> out(nums.size());
        for (std::size_t i = 0; i < nums.size(); ++i) out[i] = Rational(nums[i] / g);
        return UniPoly(std::move(out));
    }

    Rational eval(const Rational& x) const {
        Rational acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    std::complex<double> eval(std::complex<double> x) const {
        std::complex<double> acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + it->get_d();
        return acc;
    }

    /// p(x + t0), exact.
    UniPoly taylor_shift(const Rational& t0) const {
        std::vector<Rational> a = c_;
        const int n = degree();
        for (int i = 0; i < n; ++i)
            for (int j = n - 1; j >= i; --j) a[j] += t0 * a[j + 1];
        return UniPoly(std::move(a));
    }

    /// x^n p(1/x) for n >= degree.
    UniPoly reversed(std::size_t n) const {
        std::vector<Rational> a(n + 1);
        for (std::size_t i = 0; i < c_.size(); ++i) a[n - i] = c_[i];
        return UniPoly(std::move(a));
    }

    /// Natural logs of |coefficient| (-inf for zero), for Newton-polygon work.
    std::vector<double> log_abs_coeffs() const {
        std::vector<double> out(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) out[i] = log_abs(c_[i]);
        return out;
    }

    /// Coefficients as doubles, all divided by a common power of two so the
    /// largest one is O(1). Returns (coeffs, log2 scale).
    std::pair<std::vector<std::complex<double>>, long> scaled_complex_coeffs() const {
        long max_exp = std::numeric_limits<long>::min();
        std::vector<long> exps(c_.size());
        std::vector<double> mant(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            long en, ed;
            double mn = mpz_get_d_2exp(&en, c_[i].get_num_mpz_t());
            double md = mpz_get_d_2exp(&ed, c_[i].get_den_mpz_t());
            mant[i] = mn / md;
            exps[i] = en - ed;
            max_exp = std::max(max_exp, exps[i]);
        }
        std::vector<std::complex<double>> out(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (c_[i] != 0) out[i] = std::ldexp(mant[i], static_cast<int>(std::max(exps[i] - max_exp, -2000L)));
        return {std::move(out), max_exp};
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    std::vector<Rational> c_;
};

/// gcd over Q via a primitive remainder sequence;
/// result is monic (zero if both inputs are zero).
inline UniPoly gcd(UniPoly a, UniPoly b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.degree() < b.degree()) std::swap(a, b);
    a = a.primitive();
    b = b.primitive();
    while (!b.is_zero()) {
        UniPoly r = a.divmod(b).second;
        a = std::move(b);
        b = r.is_zero() ? r : r.primitive();
    }
    return a.monic();
}

/// p / gcd(p, p'), monic.
inline UniPoly squarefree_part(const UniPoly& p) {
    if (p.degree() <= 0) return p.monic();
    UniPoly g = gcd(p, p.derivative());
    return p.exact_div(g).monic();
}

}  // namespace cubicpcf
