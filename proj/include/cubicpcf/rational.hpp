#pragma once

// Exact scalars: GMP rationals plus the number-theoretic helpers the
// height and curve code needs (valuations, prime supports, rationalization).

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace cubicpcf {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "p/q", "-p/q" or an integer. Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw UsageError("empty rational literal");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    bool seen_slash = false;
    bool digits_before = false, digits_after = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (c == '/') {
            if (seen_slash) throw UsageError("malformed rational '" + s + "'");
            seen_slash = true;
        } else if (c >= '0' && c <= '9') {
            (seen_slash ? digits_after : digits_before) = true;
        } else {
            throw UsageError("malformed rational '" + s + "'");
        }
    }
    if (!digits_before || (seen_slash && !digits_after))
        throw UsageError("malformed rational '" + s + "'");
    if (s[0] == '+') s.erase(0, 1);
    Rational r;
    if (r.set_str(s, 10) != 0) throw UsageError("malformed rational '" + s + "'");
    if (r.get_den() == 0) throw UsageError("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

/// Canonical "p/q" (or "p" when q = 1) text.
inline std::string to_string(const Rational& r) { return r.get_str(10); }

/// Total numerator + denominator bit size; the exact-iteration budget unit.
inline std::size_t bit_size(const Rational& r) {
    return mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2);
}

inline double to_double(const Rational& r) { return r.get_d(); }

/// Natural log of |r| without overflow for huge numerators/denominators.
inline double log_abs(const Rational& r) {
    if (r == 0) return -std::numeric_limits<double>::infinity();
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, r.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, r.get_den_mpz_t());
    return std::log(std::fabs(mn)) - std::log(md) + double(en - ed) * std::log(2.0);
}

/// q-adic valuation of a nonzero integer.
inline std::int64_t valuation(const BigInt& n, const BigInt& q) {
    if (n == 0) return std::numeric_limits<std::int64_t>::max();
    BigInt m = n;
    std::int64_t v = 0;
    while (mpz_divisible_p(m.get_mpz_t(), q.get_mpz_t())) {
        mpz_divexact(m.get_mpz_t(), m.get_mpz_t(), q.get_mpz_t());
        ++v;
    }
    return v;
}

/// q-adic valuation of a rational; INT64_MAX stands for v(0) = +infinity.
inline std::int64_t valuation(const Rational& r, const BigInt& q) {
    if (r == 0) return std::numeric_limits<std::int64_t>::max();
    return valuation(BigInt(r.get_num()), q) - valuation(BigInt(r.get_den()), q);
}

inline bool is_prime(const BigInt& q) {
    return q >= 2 && mpz_probab_prime_p(q.get_mpz_t(), 40) > 0;
}

namespace detail {

inline BigInt pollard_brent(const BigInt& n, unsigned long seed) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    BigInt y = seed % 1000 + 2, c = seed % 97 + 1, m = 128, g = 1, r = 1, q = 1, x, ys;
    auto step = [&](const BigInt& v) {
        BigInt w = v * v + c;
        mpz_mod(w.get_mpz_t(), w.get_mpz_t(), n.get_mpz_t());
        return w;
    };
    while (g == 1) {
        x = y;
        for (BigInt i = 0; i < r; ++i) y = step(y);
        BigInt k = 0;
        while (k < r && g == 1) {
            ys = y;
            for (BigInt i = 0; i < m && i < r - k; ++i) {
                y = step(y);
                BigInt d = x - y;
                q = q * abs(d);
                mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
            mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            k += m;
        }
        r *= 2;
    }
    if (g == n) {
        do {
            ys = step(ys);
            BigInt d = abs(x - ys);
            mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        } while (g == 1);
    }
    return g;
}

inline void collect_prime_factors(BigInt n, std::set<BigInt>& out) {
    n = abs(n);
    if (n < 2) return;
    for (unsigned long p = 2; p < 10000; ++p) {
        if (n < BigInt(p) * p) break;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            out.insert(BigInt(p));
            while (mpz_divisible_ui_p(n.get_mpz_t(), p)) mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
        }
    }
    std::vector<BigInt> stack{n};
    while (!stack.empty()) {
        BigInt m = stack.back();
        stack.pop_back();
        if (m < 2) continue;
        if (is_prime(m)) {
            out.insert(m);
            continue;
        }
        BigInt d = m;
        for (unsigned long seed = 1; d == m || d == 1; ++seed) d = pollard_brent(m, seed);
        stack.push_back(d);
        stack.push_back(m / d);
    }
}

}  // namespace detail

/// Primes dividing any numerator or denominator of the given rationals.
inline std::vector<BigInt> prime_support(std::initializer_list<Rational> values) {
    std::set<BigInt> primes;
    for (const auto& r : values) {
        detail::collect_prime_factors(BigInt(r.get_num()), primes);
        detail::collect_prime_factors(BigInt(r.get_den()), primes);
    }
    return {primes.begin(), primes.end()};
}

/// Best rational approximation with denominator <= max_den (continued
/// fractions); nullopt if none lies within tol of x.
inline std::optional<Rational> rationalize(double x, long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        double fl = std::floor(r);
        if (std::fabs(fl) > 1e15) break;
        BigInt ai(static_cast<long>(fl));
        BigInt h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        Rational q(h1, k1);
        q.canonicalize();
        if (std::fabs(q.get_d() - x) <= tol) return q;
        double frac = r - fl;
        if (frac < 1e-300) break;
        r = 1.0 / frac;
    }
    return std::nullopt;
}

}  // namespace cubicpcf
