#pragma once

// Hand-rolled generators for property tests. Seeds are fixed per test so
// failures replay exactly.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cubicpcf/cubicpcf.hpp"

namespace testutil {

using namespace cubicpcf;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    Rational rational(long num_range = 9, long den_max = 5) {
        Rational r(integer(-num_range, num_range), integer(1, den_max));
        r.canonicalize();
        return r;
    }
    Rational nonzero_rational(long num_range = 9, long den_max = 5) {
        for (;;) {
            Rational r = rational(num_range, den_max);
            if (r != 0) return r;
        }
    }

    Complex complex(double radius) { return {real(-radius, radius), real(-radius, radius)}; }

    UniPoly unipoly(int max_degree, long num_range = 9, long den_max = 3) {
        std::vector<Rational> c(integer(0, max_degree) + 1);
        for (auto& x : c) x = rational(num_range, den_max);
        return UniPoly(std::move(c));
    }

    BivarPoly bivar(int max_deg_a, int max_deg_b, int max_terms, long num_range = 9, long den_max = 3) {
        BivarPoly p;
        const long terms = integer(1, max_terms);
        for (long k = 0; k < terms; ++k)
            p.add_term(static_cast<int>(integer(0, max_deg_a)), static_cast<int>(integer(0, max_deg_b)),
                       rational(num_range, den_max));
        return p;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Independent exact iteration c_{k+1} = c_k^3 - 3 a^2 c_k + b, written
// without the library's orbit code.
inline std::vector<Rational> naive_orbit(const Rational& a, const Rational& b, const Rational& start, int n) {
    std::vector<Rational> out{start};
    for (int k = 0; k < n; ++k) {
        const Rational& c = out.back();
        Rational next = c * c * c - 3 * a * a * c + b;
        out.push_back(next);
    }
    return out;
}

// log|r| from the mantissa/exponent split of numerator and denominator.
inline double log_abs_exact(const Rational& r) {
    long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, r.get_num_mpz_t());
    const double md = mpz_get_d_2exp(&ed, r.get_den_mpz_t());
    return std::log(std::fabs(mn)) - std::log(md) + double(en - ed) * std::log(2.0);
}

// Archimedean escape rate after `steps` iterations: exact rational iteration
// while the values stay small, then doubles, switching to the recursion on
// (log|c|, sign) once |c| is large.
inline double arch_green_oracle(const Rational& a, const Rational& b, const Rational& z, int steps) {
    Rational c = z;
    int n = 0;
    while (n < steps && mpz_sizeinbase(c.get_num_mpz_t(), 2) + mpz_sizeinbase(c.get_den_mpz_t(), 2) < 4000) {
        c = c * c * c - 3 * a * a * c + b;
        ++n;
    }
    if (c == 0) return 0.0;
    double L = log_abs_exact(c);
    double sgn = c > 0 ? 1.0 : -1.0;
    const double a2 = a.get_d() * a.get_d(), bd = b.get_d();
    for (; n < steps; ++n) {
        if (L < 50) {
            const double x = sgn * std::exp(L);
            const double next = x * x * x - 3.0 * a2 * x + bd;
            if (next == 0) return 0.0;
            L = std::log(std::fabs(next));
            sgn = next < 0 ? -1.0 : 1.0;
            continue;
        }
        const double inv = sgn * std::exp(-L);
        const double w = 1.0 - 3.0 * a2 * inv * inv + bd * inv * inv * inv;
        L = 3.0 * L + std::log(std::fabs(w));
        sgn = sgn * (w < 0 ? -1.0 : 1.0);
    }
    return std::max(L, 0.0) / std::pow(3.0, n);
}

// q-adic escape rate from exact iteration: -v_q(c_n) log q / 3^n at the
// last of `steps` iterates, clamped at 0.
inline double nonarch_green_oracle(const Rational& a, const Rational& b, const Rational& z, const BigInt& q,
                                   int steps) {
    Rational c = z;
    for (int n = 0; n < steps; ++n) c = c * c * c - 3 * a * a * c + b;
    if (c == 0) return 0.0;
    std::int64_t v = 0;
    BigInt num = c.get_num(), den = c.get_den();
    while (num % q == 0) {
        num /= q;
        ++v;
    }
    while (den % q == 0) {
        den /= q;
        --v;
    }
    return std::max(0.0, -double(v) * std::log(q.get_d()) / std::pow(3.0, steps));
}

}  // namespace testutil
