#pragma once

// The cubic family f(z) = z^3 - 3a^2 z + b with critical points +a and -a:
// iteration, critical orbits, certified escape and exact cycle detection.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "rational.hpp"

namespace cubicpcf {

using Complex = std::complex<double>;

enum class Sign { Plus, Minus };

inline char sign_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }
inline Sign opposite(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
inline Sign parse_sign(const std::string& s) {
    if (s == "+" || s == "plus") return Sign::Plus;
    if (s == "-" || s == "minus") return Sign::Minus;
    throw UsageError("sign must be '+' or '-', got '" + s + "'");
}

template <class S>
struct CubicParam {
    S a{};
    S b{};
};

using ExactParam = CubicParam<Rational>;
using NumericParam = CubicParam<Complex>;

/// Double-precision complex value with an associated error tolerance.
struct ComplexPoint {
    Complex value;
    double tol = 0.0;
};

inline NumericParam to_numeric(const ExactParam& p) { return {Complex(p.a.get_d(), 0), Complex(p.b.get_d(), 0)}; }

/// Default cap on the bit size of any single exact orbit value.
inline constexpr std::size_t kDefaultBitBudget = std::size_t{1} << 20;

template <class S>
S eval_f(const CubicParam<S>& p, const S& z) {
    S z2 = z * z;
    S a2 = p.a * p.a;
    return S(z2 * z - S(3) * a2 * z + p.b);
}

template <class S>
S critical_point(const CubicParam<S>& p, Sign sign) {
    return sign == Sign::Plus ? p.a : S(-p.a);
}

/// [c_0, ..., c_n] with c_0 = sign * a. Exact orbits throw BudgetExceeded
/// once a value outgrows bit_budget bits.
template <class S>
std::vector<S> critical_orbit(const CubicParam<S>& p, Sign sign, int n,
                              std::size_t bit_budget = kDefaultBitBudget) {
    if (n < 0) throw UsageError("critical_orbit: n must be nonnegative");
    std::vector<S> orbit;
    orbit.reserve(n + 1);
    orbit.push_back(critical_point(p, sign));
    for (int k = 0; k < n; ++k) {
        orbit.push_back(eval_f(p, orbit.back()));
        if constexpr (std::is_same_v<S, Rational>) {
            if (bit_size(orbit.back()) > bit_budget)
                throw BudgetExceeded("critical_orbit: c_" + std::to_string(k + 1) + " exceeds " +
                                     std::to_string(bit_budget) + " bits");
        }
    }
    return orbit;
}

/// B = max(1, sqrt(3|a|^2 + |b| + 2)); |z| >= B implies |f(z)| >= 2|z|.
inline double escape_bound(const NumericParam& p) {
    return std::max(1.0, std::sqrt(3 * std::norm(p.a) + std::abs(p.b) + 2));
}

/// B^2 for rational parameters, exactly. Since B^2 >= 2 the max with 1 is moot.
inline Rational escape_bound_squared(const ExactParam& p) { return Rational(3 * p.a * p.a + abs(p.b) + 2); }

inline double escape_bound(const ExactParam& p) { return std::sqrt(escape_bound_squared(p).get_d()); }

struct OrbitTail {
    int preperiod = 0;
    int period = 0;
    Rational c_m;
    Rational c_m_plus_p;
};

struct Escaping {
    int step = 0;        ///< first k with |c_k| > B
    double bound = 0.0;  ///< B
};

struct Undecided {
    int steps = 0;
    std::string reason;
};

using PreperiodicityVerdict = std::variant<OrbitTail, Escaping, Undecided>;

inline bool is_preperiodic(const PreperiodicityVerdict& v) { return std::holds_alternative<OrbitTail>(v); }

/// Exact forward iteration of `start`: Preperiodic on the first repeated
/// value, Escaping once c_k^2 > B^2 (exact rational comparison), Undecided
/// when max_steps or the bit budget runs out first.
inline PreperiodicityVerdict is_preperiodic_exact(const ExactParam& p, const Rational& start, int max_steps,
                                                  std::size_t bit_budget = kDefaultBitBudget) {
    if (max_steps < 1) throw UsageError("is_preperiodic_exact: max_steps must be >= 1");
    const Rational bound2 = escape_bound_squared(p);
    std::map<Rational, int> seen;
    Rational c = start;
    for (int k = 0; k <= max_steps; ++k) {
        if (auto it = seen.find(c); it != seen.end()) {
            OrbitTail tail;
            tail.preperiod = it->second;
            tail.period = k - it->second;
            tail.c_m = it->first;
            tail.c_m_plus_p = c;
            return tail;
        }
        if (c * c > bound2) return Escaping{k, std::sqrt(bound2.get_d())};
        if (k == max_steps) break;
        seen.emplace(c, k);
        c = eval_f(p, c);
        if (bit_size(c) > bit_budget)
            return Undecided{k + 1, "bit budget of " + std::to_string(bit_budget) + " bits exhausted"};
    }
    return Undecided{max_steps, "step budget exhausted"};
}

/// A coincidence c_n^{s1} = c_m^{s2} between critical orbit points.
struct OrbitRelation {
    Sign sign1 = Sign::Plus;
    int n = 0;
    Sign sign2 = Sign::Plus;
    int m = 0;
    friend bool operator==(const OrbitRelation&, const OrbitRelation&) = default;
};

inline std::string to_string(const OrbitRelation& r) {
    return std::string("(") + sign_char(r.sign1) + "," + std::to_string(r.n) + ")=(" + sign_char(r.sign2) + "," +
           std::to_string(r.m) + ")";
}

/// All exact coincidences with indices <= N: same-sign pairs with n > m,
/// and every (+, n), (-, m) pair.
inline std::vector<OrbitRelation> find_orbit_relation(const ExactParam& p, int N,
                                                      std::size_t bit_budget = kDefaultBitBudget) {
    if (N < 0) throw UsageError("find_orbit_relation: N must be nonnegative");
    const auto plus = critical_orbit(p, Sign::Plus, N, bit_budget);
    const auto minus = critical_orbit(p, Sign::Minus, N, bit_budget);
    std::vector<OrbitRelation> out;
    for (int n = 0; n <= N; ++n)
        for (int m = 0; m < n; ++m) {
            if (plus[n] == plus[m]) out.push_back({Sign::Plus, n, Sign::Plus, m});
            if (minus[n] == minus[m]) out.push_back({Sign::Minus, n, Sign::Minus, m});
        }
    for (int n = 0; n <= N; ++n)
        for (int m = 0; m <= N; ++m)
            if (plus[n] == minus[m]) out.push_back({Sign::Plus, n, Sign::Minus, m});
    return out;
}

}  // namespace cubicpcf
