#pragma once

// Escape-rate functions at the archimedean place and at primes, and the
// canonical and critical heights over Q built from them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curve.hpp"
#include "dynamics.hpp"

namespace cubicpcf {

class Place {
public:
    static Place archimedean() { return Place(); }
    static Place finite(const BigInt& q) {
        if (!is_prime(q)) throw UsageError("place: " + q.get_str() + " is not prime");
        Place p;
        p.prime_ = q;
        return p;
    }

    bool is_archimedean() const { return !prime_.has_value(); }
    const BigInt& prime() const {
        if (!prime_) throw UsageError("place: archimedean place has no prime");
        return *prime_;
    }
    std::string name() const { return prime_ ? prime_->get_str() : "inf"; }

    /// log|r|_v, with |p|_p = 1/p.
    double log_abs(const Rational& r) const {
        if (r == 0) return -std::numeric_limits<double>::infinity();
        if (!prime_) return cubicpcf::log_abs(r);
        return -double(valuation(r, *prime_)) * std::log(prime_->get_d());
    }

private:
    std::optional<BigInt> prime_;
};

struct GreenValue {
    double value = 0.0;
    double error = 0.0;  ///< certified bound on |value - G|
    Place place;
    int steps = 0;
    // Finite places only: G = log_multiple * log(q) / 3^three_power exactly.
    std::int64_t log_multiple = 0;
    int three_power = 0;
};

/// Archimedean tolerance not met within the step budget.
class ToleranceUnreachable : public NumericalError {
public:
    ToleranceUnreachable(const std::string& msg, double best, double achieved)
        : NumericalError(msg), best_value(best), achieved_error(achieved) {}
    double best_value;
    double achieved_error;
};

struct ArchOptions {
    int max_steps = 200;
};

/// One Cauchy step: increment = G_{n+1} - G_n and the bound it must obey.
struct GreenStep {
    int n = 0;
    double increment = 0.0;
    double bound = 0.0;
    bool escaped = false;  ///< |c_n| >= M branch
};

/// Radius past which |log|f(z)/z^3|| <= log 2 and below which
/// |f(z)| <= 3M^3. The last two terms are what the first bound needs.
inline double green_radius(const NumericParam& p) {
    const double a = std::abs(p.a), b = std::abs(p.b);
    return std::max({escape_bound(p), 3 * a * a, b, 2.0, std::sqrt(12.0) * a, std::cbrt(4 * b)});
}

namespace detail {

// Orbit state that switches to (log|z|, z/|z|) once |z| is huge.
class ArchOrbit {
public:
    ArchOrbit(const NumericParam& p, Complex z) : p_(p), z_(z) {}

    double log_plus() const {
        if (log_mode_) return std::max(0.0, log_mag_);
        return std::max(0.0, std::log(std::abs(z_)));
    }
    double log_mag() const { return log_mode_ ? log_mag_ : std::log(std::abs(z_)); }

    void step() {
        if (!log_mode_ && std::abs(z_) > 1e60) {
            log_mode_ = true;
            log_mag_ = std::log(std::abs(z_));
            phase_ = z_ / std::abs(z_);
        }
        if (!log_mode_) {
            z_ = eval_f(p_, z_);
            return;
        }
        // f(z) = z^3 w with w = 1 - 3a^2/z^2 + b/z^3
        const Complex inv = std::exp(-log_mag_) * std::conj(phase_);
        const Complex w = 1.0 - 3.0 * p_.a * p_.a * inv * inv + p_.b * inv * inv * inv;
        log_mag_ = 3 * log_mag_ + std::log(std::abs(w));
        phase_ = phase_ * phase_ * phase_ * (w / std::abs(w));
        phase_ /= std::abs(phase_);  // cubing amplifies any drift off the unit circle
    }

private:
    NumericParam p_;
    Complex z_;
    bool log_mode_ = false;
    double log_mag_ = 0.0;
    Complex phase_ = 1.0;
};

inline double pow3(int n) { return std::pow(3.0, n); }

}  // namespace detail

/// The first `steps` Cauchy increments of G_n = log+|f^n(z)| / 3^n with
/// their branch bounds.
inline std::vector<GreenStep> green_arch_trace(const NumericParam& p, Complex z, int steps) {
    const double M = green_radius(p);
    const double big = std::log(3 * M * M * M), small = std::log(2.0);
    detail::ArchOrbit orbit(p, z);
    std::vector<GreenStep> out;
    for (int n = 0; n < steps; ++n) {
        const double lp = orbit.log_plus();
        const bool escaped = orbit.log_mag() >= std::log(M);
        orbit.step();
        GreenStep s;
        s.n = n;
        s.escaped = escaped;
        s.increment = (orbit.log_plus() - 3 * lp) / detail::pow3(n + 1);
        s.bound = (escaped ? small : big) / detail::pow3(n + 1);
        out.push_back(s);
    }
    return out;
}

/// G(z) at the archimedean place with certified error <= tol.
inline GreenValue green_arch(const NumericParam& p, Complex z, double tol, const ArchOptions& opt = {}) {
    if (!(tol > 0)) throw UsageError("green_arch: tol must be positive");
    const double M = green_radius(p);
    const double big = std::log(3 * M * M * M), small = std::log(2.0);
    detail::ArchOrbit orbit(p, z);
    GreenValue g;
    for (int n = 0;; ++n) {
        const bool escaped = orbit.log_mag() >= std::log(M);
        g.value = orbit.log_plus() / detail::pow3(n);
        g.error = (escaped ? small : big) / (2 * detail::pow3(n));
        g.steps = n;
        if (g.error <= tol) break;
        if (n >= opt.max_steps)
            throw ToleranceUnreachable("green_arch: tolerance " + std::to_string(tol) + " not reached in " +
                                           std::to_string(opt.max_steps) + " steps",
                                       g.value, g.error);
        orbit.step();
    }
    return g;
}

struct NonarchOptions {
    int horizon = 64;  ///< base horizon; bit-size slack is added
    std::size_t bit_budget = kDefaultBitBudget;
};

/// G_q(z) for rational data, exactly: iterate until v_q(c_n) drops below
/// min(v(a), v(b)/3, 0), after which |c_{n+1}|_q = |c_n|_q^3.
inline GreenValue green_nonarch(const ExactParam& p, const Rational& z, const BigInt& q,
                                const NonarchOptions& opt = {}) {
    GreenValue g;
    g.place = Place::finite(q);
    constexpr auto inf = std::numeric_limits<std::int64_t>::max();
    const std::int64_t va = valuation(p.a, q), vb = valuation(p.b, q);
    auto past_threshold = [&](std::int64_t vc) {
        if (vc == inf || vc >= 0) return false;
        if (va != inf && vc >= va) return false;
        if (vb != inf && 3 * vc >= vb) return false;
        return true;
    };
    const bool integral_params = va >= 0 && vb >= 0;
    const int horizon = opt.horizon + static_cast<int>(bit_size(p.a) + bit_size(p.b) + bit_size(z));
    std::map<Rational, int> seen;
    Rational c = z;
    for (int n = 0; n <= horizon; ++n) {
        const std::int64_t vc = valuation(c, q);
        g.steps = n;
        if (past_threshold(vc)) {
            g.log_multiple = -vc;
            g.three_power = n;
            g.value = double(-vc) * std::log(q.get_d()) / detail::pow3(n);
            return g;
        }
        // integral orbit under integral parameters never leaves the unit ball
        if (integral_params && vc >= 0) return g;
        if (!seen.emplace(c, n).second) return g;
        c = eval_f(p, c);
        if (bit_size(c) > opt.bit_budget) throw BudgetExceeded("green_nonarch: bit budget exhausted");
    }
    throw BudgetExceeded("green_nonarch: stabilization horizon of " + std::to_string(horizon) +
                         " iterations exhausted at q = " + q.get_str());
}

struct HeightOptions {
    ArchOptions arch;
    NonarchOptions nonarch;
    int preperiodic_steps = 64;
    std::size_t preperiodic_bits = std::size_t{1} << 16;
};

struct HeightValue {
    double value = 0.0;
    double error = 0.0;
    bool preperiodic = false;  ///< exact cycle found; value is exactly 0
    std::vector<GreenValue> local;
};

/// Canonical height of z over Q (N_v = 1): G_inf(z) + sum_q G_q(z) over the
/// primes dividing a, b or z.
inline HeightValue canonical_height(const ExactParam& p, const Rational& z, double tol,
                                    const HeightOptions& opt = {}) {
    if (!(tol > 0)) throw UsageError("canonical_height: tol must be positive");
    HeightValue h;
    if (is_preperiodic(is_preperiodic_exact(p, z, opt.preperiodic_steps, opt.preperiodic_bits))) {
        h.preperiodic = true;
        return h;
    }
    GreenValue ginf = green_arch(to_numeric(p), Complex(z.get_d(), 0), tol, opt.arch);
    h.value = ginf.value;
    h.error = ginf.error;
    h.local.push_back(ginf);
    for (const auto& q : prime_support({p.a, p.b, z})) {
        GreenValue gq = green_nonarch(p, z, q, opt.nonarch);
        h.value += gq.value;
        h.local.push_back(gq);
    }
    return h;
}

/// h(+a) + h(-a), each computed to tol/2.
inline HeightValue critical_height(const ExactParam& p, double tol, const HeightOptions& opt = {}) {
    if (!(tol > 0)) throw UsageError("critical_height: tol must be positive");
    HeightValue plus = canonical_height(p, p.a, tol / 2, opt);
    HeightValue minus = canonical_height(p, Rational(-p.a), tol / 2, opt);
    HeightValue h;
    h.value = plus.value + minus.value;
    h.error = plus.error + minus.error;
    h.preperiodic = plus.preperiodic && minus.preperiodic;
    h.local = plus.local;
    h.local.insert(h.local.end(), minus.local.begin(), minus.local.end());
    return h;
}

/// G^sign(a(t), b(t)) at the archimedean place.
inline GreenValue green_on_curve(const ParamCurve& C, Complex t, Sign sign, double tol,
                                 const ArchOptions& opt = {}) {
    const NumericParam p = C.eval(t);
    return green_arch(p, critical_point(p, sign), tol, opt);
}

}  // namespace cubicpcf
