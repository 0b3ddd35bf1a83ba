#pragma once

// Sparse exact polynomials in (a, b) and their line-delimited text format.

#include <complex>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "upoly.hpp"

namespace cubicpcf {

enum class Var { A, B };

class BivarPoly {
public:
    using Exponent = std::pair<int, int>;  // (deg_a, deg_b)
    using TermMap = std::map<Exponent, Rational>;

    BivarPoly() = default;
    BivarPoly(const Rational& c) { add_term(0, 0, c); }  // NOLINT: constants promote

    static BivarPoly a() { return monomial(1, 1, 0); }
    static BivarPoly b() { return monomial(1, 0, 1); }
    static BivarPoly monomial(const Rational& c, int da, int db) {
        BivarPoly p;
        p.add_term(da, db, c);
        return p;
    }

    /// The polynomial sum_j coeffs[j](a) b^j.
    static BivarPoly from_b_major(const std::vector<UniPoly>& coeffs) {
        BivarPoly p;
        for (std::size_t j = 0; j < coeffs.size(); ++j)
            for (std::size_t i = 0; i < coeffs[j].size(); ++i)
                p.add_term(static_cast<int>(i), static_cast<int>(j), coeffs[j].coeff(i));
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    Rational coeff(int da, int db) const {
        auto it = terms_.find({da, db});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(int da, int db, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace({da, db}, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    int degree(Var v) const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, v == Var::A ? e.first : e.second);
        return d;
    }
    int total_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
        return d;
    }

    /// Coefficients of v^0, v^1, ... as univariate polynomials in the other variable.
    std::vector<UniPoly> coefficients_in(Var v) const {
        const int dv = degree(v);
        if (dv < 0) return {};
        std::vector<std::vector<Rational>> raw(dv + 1);
        for (const auto& [e, c] : terms_) {
            const int outer = v == Var::A ? e.first : e.second;
            const int inner = v == Var::A ? e.second : e.first;
            auto& slot = raw[outer];
            if (static_cast<int>(slot.size()) <= inner) slot.resize(inner + 1);
            slot[inner] = c;
        }
        std::vector<UniPoly> out;
        out.reserve(raw.size());
        for (auto& r : raw) out.emplace_back(std::move(r));
        return out;
    }

    friend bool operator==(const BivarPoly& p, const BivarPoly& q) { return p.terms_ == q.terms_; }
    friend bool operator!=(const BivarPoly& p, const BivarPoly& q) { return !(p == q); }

    BivarPoly& operator+=(const BivarPoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, c);
        return *this;
    }
    BivarPoly& operator-=(const BivarPoly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e.first, e.second, -c);
        return *this;
    }
    BivarPoly& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }
    friend BivarPoly operator+(BivarPoly p, const BivarPoly& q) { return p += q; }
    friend BivarPoly operator-(BivarPoly p, const BivarPoly& q) { return p -= q; }
    friend BivarPoly operator*(BivarPoly p, const Rational& s) { return p *= s; }
    friend BivarPoly operator*(const Rational& s, BivarPoly p) { return p *= s; }
    BivarPoly operator-() const { return *this * Rational(-1); }

    friend BivarPoly operator*(const BivarPoly& p, const BivarPoly& q) {
        if (p.is_zero() || q.is_zero()) return {};
        // Kronecker: pack (i, j) -> i + j * stride with stride past the product's a-degree.
        const int stride = p.degree(Var::A) + q.degree(Var::A) + 1;
        const double slots = double(stride) * (p.degree(Var::B) + q.degree(Var::B) + 2);
        const bool dense = 32.0 * double(p.term_count() + q.term_count()) >= slots;
        if (p.term_count() * q.term_count() <= 4096 || !dense) return schoolbook(p, q);
        UniPoly up = p.packed(stride), uq = q.packed(stride);
        UniPoly prod = up * uq;
        BivarPoly out;
        for (std::size_t k = 0; k < prod.size(); ++k) {
            const auto& c = prod.coeffs()[k];
            if (c != 0) out.terms_.emplace(Exponent{int(k % stride), int(k / stride)}, c);
        }
        return out;
    }
    BivarPoly& operator*=(const BivarPoly& o) { return *this = *this * o; }

    BivarPoly pow(unsigned e) const {
        BivarPoly result(Rational(1)), base = *this;
        while (e) {
            if (e & 1u) result *= base;
            e >>= 1;
            if (e) base = base * base;
        }
        return result;
    }

    BivarPoly derivative(Var v) const {
        BivarPoly d;
        for (const auto& [e, c] : terms_) {
            const int k = v == Var::A ? e.first : e.second;
            if (k == 0) continue;
            if (v == Var::A)
                d.add_term(e.first - 1, e.second, c * k);
            else
                d.add_term(e.first, e.second - 1, c * k);
        }
        return d;
    }

    Rational eval(const Rational& av, const Rational& bv) const {
        Rational acc = 0;
        const auto cols = coefficients_in(Var::B);
        for (int j = static_cast<int>(cols.size()) - 1; j >= 0; --j) acc = acc * bv + cols[j].eval(av);
        return acc;
    }

    std::complex<double> eval(std::complex<double> av, std::complex<double> bv) const {
        std::complex<double> acc = 0;
        const auto cols = coefficients_in(Var::B);
        for (int j = static_cast<int>(cols.size()) - 1; j >= 0; --j) acc = acc * bv + cols[j].eval(av);
        return acc;
    }

    /// Substitutes a fixed value for one variable.
    UniPoly specialize(Var v, const Rational& value) const {
        std::vector<Rational> out(std::max(0, degree(v == Var::A ? Var::B : Var::A)) + 1);
        for (const auto& [e, c] : terms_) {
            const int fixed = v == Var::A ? e.first : e.second;
            const int free = v == Var::A ? e.second : e.first;
            out[free] += c * power(value, fixed);
        }
        return UniPoly(std::move(out));
    }

    /// p(a(t), b(t)) for polynomial a, b.
    UniPoly compose(const UniPoly& at, const UniPoly& bt) const {
        const auto cols = coefficients_in(Var::B);
        UniPoly acc;
        for (int j = static_cast<int>(cols.size()) - 1; j >= 0; --j) {
            UniPoly inner;
            const auto& col = cols[j].coeffs();
            for (int i = static_cast<int>(col.size()) - 1; i >= 0; --i) inner = inner * at + UniPoly::constant(col[i]);
            acc = acc * bt + inner;
        }
        return acc;
    }

    /// Canonical record text: header line, then "deg_a deg_b p/q" per term.
    void write(std::ostream& os) const {
        os << "vars: a b\n";
        for (const auto& [e, c] : terms_) os << e.first << ' ' << e.second << ' ' << to_string(c) << '\n';
    }
    std::string to_text() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }

    /// Parses the format produced by write(); lines starting with '#' are metadata.
    static BivarPoly read(std::istream& is) {
        std::string line;
        bool header = false;
        BivarPoly p;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            if (!header) {
                if (line != "vars: a b") throw UsageError("polynomial file: expected header 'vars: a b'");
                header = true;
                continue;
            }
            if (line.rfind("alpha ", 0) == 0) break;
            std::istringstream ls(line);
            int da, db;
            std::string coeff, extra;
            if (!(ls >> da >> db >> coeff) || (ls >> extra) || da < 0 || db < 0)
                throw UsageError("polynomial file: malformed record '" + line + "'");
            if (p.terms_.count({da, db})) throw UsageError("polynomial file: duplicate exponent");
            p.add_term(da, db, parse_rational(coeff));
        }
        if (!header) throw UsageError("polynomial file: missing header");
        return p;
    }
    static BivarPoly from_text(const std::string& text) {
        std::istringstream is(text);
        return read(is);
    }

    /// Human-readable form, highest a-degree first (e.g. "-2*a^3 - a + b").
    std::string pretty() const {
        if (is_zero()) return "0";
        std::string out;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            Rational mag = abs(c);
            std::string mono;
            auto var = [&](const char* name, int k) {
                if (k == 0) return;
                if (!mono.empty()) mono += "*";
                mono += name;
                if (k > 1) mono += "^" + std::to_string(k);
            };
            var("a", e.first);
            var("b", e.second);
            std::string term = mono.empty() ? to_string(mag) : (mag == 1 ? mono : to_string(mag) + "*" + mono);
            if (out.empty())
                out = (c < 0 ? "-" : "") + term;
            else
                out += (c < 0 ? " - " : " + ") + term;
        }
        return out;
    }

private:
    static Rational power(const Rational& x, int k) {
        Rational r = 1;
        for (int i = 0; i < k; ++i) r *= x;
        return r;
    }

    static BivarPoly schoolbook(const BivarPoly& p, const BivarPoly& q) {
        BivarPoly out;
        for (const auto& [e1, c1] : p.terms_)
            for (const auto& [e2, c2] : q.terms_) out.add_term(e1.first + e2.first, e1.second + e2.second, c1 * c2);
        return out;
    }

    UniPoly packed(int stride) const {
        std::vector<Rational> v(static_cast<std::size_t>(degree(Var::B) + 1) * stride);
        for (const auto& [e, c] : terms_) v[static_cast<std::size_t>(e.second) * stride + e.first] = c;
        return UniPoly(std::move(v));
    }

    TermMap terms_;
};

}  // namespace cubicpcf
