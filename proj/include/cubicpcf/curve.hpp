#pragma once

// Parametrized curves t -> (a(t), b(t)) with rational-function coordinates,
// and their JSON definition file.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "upoly.hpp"

namespace cubicpcf {

struct RationalFunction {
    UniPoly num = UniPoly::constant(0);
    UniPoly den = UniPoly::constant(1);

    bool is_constant() const { return (num.derivative() * den - num * den.derivative()).is_zero(); }

    Rational eval(const Rational& t) const {
        const Rational d = den.eval(t);
        if (d == 0) throw DomainError("rational function has a pole at t = " + to_string(t));
        return num.eval(t) / d;
    }

    Complex eval(Complex t) const {
        const Complex d = den.eval(t);
        // scale of the denominator's terms, to spot near-cancellation
        double mag = 0, tp = 1;
        for (const auto& c : den.coeffs()) {
            mag += std::fabs(c.get_d()) * tp;
            tp *= std::abs(t);
        }
        if (std::abs(d) <= 1e-14 * mag) throw DomainError("evaluation at a pole of the parametrization");
        return num.eval(t) / d;
    }
};

struct ParamCurve {
    RationalFunction a;
    RationalFunction b;

    void validate() const {
        if (a.den.is_zero() || b.den.is_zero()) throw UsageError("curve: zero denominator");
        if (a.is_constant() && b.is_constant()) throw UsageError("curve: a(t) and b(t) are both constant");
    }

    NumericParam eval(Complex t) const { return {a.eval(t), b.eval(t)}; }
    ExactParam eval(const Rational& t) const { return {a.eval(t), b.eval(t)}; }

    /// Curve with polynomial coordinates.
    static ParamCurve polynomial(UniPoly at, UniPoly bt) {
        ParamCurve c;
        c.a.num = std::move(at);
        c.b.num = std::move(bt);
        c.validate();
        return c;
    }
};

namespace detail {

inline UniPoly poly_from_json(const nlohmann::json& j, const char* field) {
    if (!j.is_array()) throw UsageError(std::string("curve file: field '") + field + "' must be a list");
    std::vector<Rational> c;
    for (const auto& e : j) {
        if (!e.is_string()) throw UsageError(std::string("curve file: '") + field + "' entries must be \"p/q\" strings");
        c.push_back(parse_rational(e.get<std::string>()));
    }
    return UniPoly(std::move(c));
}

inline nlohmann::json poly_to_json(const UniPoly& p) {
    auto arr = nlohmann::json::array();
    if (p.is_zero()) arr.push_back("0");
    for (const auto& c : p.coeffs()) arr.push_back(to_string(c));
    return arr;
}

}  // namespace detail

/// Fields a_num, a_den, b_num, b_den: lists of "p/q" strings, lowest degree
/// first. Missing denominators default to 1.
inline ParamCurve curve_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("curve file: expected a JSON object");
    for (const char* f : {"a_num", "b_num"})
        if (!j.contains(f)) throw UsageError(std::string("curve file: missing field '") + f + "'");
    ParamCurve c;
    c.a.num = detail::poly_from_json(j.at("a_num"), "a_num");
    c.b.num = detail::poly_from_json(j.at("b_num"), "b_num");
    if (j.contains("a_den")) c.a.den = detail::poly_from_json(j.at("a_den"), "a_den");
    if (j.contains("b_den")) c.b.den = detail::poly_from_json(j.at("b_den"), "b_den");
    c.validate();
    return c;
}

inline nlohmann::json curve_to_json(const ParamCurve& c) {
    return {{"a_num", detail::poly_to_json(c.a.num)},
            {"a_den", detail::poly_to_json(c.a.den)},
            {"b_num", detail::poly_to_json(c.b.num)},
            {"b_den", detail::poly_to_json(c.b.den)}};
}

inline ParamCurve read_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open curve file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("curve file '" + path + "': " + e.what());
    }
    return curve_from_json(j);
}

}  // namespace cubicpcf
