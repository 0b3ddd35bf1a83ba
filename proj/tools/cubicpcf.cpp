// cubicpcf: one subcommand per library module.
//
// Exit codes: 0 ok, 1 internal, 2 usage, 3 budget, 4 numerical, 5 I/O,
// 6 relation identically zero on the curve.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "cubicpcf/boettcher.hpp"
#include "cubicpcf/curve.hpp"
#include "cubicpcf/dynamics.hpp"
#include "cubicpcf/equidist.hpp"
#include "cubicpcf/heights.hpp"
#include "cubicpcf/laurent.hpp"
#include "cubicpcf/parse.hpp"
#include "cubicpcf/special_curves.hpp"

using namespace cubicpcf;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "cubicpcf 0.1.0";

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt(Complex z) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

Metadata metadata(const json& config) { return {{"tool", kToolVersion}, {"config", config.dump()}}; }

std::string header(const json& config) {
    std::ostringstream os;
    for (const auto& [k, v] : metadata(config)) os << "# " << k << "=" << v << "\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

// Scalar given either as an exact rational or as a complex decimal.
struct Scalar {
    bool exact = true;
    Rational q;
    Complex z;
};

Scalar parse_scalar(const std::string& s) {
    Scalar v;
    try {
        v.q = parse_rational(s);
        v.z = Complex(v.q.get_d(), 0);
    } catch (const UsageError&) {
        v.exact = false;
        v.z = parse_complex(s);
    }
    return v;
}

struct Common {
    std::uint64_t seed = 0;
};

// ---- orbit ----

struct OrbitArgs {
    std::string a, b, sign = "+", out;
    int steps = 10;
    std::size_t bit_budget = kDefaultBitBudget;
};

int cmd_orbit(const OrbitArgs& o, const Common& c) {
    const json config = {{"subcommand", "orbit"}, {"a", o.a}, {"b", o.b}, {"sign", o.sign}, {"steps", o.steps},
                         {"bit_budget", o.bit_budget}, {"seed", c.seed}};
    const Sign sign = parse_sign(o.sign);
    const Scalar a = parse_scalar(o.a), b = parse_scalar(o.b);
    std::ostringstream rows;
    rows << "k,c_k\n";
    if (a.exact && b.exact) {
        const auto orbit = critical_orbit(ExactParam{a.q, b.q}, sign, o.steps, o.bit_budget);
        for (std::size_t k = 0; k < orbit.size(); ++k) rows << k << "," << to_string(orbit[k]) << "\n";
    } else {
        const auto orbit = critical_orbit(NumericParam{a.z, b.z}, sign, o.steps);
        for (std::size_t k = 0; k < orbit.size(); ++k) rows << k << "," << fmt(orbit[k]) << "\n";
    }
    std::cout << rows.str();
    if (!o.out.empty()) write_text(o.out, header(config) + rows.str());
    return 0;
}

// ---- height ----

struct HeightArgs {
    std::string a, b, z, place;
    bool critical = false;
    double tol = 1e-10;
    int max_steps = 200;
};

int cmd_height(const HeightArgs& o, const Common&) {
    if (!(o.tol > 0)) throw UsageError("--tol must be positive");
    const ExactParam p{parse_rational(o.a), parse_rational(o.b)};
    HeightOptions hopt;
    hopt.arch.max_steps = o.max_steps;
    if (o.critical) {
        if (!o.z.empty() || !o.place.empty()) throw UsageError("--critical takes neither --z nor --place");
        const HeightValue h = critical_height(p, o.tol, hopt);
        std::cout << "critical_height=" << fmt(h.value) << "\nerror=" << fmt(h.error)
                  << "\npcf=" << (h.preperiodic ? "yes" : "no") << "\n";
        return 0;
    }
    if (o.z.empty()) throw UsageError("--z is required unless --critical is given");
    const Rational z = parse_rational(o.z);
    if (o.place.empty()) {
        const HeightValue h = canonical_height(p, z, o.tol, hopt);
        std::cout << "canonical_height=" << fmt(h.value) << "\nerror=" << fmt(h.error)
                  << "\npreperiodic=" << (h.preperiodic ? "yes" : "no") << "\n";
        for (const auto& g : h.local) std::cout << "local[" << g.place.name() << "]=" << fmt(g.value) << "\n";
    } else if (o.place == "inf") {
        const GreenValue g = green_arch(to_numeric(p), Complex(z.get_d(), 0), o.tol, hopt.arch);
        std::cout << "green[inf]=" << fmt(g.value) << "\nerror=" << fmt(g.error) << "\nsteps=" << g.steps << "\n";
    } else {
        const Rational qr = parse_rational(o.place);
        if (qr.get_den() != 1) throw UsageError("--place must be inf or a prime");
        const BigInt q = Place::finite(qr.get_num()).prime();
        const GreenValue g = green_nonarch(p, z, q, hopt.nonarch);
        std::cout << "green[" << q.get_str() << "]=" << fmt(g.value) << "\nexact=" << g.log_multiple << "*log("
                  << q.get_str() << ")/3^" << g.three_power << "\n";
    }
    return 0;
}

// ---- curve ----

struct CurveArgs {
    std::string kind, out;
    int n = 0, m = 0, degree_cap = kDefaultOrbitDegreeCap;
};

int cmd_curve(const CurveArgs& o, const Common& c) {
    const json config = {{"subcommand", "curve"}, {"kind", o.kind}, {"n", o.n},  {"m", o.m},
                         {"degree_cap", o.degree_cap}, {"seed", c.seed}};
    RelationKind k{parse_relation_kind(o.kind), o.n, o.m};
    const BivarPoly p = relation_poly(k, o.degree_cap);
    std::cout << to_string(k) << ": " << p.pretty() << "\n";
    if (!o.out.empty()) write_text(o.out, header(config) + p.to_text());
    return 0;
}

// ---- pcf ----

struct PcfArgs {
    std::string k1, k2, a, b, out;
    bool certify = false;
    int N = 6;
    double tol = 1e-8;
};

int cmd_pcf(const PcfArgs& o, const Common& c) {
    if (o.certify) {
        if (o.a.empty() || o.b.empty()) throw UsageError("--certify needs --a and --b");
        const ExactParam p{parse_rational(o.a), parse_rational(o.b)};
        const SpecialCurveHit hit = check_point_on_special_curve(p, o.N);
        std::cout << "relation=" << (hit.relation ? to_string(*hit.relation) : "none") << "\n";
        std::cout << "b_zero_line=" << (hit.on_b_zero_line ? "yes" : "no") << "\n";
        for (Sign s : {Sign::Plus, Sign::Minus}) {
            const auto v = is_preperiodic_exact(p, critical_point(p, s), 64);
            std::cout << "preperiodic[" << sign_char(s) << "]=";
            if (const auto* t = std::get_if<OrbitTail>(&v))
                std::cout << "yes preperiod=" << t->preperiod << " period=" << t->period << "\n";
            else if (std::holds_alternative<Escaping>(v))
                std::cout << "no escaping\n";
            else
                std::cout << "undecided\n";
        }
        return 0;
    }
    if (o.k1.empty() || o.k2.empty()) throw UsageError("pcf needs --k1 and --k2, or --certify");
    const json config = {{"subcommand", "pcf"}, {"k1", o.k1}, {"k2", o.k2}, {"tol", o.tol}, {"seed", c.seed}};
    PcfOptions popt;
    popt.certify_tol = o.tol;
    const PcfSearch s = pcf_candidates(parse_relation(o.k1), parse_relation(o.k2), popt);
    std::ostringstream rows;
    rows << "a,b,residual_first,residual_second,certified,exact\n";
    for (const auto& cand : s.candidates)
        rows << fmt(cand.a) << "," << fmt(cand.b) << "," << fmt(cand.residual_first) << ","
             << fmt(cand.residual_second) << "," << (cand.certified ? "yes" : "no") << ","
             << (cand.exact ? to_string(cand.exact->a) + " " + to_string(cand.exact->b) : "") << "\n";
    std::cout << rows.str();
    std::cout << "# common_component=" << (s.common_component ? "yes" : "no") << " unconverged=" << s.unconverged
              << "\n";
    if (!o.out.empty()) write_text(o.out, header(config) + rows.str());
    return 0;
}

// ---- laurent ----

struct LaurentArgs {
    std::string curve, puncture, sign = "+";
    int divisor = -1, growth = -1, terms = kDefaultSeriesTerms;
};

std::string join(const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// pole order, with the identically-zero sentinel shown as -inf
std::string order(std::int64_t g) { return g <= -LaurentSeries::kExact / 2 ? "-inf" : std::to_string(g); }

int cmd_laurent(const LaurentArgs& o, const Common&) {
    const ParamCurve C = read_curve_file(o.curve);
    const Sign sign = parse_sign(o.sign);
    ClassifyOptions copt;
    copt.terms = static_cast<std::size_t>(o.terms);
    std::vector<Puncture> ps;
    if (o.puncture.empty())
        ps = curve_punctures(C);
    else
        ps.push_back(parse_puncture(o.puncture));
    for (const auto& p : ps) {
        const LocalParam lp = expand_curve(C, p, copt.terms);
        const PunctureClass pc = classify_puncture(lp.a, lp.b, sign, copt);
        std::cout << "puncture=" << to_string(p) << " class=" << to_string(pc.kind) << " gamma_a=" << order(pc.gamma_a)
                  << " gamma_b=" << order(pc.gamma_b) << " gamma_max=" << order(pc.gamma_max);
        if (pc.kind == PunctureClass::GoodPole) std::cout << " n0=" << pc.n0;
        std::cout << " gammas=" << join(pc.gammas) << "\n";
    }
    if (o.divisor >= 0) {
        const Divisor d = divisor_Dn(C, sign, o.divisor, copt);
        std::cout << "D_" << o.divisor << "=";
        bool first = true;
        for (const auto& [p, mult] : d) {
            std::cout << (first ? "" : " ") << to_string(p) << ":" << mult;
            first = false;
        }
        std::cout << "\ndegree=" << degree(d) << "\n";
        if (o.growth >= 0)
            std::cout << "growth(i=" << o.growth << ")="
                      << (check_divisor_growth(C, sign, o.divisor, o.growth, copt) ? "holds" : "fails") << "\n";
    } else if (o.growth >= 0) {
        throw UsageError("--growth needs --divisor");
    }
    return 0;
}

// ---- boettcher ----

struct BoettcherArgs {
    int order = 0, power = 0, n = 2, deg_plus = 1, deg_minus = 1;
    std::string zeta, puncture = "inf", out;
};

int cmd_boettcher(const BoettcherArgs& o, const Common& c) {
    const int modes = (o.order > 0) + (o.power > 0) + !o.zeta.empty();
    if (modes != 1) throw UsageError("boettcher: give exactly one of --order, --power, --zeta");
    if (o.order > 0) {
        const json config = {{"subcommand", "boettcher"}, {"order", o.order}, {"seed", c.seed}};
        const BoettcherExpansion e = boettcher_coeffs(o.order);
        for (int i = 1; i <= o.order; ++i) std::cout << "alpha_" << i << " = " << e.alpha[i - 1].pretty() << "\n";
        const auto r = functional_equation_residual(e);
        std::cout << "residual_order=" << (r ? std::to_string(*r) : "none") << "\n";
        if (!o.out.empty()) {
            std::ostringstream os;
            e.write(os);
            write_text(o.out, header(config) + os.str());
        }
        return 0;
    }
    if (o.power > 0) {
        const int N = std::max(o.power + 2, 12);
        const PhiPower pk = phi_power(o.power, N);
        for (int j = o.power; j >= 0; --j) std::cout << "z^" << j << ": " << pk.poly_part[j].pretty() << "\n";
        for (std::size_t i = 0; i < pk.tail.size() && i < 4; ++i)
            std::cout << "z^-" << i + 1 << ": " << pk.tail[i].pretty() << "\n";
        return 0;
    }
    const ParamCurve C = read_curve_file(o.zeta);
    const ZetaReport z = zeta_limit(C, parse_puncture(o.puncture), o.n, o.deg_plus, o.deg_minus);
    std::cout << "zeta=" << to_string(z.zeta) << "\nroot_of_unity=" << (z.root_of_unity ? "yes" : "no")
              << "\nabs_deviation=" << fmt(z.abs_deviation) << "\ncandidate_order=" << z.candidate_order << "\n";
    return 0;
}

// ---- equidist ----

struct EquidistArgs {
    std::string curve, sign = "+", depths = "4,6", window = "-2,2,-2,2", out;
    int m = 0, resolution = 128, partition = 8;
    double tol = 1e-10, noise = 0.05;
    bool svg = false;
};

int cmd_equidist(const EquidistArgs& o, const Common& c) {
    const ParamCurve C = read_curve_file(o.curve);
    const Sign sign = parse_sign(o.sign);
    const std::vector<int> depths = parse_int_list(o.depths);
    const Window w = parse_window(o.window);
    if (o.resolution < 2 || o.partition < 1) throw UsageError("--resolution must be >= 2 and --partition >= 1");
    const json config = {{"subcommand", "equidist"},
                         {"curve", curve_to_json(C)},
                         {"sign", std::string(1, sign_char(sign))},
                         {"depths", depths},
                         {"m", o.m},
                         {"window", {w.re_min, w.re_max, w.im_min, w.im_max}},
                         {"resolution", o.resolution},
                         {"partition", o.partition},
                         {"tol", o.tol},
                         {"noise_allowance", o.noise},
                         {"clip_limit", DensityOptions{}.max_clipped_fraction},
                         {"residual_scale", RootOptions{}.residual_scale},
                         {"seed", c.seed}};
    const Metadata meta = metadata(config);
    // roots first, so a persistent relation is reported before any grid work
    std::vector<ParamRootSet> sets;
    for (int n : depths) sets.push_back(preperiodic_params(C, sign, n, o.m, w));
    const MeasureGrid grid = bifurcation_density(C, sign, w, o.resolution, o.resolution, o.tol);
    std::cout << "# clipped_fraction=" << fmt(grid.clipped_mass / grid.raw_mass) << "\n";
    std::cout << "n,m,degree,roots,rejected,outside,tv\n";
    double prev = 2.0;
    bool monotone = true;
    ParamRootSet last;
    for (std::size_t d = 0; d < depths.size(); ++d) {
        const int n = depths[d];
        ParamRootSet& rs = sets[d];
        const double tv = compare_measures(rs, grid, o.partition, o.partition);
        std::cout << n << "," << o.m << "," << rs.degree << "," << rs.roots.size() << "," << rs.rejected.size() << ","
                  << rs.outside_window << "," << fmt(tv) << "\n";
        if (tv > prev + o.noise) monotone = false;
        prev = tv;
        if (!o.out.empty()) export_csv(o.out + "_roots_n" + std::to_string(n) + ".csv", rs, meta);
        last = std::move(rs);
    }
    std::cout << "monotone=" << (monotone ? "yes" : "no") << "\n";
    if (!o.out.empty()) {
        export_csv(o.out + "_grid.csv", grid, meta);
        if (o.svg) export_svg(o.out + ".svg", grid, &last, meta);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Critical orbits, heights, special curves and equidistribution for z^3 - 3a^2 z + b"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    Common common;
    app.add_option("--seed", common.seed, "Seed recorded in output metadata")->capture_default_str();

    OrbitArgs orbit;
    auto* so = app.add_subcommand("orbit", "Critical orbit c_0..c_steps");
    so->add_option("--a", orbit.a, "Parameter a (p/q, or re+imi for a numeric orbit)")->required();
    so->add_option("--b", orbit.b, "Parameter b")->required();
    so->add_option("--sign", orbit.sign, "Critical point +a or -a")->capture_default_str();
    so->add_option("--steps", orbit.steps)->capture_default_str()->check(CLI::NonNegativeNumber);
    so->add_option("--bit-budget", orbit.bit_budget)->capture_default_str();
    so->add_option("--out", orbit.out, "CSV output path");

    HeightArgs height;
    auto* sh = app.add_subcommand("height", "Canonical, critical or local heights");
    sh->add_option("--a", height.a)->required();
    sh->add_option("--b", height.b)->required();
    sh->add_option("--z", height.z, "Start point (rational)");
    sh->add_flag("--critical", height.critical, "Critical height h(+a) + h(-a)");
    sh->add_option("--place", height.place, "inf or a prime; omitted means the global height");
    sh->add_option("--tol", height.tol)->capture_default_str();
    sh->add_option("--max-steps", height.max_steps)->capture_default_str();

    CurveArgs curve;
    auto* sc = app.add_subcommand("curve", "Relation polynomial of a special curve");
    sc->add_option("--kind", curve.kind, "I, II or III")->required();
    sc->add_option("--n", curve.n)->required();
    sc->add_option("--m", curve.m)->required();
    sc->add_option("--degree-cap", curve.degree_cap)->capture_default_str();
    sc->add_option("--out", curve.out, "Polynomial file");

    PcfArgs pcf;
    auto* sp = app.add_subcommand("pcf", "Intersect two special curves, or certify a point");
    sp->add_option("--k1", pcf.k1, "First relation, e.g. I(2,1)");
    sp->add_option("--k2", pcf.k2, "Second relation, e.g. II(2,1)");
    sp->add_flag("--certify", pcf.certify);
    sp->add_option("--a", pcf.a);
    sp->add_option("--b", pcf.b);
    sp->add_option("--N", pcf.N, "Largest orbit index searched by --certify")->capture_default_str();
    sp->add_option("--tol", pcf.tol)->capture_default_str();
    sp->add_option("--out", pcf.out, "CSV output path");

    LaurentArgs laurent;
    auto* sl = app.add_subcommand("laurent", "Pole growth at the punctures of a curve");
    sl->add_option("--curve", laurent.curve, "Curve JSON file")->required();
    sl->add_option("--puncture", laurent.puncture, "inf or p/q; default: every puncture");
    sl->add_option("--sign", laurent.sign)->capture_default_str();
    sl->add_option("--divisor", laurent.divisor, "Print the pole divisor D_n");
    sl->add_option("--growth", laurent.growth, "Check D_{n+i} = 3^i D_n");
    sl->add_option("--terms", laurent.terms)->capture_default_str();

    BoettcherArgs boett;
    auto* sb = app.add_subcommand("boettcher", "Boettcher coefficients, powers, and zeta limits");
    sb->add_option("--order", boett.order, "Print alpha_1..alpha_N");
    sb->add_option("--power", boett.power, "Print P_k and the first tail terms");
    sb->add_option("--zeta", boett.zeta, "Curve JSON file for the zeta limit");
    sb->add_option("--puncture", boett.puncture)->capture_default_str();
    sb->add_option("--n", boett.n)->capture_default_str();
    sb->add_option("--deg-plus", boett.deg_plus)->capture_default_str();
    sb->add_option("--deg-minus", boett.deg_minus)->capture_default_str();
    sb->add_option("--out", boett.out, "Coefficient file for --order");

    EquidistArgs eq;
    auto* se = app.add_subcommand("equidist", "Preperiodic parameters versus the bifurcation density");
    se->add_option("--curve", eq.curve, "Curve JSON file")->required();
    se->add_option("--sign", eq.sign)->capture_default_str();
    se->add_option("--depths", eq.depths, "Comma-separated n values")->capture_default_str();
    se->add_option("--m", eq.m)->capture_default_str();
    se->add_option("--window", eq.window, "re_min,re_max,im_min,im_max")->capture_default_str();
    se->add_option("--resolution", eq.resolution)->capture_default_str();
    se->add_option("--partition", eq.partition)->capture_default_str();
    se->add_option("--tol", eq.tol)->capture_default_str();
    se->add_option("--noise", eq.noise, "Allowed TV increase between depths")->capture_default_str();
    se->add_option("--out", eq.out, "Output prefix for CSV files");
    se->add_flag("--svg", eq.svg, "Also write <out>.svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*so) return cmd_orbit(orbit, common);
        if (*sh) return cmd_height(height, common);
        if (*sc) return cmd_curve(curve, common);
        if (*sp) return cmd_pcf(pcf, common);
        if (*sl) return cmd_laurent(laurent, common);
        if (*sb) return cmd_boettcher(boett, common);
        if (*se) return cmd_equidist(eq, common);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 5;
    } catch (const IdenticallyZero& e) {
        std::cerr << "identically zero: " << e.what() << "\n";
        return 6;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
