#pragma once

// Preperiodic parameters on a parametrized curve, the bifurcation density
// as a discrete Laplacian of the escape rate, their comparison, and CSV/SVG
// export.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "heights.hpp"
#include "laurent.hpp"
#include "roots.hpp"

namespace cubicpcf {

struct Window {
    double re_min = -2, re_max = 2, im_min = -2, im_max = 2;

    bool contains(Complex t) const {
        return t.real() >= re_min && t.real() <= re_max && t.imag() >= im_min && t.imag() <= im_max;
    }
    void validate() const {
        if (!(re_min < re_max && im_min < im_max)) throw UsageError("window: empty rectangle");
    }
};

struct ParamRootSet {
    int n = 0, m = 0;
    Sign sign = Sign::Plus;
    int degree = 0;                       ///< degree of the cleared numerator
    std::vector<ComplexPoint> roots;      ///< accepted, in the window; tol holds the residual
    std::vector<ComplexPoint> rejected;   ///< failed the residual test
    int outside_window = 0;
    double acceptance = 0.0;              ///< residual threshold used
};

struct RootOptions {
    double residual_scale = 1e-10;  ///< acceptance = residual_scale * degree
    AberthOptions aberth;
};

namespace detail {

// Cleared numerators: a = A/E, b = B/E with a common denominator E.
struct ClearedCurve {
    UniPoly A, B, E;
};

inline ClearedCurve clear_curve(const ParamCurve& C) {
    const UniPoly g = gcd(C.a.den, C.b.den);
    const UniPoly E = C.a.den * C.b.den.exact_div(g);
    return {C.a.num * E.exact_div(C.a.den), C.b.num * E.exact_div(C.b.den), E};
}

/// Numerator of c_n - c_m over the common denominator E^{3^n}.
inline UniPoly relation_numerator(const ClearedCurve& cc, Sign sign, int n, int m) {
    // c_k = P_k / E^{3^k}
    UniPoly P = sign == Sign::Plus ? cc.A : -cc.A;
    UniPoly Pm = m == 0 ? P : UniPoly{};
    const UniPoly A2x3 = cc.A * cc.A * Rational(3);
    std::size_t e = 1;
    for (int k = 0; k < n; ++k) {
        const UniPoly E2 = cc.E.pow(static_cast<unsigned>(2 * e - 2));
        UniPoly next = P * P * P - A2x3 * P * E2 + cc.B * E2 * cc.E.pow(static_cast<unsigned>(e + 1));
        P = std::move(next);
        e *= 3;
        if (k + 1 == m) Pm = P;
    }
    std::size_t em = 1;
    for (int k = 0; k < m; ++k) em *= 3;
    return P - Pm * cc.E.pow(static_cast<unsigned>(e - em));
}

/// Numeric c_n - c_m on a curve and its logarithmic derivative, with a
/// switch to (1/c, c'/c) once c is too large for doubles.
class OrbitRelation {
public:
    OrbitRelation(const ParamCurve& C, Sign sign, int n, int m)
        : C_(C), sign_(sign), n_(n), m_(m),
          da_num_(C.a.num.derivative()), da_den_(C.a.den.derivative()),
          db_num_(C.b.num.derivative()), db_den_(C.b.den.derivative()) {}

    struct Result {
        Complex value;         ///< c_n - c_m (infinite once in log mode)
        Complex log_deriv;     ///< (c_n - c_m)' / (c_n - c_m)
        bool overflow = false;
    };

    Result operator()(Complex t) const {
        auto rf = [&](const RationalFunction& f, const UniPoly& dnum, const UniPoly& dden) {
            const Complex n = f.num.eval(t), d = f.den.eval(t);
            return std::pair<Complex, Complex>{n / d, (dnum.eval(t) * d - n * dden.eval(t)) / (d * d)};
        };
        const auto [a, da] = rf(C_.a, da_num_, da_den_);
        const auto [b, db] = rf(C_.b, db_num_, db_den_);
        Complex c = sign_ == Sign::Plus ? a : -a, dc = sign_ == Sign::Plus ? da : -da;
        Complex cm = c, dcm = dc;
        bool log_mode = false, m_in_log = false;
        Complex u = 0, L = 0;  // 1/c and c'/c in log mode
        for (int k = 0; k < n_; ++k) {
            if (!log_mode && std::abs(c) > 1e60) {
                log_mode = true;
                u = 1.0 / c;
                L = dc / c;
            }
            if (!log_mode) {
                const Complex next = c * c * c - 3.0 * a * a * c + b;
                dc = 3.0 * c * c * dc - 6.0 * a * da * c - 3.0 * a * a * dc + db;
                c = next;
            } else {
                const Complex du = -u * L;
                const Complex w = 1.0 - 3.0 * a * a * u * u + b * u * u * u;
                const Complex dw = -6.0 * a * da * u * u - 6.0 * a * a * u * du + db * u * u * u + 3.0 * b * u * u * du;
                u = u * u * u / w;
                L = 3.0 * L + dw / w;
            }
            if (k + 1 == m_) {
                if (log_mode) {
                    m_in_log = true;
                } else {
                    cm = c;
                    dcm = dc;
                }
            }
        }
        Result r;
        if (!log_mode) {
            r.value = c - cm;
            r.log_deriv = (dc - dcm) / r.value;
            return r;
        }
        r.overflow = true;
        r.value = Complex(std::numeric_limits<double>::infinity(), 0);
        // (c_n - c_m)'/(c_n - c_m) = (L - c_m' u)/(1 - c_m u); c_m is negligible when it overflowed too
        r.log_deriv = m_in_log ? L : (L - dcm * u) / (1.0 - cm * u);
        return r;
    }

private:
    ParamCurve C_;
    Sign sign_;
    int n_, m_;
    UniPoly da_num_, da_den_, db_num_, db_den_;
};

}  // namespace detail

/// Roots of the cleared numerator of c_n(t) - c_m(t) lying in the window.
inline ParamRootSet preperiodic_params(const ParamCurve& C, Sign sign, int n, int m, const Window& window,
                                       const RootOptions& opt = {}) {
    if (!(n > m && m >= 0)) throw UsageError("preperiodic_params: need n > m >= 0");
    window.validate();
    const detail::ClearedCurve cc = detail::clear_curve(C);
    const UniPoly N = detail::relation_numerator(cc, sign, n, m);
    if (N.is_zero())
        throw IdenticallyZero("c_" + std::to_string(n) + " - c_" + std::to_string(m) +
                              " vanishes identically on the curve: the critical point is persistently preperiodic");
    ParamRootSet rs;
    rs.n = n;
    rs.m = m;
    rs.sign = sign;
    rs.degree = N.degree();
    rs.acceptance = opt.residual_scale * std::max(1, rs.degree);
    if (rs.degree <= 0) return rs;

    const detail::OrbitRelation rel(C, sign, n, m);
    const UniPoly dE = cc.E.derivative();
    double scale_n = 1;
    for (int k = 0; k < n; ++k) scale_n *= 3;
    auto ratio = [&](Complex t) -> Complex {
        const Complex Et = cc.E.eval(t);
        if (std::abs(Et) == 0) return Complex(0);
        const auto r = rel(t);
        if (!r.overflow && r.value == Complex(0)) return 0;
        const Complex ld = scale_n * dE.eval(t) / Et + r.log_deriv;
        return 1.0 / ld;
    };
    AberthResult ar = aberth(newton_polygon_start(N.log_abs_coeffs()), ratio, opt.aberth);
    for (auto& t : ar.roots)
        for (int k = 0; k < 4; ++k) {
            const Complex s = ratio(t);
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) break;
            t -= s;
        }
    std::sort(ar.roots.begin(), ar.roots.end(), [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    // scale of |E| for spotting roots of the denominator
    double emag = 0;
    for (const auto& c : cc.E.coeffs()) emag = std::max(emag, std::fabs(c.get_d()));
    for (const Complex t : ar.roots) {
        if (cc.E.degree() > 0 && std::abs(cc.E.eval(t)) <= 1e-10 * emag) continue;
        if (!window.contains(t)) {
            ++rs.outside_window;
            continue;
        }
        const auto r = rel(t);
        const double res = r.overflow ? std::numeric_limits<double>::infinity() : std::abs(r.value);
        (res <= rs.acceptance ? rs.roots : rs.rejected).push_back({t, res});
    }
    return rs;
}

struct MeasureGrid {
    Window window;
    int nx = 0, ny = 0;
    std::vector<double> density;  ///< normalized cell masses, row-major (j * nx + i)
    std::vector<bool> masked;
    double raw_mass = 0.0;        ///< positive Laplacian mass before normalization
    double clipped_mass = 0.0;    ///< negative mass removed

    double dx() const { return (window.re_max - window.re_min) / nx; }
    double dy() const { return (window.im_max - window.im_min) / ny; }
    Complex center(int i, int j) const {
        return {window.re_min + (i + 0.5) * dx(), window.im_min + (j + 0.5) * dy()};
    }
};

struct DensityOptions {
    double max_clipped_fraction = 0.05;
    double mask_radius_cells = 10.0;
    ArchOptions arch;
};

/// Normalized dd^c G^sign on the window: 5-point Laplacian of G on cell
/// centers, negatives clipped, disks around finite punctures masked.
inline MeasureGrid bifurcation_density(const ParamCurve& C, Sign sign, const Window& window, int nx, int ny,
                                       double tol, const DensityOptions& opt = {}) {
    window.validate();
    if (nx < 1 || ny < 1) throw UsageError("bifurcation_density: resolution must be positive");
    MeasureGrid g;
    g.window = window;
    g.nx = nx;
    g.ny = ny;
    const double hx = g.dx(), hy = g.dy();
    std::vector<Complex> poles;
    for (const auto& p : curve_punctures(C))
        if (!p.at_infinity) poles.emplace_back(p.t0.get_d(), 0);
    const double mask_r = opt.mask_radius_cells * std::max(hx, hy);

    // G on the grid extended by one cell on every side; NaN marks a pole
    const int ex = nx + 2, ey = ny + 2;
    std::vector<double> G(static_cast<std::size_t>(ex) * ey);
    for (int j = 0; j < ey; ++j)
        for (int i = 0; i < ex; ++i) {
            const Complex t = g.center(i - 1, j - 1);
            double v;
            try {
                v = green_on_curve(C, t, sign, tol, opt.arch).value;
            } catch (const DomainError&) {
                v = std::numeric_limits<double>::quiet_NaN();
            }
            G[static_cast<std::size_t>(j) * ex + i] = v;
        }
    auto at = [&](int i, int j) { return G[static_cast<std::size_t>(j + 1) * ex + (i + 1)]; };
    g.density.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    g.masked.assign(static_cast<std::size_t>(nx) * ny, false);
    double pos = 0, neg = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t idx = static_cast<std::size_t>(j) * nx + i;
            const Complex t = g.center(i, j);
            bool mask = std::any_of(poles.begin(), poles.end(), [&](Complex p) { return std::abs(t - p) <= mask_r; });
            const double c = at(i, j), l = at(i - 1, j), r = at(i + 1, j), d = at(i, j - 1), u = at(i, j + 1);
            if (std::isnan(c) || std::isnan(l) || std::isnan(r) || std::isnan(d) || std::isnan(u)) mask = true;
            if (mask) {
                g.masked[idx] = true;
                continue;
            }
            const double lap = (l + r - 2 * c) / (hx * hx) + (d + u - 2 * c) / (hy * hy);
            const double mass = lap * hx * hy;
            if (mass >= 0) {
                g.density[idx] = mass;
                pos += mass;
            } else {
                neg -= mass;
            }
        }
    g.raw_mass = pos;
    g.clipped_mass = neg;
    if (pos <= 0) throw NumericalError("bifurcation_density: no positive mass in the window");
    if (neg > opt.max_clipped_fraction * pos)
        throw NumericalError("bifurcation_density: clipped negative mass " + std::to_string(neg / pos) +
                             " of total exceeds the limit; refine the resolution or tighten tol");
    for (auto& v : g.density) v /= pos;
    return g;
}

/// Total variation between the empirical root measure and the grid measure
/// aggregated over a px x py partition of the window; masked cells and the
/// roots inside them are left out of both.
inline double compare_measures(const ParamRootSet& roots, const MeasureGrid& grid, int px = 8, int py = 8) {
    if (px < 1 || py < 1) throw UsageError("compare_measures: partition must be positive");
    const Window& w = grid.window;
    std::vector<double> p(static_cast<std::size_t>(px) * py, 0.0), q(p.size(), 0.0);
    auto box = [&](Complex t) {
        int bi = static_cast<int>((t.real() - w.re_min) / (w.re_max - w.re_min) * px);
        int bj = static_cast<int>((t.imag() - w.im_min) / (w.im_max - w.im_min) * py);
        return static_cast<std::size_t>(std::clamp(bj, 0, py - 1)) * px + std::clamp(bi, 0, px - 1);
    };
    auto cell_masked = [&](Complex t) {
        int i = static_cast<int>((t.real() - w.re_min) / grid.dx());
        int j = static_cast<int>((t.imag() - w.im_min) / grid.dy());
        i = std::clamp(i, 0, grid.nx - 1);
        j = std::clamp(j, 0, grid.ny - 1);
        return grid.masked[static_cast<std::size_t>(j) * grid.nx + i];
    };
    double np = 0;
    for (const auto& r : roots.roots) {
        if (!w.contains(r.value) || cell_masked(r.value)) continue;
        p[box(r.value)] += 1;
        np += 1;
    }
    if (np == 0) throw UsageError("compare_measures: no roots in the window");
    double nq = 0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double v = grid.density[static_cast<std::size_t>(j) * grid.nx + i];
            q[box(grid.center(i, j))] += v;
            nq += v;
        }
    double tv = 0;
    for (std::size_t k = 0; k < p.size(); ++k) tv += std::fabs(p[k] / np - (nq > 0 ? q[k] / nq : 0.0));
    return tv / 2;
}

/// "# key=value" lines that open every exported file.
using Metadata = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_metadata(std::ostream& os, const Metadata& meta, const char* prefix) {
    for (const auto& [k, v] : meta) os << prefix << k << "=" << v << "\n";
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace detail

inline std::string roots_csv(const ParamRootSet& rs, const Metadata& meta = {}) {
    std::ostringstream os;
    detail::write_metadata(os, meta, "# ");
    os << "re,im,residual\n";
    for (const auto& r : rs.roots)
        os << detail::fmt17(r.value.real()) << "," << detail::fmt17(r.value.imag()) << "," << detail::fmt17(r.tol)
           << "\n";
    return os.str();
}

inline std::string grid_csv(const MeasureGrid& g, const Metadata& meta = {}) {
    std::ostringstream os;
    detail::write_metadata(os, meta, "# ");
    os << "x,y,density\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Complex c = g.center(i, j);
            os << detail::fmt17(c.real()) << "," << detail::fmt17(c.imag()) << ","
               << detail::fmt17(g.density[static_cast<std::size_t>(j) * g.nx + i]) << "\n";
        }
    return os.str();
}

/// Self-contained SVG: one rect per grid cell, one circle per root.
inline std::string density_svg(const MeasureGrid& g, const ParamRootSet* roots = nullptr, const Metadata& meta = {},
                               int pixels = 512) {
    std::ostringstream os;
    const double cw = double(pixels) / g.nx, ch = double(pixels) / g.ny;
    double mx = 0;
    for (double v : g.density) mx = std::max(mx, v);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels
       << "\" viewBox=\"0 0 " << pixels << " " << pixels << "\">\n";
    if (!meta.empty()) {
        os << "<!--\n";
        detail::write_metadata(os, meta, "");
        os << "-->\n";
    }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = g.density[static_cast<std::size_t>(j) * g.nx + i];
            // sqrt stretch so thin boundary mass stays visible
            const int shade = 255 - static_cast<int>(std::lround(255 * (mx > 0 ? std::sqrt(v / mx) : 0)));
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "<rect class=\"cell\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" "
                          "fill=\"rgb(%d,%d,255)\"/>\n",
                          i * cw, (g.ny - 1 - j) * ch, cw, ch, shade, shade);
            os << buf;
        }
    if (roots) {
        const Window& w = g.window;
        for (const auto& r : roots->roots) {
            if (!w.contains(r.value)) continue;
            const double x = (r.value.real() - w.re_min) / (w.re_max - w.re_min) * pixels;
            const double y = (w.im_max - r.value.imag()) / (w.im_max - w.im_min) * pixels;
            char buf[120];
            std::snprintf(buf, sizeof buf, "<circle class=\"root\" cx=\"%.3f\" cy=\"%.3f\" r=\"1.5\" fill=\"red\"/>\n", x, y);
            os << buf;
        }
    }
    os << "</svg>\n";
    return os.str();
}

inline void export_csv(const std::string& path, const ParamRootSet& rs, const Metadata& meta = {}) {
    detail::write_file(path, roots_csv(rs, meta));
}
inline void export_csv(const std::string& path, const MeasureGrid& g, const Metadata& meta = {}) {
    detail::write_file(path, grid_csv(g, meta));
}
inline void export_svg(const std::string& path, const MeasureGrid& g, const ParamRootSet* roots = nullptr,
                       const Metadata& meta = {}) {
    detail::write_file(path, density_svg(g, roots, meta));
}

}  // namespace cubicpcf
