#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace cubicpcf;
using testutil::Gen;

namespace {

const Window kSquare{-2, 2, -2, 2};

ParamCurve line() { return ParamCurve::polynomial(UniPoly::x(), UniPoly{}); }

int count(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

int lines(const std::string& s) { return count(s, "\n"); }

// Aggregates a grid to a px x py partition.
std::vector<double> coarse(const MeasureGrid& g, int px, int py) {
    std::vector<double> out(static_cast<std::size_t>(px * py));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out[(j * py / g.ny) * px + i * px / g.nx] += g.density[j * g.nx + i];
    return out;
}

MeasureGrid synthetic_grid(int nx, int ny, Window w = {0, 1, 0, 1}) {
    MeasureGrid g;
    g.window = w;
    g.nx = nx;
    g.ny = ny;
    g.density.assign(static_cast<std::size_t>(nx * ny), 1.0 / (nx * ny));
    g.masked.assign(static_cast<std::size_t>(nx * ny), false);
    g.raw_mass = 1;
    return g;
}

}  // namespace

TEST(PreperiodicParams, DepthOneRoots) {
    const std::vector<Complex> want{0.0, Complex(0, std::sqrt(0.5)), Complex(0, -std::sqrt(0.5))};
    for (Sign s : {Sign::Plus, Sign::Minus}) {
        const ParamRootSet rs = preperiodic_params(line(), s, 1, 0, kSquare);
        EXPECT_EQ(rs.degree, 3);
        std::vector<Complex> got;
        for (const auto& r : rs.roots) got.push_back(r.value);
        EXPECT_LT(pairing_distance(got, want), 1e-12);
        EXPECT_TRUE(rs.rejected.empty());
    }
}

TEST(PreperiodicParams, PersistentCurveIsSignalledDistinctly) {
    const ParamCurve fixed = ParamCurve::polynomial(UniPoly::x(), UniPoly({0, 1, 0, 2}));
    EXPECT_THROW(preperiodic_params(fixed, Sign::Plus, 1, 0, kSquare), IdenticallyZero);
    EXPECT_NO_THROW(preperiodic_params(fixed, Sign::Minus, 1, 0, kSquare));
    EXPECT_THROW(preperiodic_params(line(), Sign::Plus, 1, 1, kSquare), UsageError);
    EXPECT_THROW(preperiodic_params(line(), Sign::Plus, 2, 0, Window{1, 0, 0, 1}), UsageError);
}

TEST(PreperiodicParams, WindowFiltering) {
    const ParamRootSet small = preperiodic_params(line(), Sign::Plus, 1, 0, Window{-0.1, 0.1, -0.1, 0.1});
    EXPECT_EQ(small.roots.size(), 1u);
    EXPECT_EQ(small.outside_window, 2);
}

TEST(PreperiodicParams, RootsAreAcceptedAndBounded) {
    const ParamRootSet rs = preperiodic_params(line(), Sign::Plus, 4, 0, kSquare);
    EXPECT_EQ(rs.degree, 81);
    EXPECT_EQ(rs.roots.size() + rs.rejected.size() + rs.outside_window, 81u);
    for (const auto& r : rs.roots) {
        EXPECT_LE(r.tol, rs.acceptance);
        // spot check: the critical orbit stays bounded for 200 steps
        const NumericParam p{r.value, 0};
        const double bound = escape_bound(p);
        Complex c = r.value;
        for (int k = 0; k < 200; ++k) {
            c = eval_f(p, c);
            ASSERT_LE(std::abs(c), bound) << r.value << " step " << k;
        }
    }
}

TEST(PreperiodicParams, RationalCurveSkipsPoles) {
    // a = 1/t: the cleared numerator carries powers of t that are not parameters
    ParamCurve c;
    c.a = {UniPoly::constant(1), UniPoly::x()};
    c.b = {UniPoly::constant(0), UniPoly::constant(1)};
    c.validate();
    const ParamRootSet rs = preperiodic_params(c, Sign::Plus, 2, 0, kSquare);
    for (const auto& r : rs.roots) {
        EXPECT_GT(std::abs(r.value), 1e-6);
        const NumericParam p = c.eval(r.value);
        const auto orbit_gap = eval_f(p, eval_f(p, p.a)) - p.a;
        EXPECT_LT(std::abs(orbit_gap), 1e-6 * (1 + std::pow(std::abs(p.a), 9)));
    }
}

TEST(PreperiodicParams, SignsAgreeOnTheLineBZero) {
    for (int n : {2, 4}) {
        std::vector<Complex> plus, minus;
        for (const auto& r : preperiodic_params(line(), Sign::Plus, n, 0, kSquare).roots) plus.push_back(r.value);
        for (const auto& r : preperiodic_params(line(), Sign::Minus, n, 0, kSquare).roots) minus.push_back(r.value);
        EXPECT_LT(pairing_distance(plus, minus), 1e-8) << n;
    }
}

TEST(BifurcationDensity, MassSitsOnTheBifurcationLocus) {
    const MeasureGrid g = bifurcation_density(line(), Sign::Plus, kSquare, 128, 128, 1e-10);
    double total = 0, near_zero = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = g.density[j * g.nx + i];
            EXPECT_GE(v, 0.0);
            total += v;
            if (std::abs(g.center(i, j)) < 0.1) near_zero += v;
        }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(near_zero, 0.0) << "G vanishes identically near t = 0";
    EXPECT_LE(g.clipped_mass, 0.05 * g.raw_mass);
}

TEST(BifurcationDensity, HarmonicAndFlatRegionsCarryNoMass) {
    DensityOptions loose;
    loose.max_clipped_fraction = 1.0;
    const MeasureGrid main = bifurcation_density(line(), Sign::Plus, kSquare, 32, 32, 1e-10, loose);
    const MeasureGrid far = bifurcation_density(line(), Sign::Plus, Window{3, 4, 3, 4}, 32, 32, 1e-10, loose);
    EXPECT_LT(far.raw_mass, 1e-5 * main.raw_mass);
    EXPECT_THROW(bifurcation_density(line(), Sign::Plus, Window{-0.1, 0.1, -0.1, 0.1}, 16, 16, 1e-10), NumericalError);
}

TEST(BifurcationDensity, CoarseResolutionIsRejected) {
    // too few cells across the locus leave more than 5% negative mass
    EXPECT_THROW(bifurcation_density(line(), Sign::Plus, kSquare, 64, 64, 1e-10), NumericalError);
}

TEST(BifurcationDensity, StableUnderRefinement) {
    const MeasureGrid g1 = bifurcation_density(line(), Sign::Plus, kSquare, 128, 128, 1e-10);
    const MeasureGrid g2 = bifurcation_density(line(), Sign::Plus, kSquare, 256, 256, 1e-10);
    const auto c1 = coarse(g1, 8, 8), c2 = coarse(g2, 8, 8);
    double tv = 0;
    for (std::size_t k = 0; k < c1.size(); ++k) tv += std::fabs(c1[k] - c2[k]);
    EXPECT_LT(tv / 2, 0.05);
}

TEST(BifurcationDensity, MasksFinitePunctures) {
    ParamCurve c;
    c.a = {UniPoly::constant(1), UniPoly({-1, 1})};  // a = 1/(t - 1)
    c.b = {UniPoly::constant(0), UniPoly::constant(1)};
    c.validate();
    const MeasureGrid g = bifurcation_density(c, Sign::Plus, kSquare, 128, 128, 1e-10);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (std::abs(g.center(i, j) - 1.0) <= 10 * g.dx()) {
                EXPECT_TRUE(g.masked[j * g.nx + i]);
                EXPECT_EQ(g.density[j * g.nx + i], 0.0);
            }
}

TEST(CompareMeasures, SamplesFromTheGridConverge) {
    const MeasureGrid g = bifurcation_density(line(), Sign::Plus, kSquare, 128, 128, 1e-10);
    Gen gen(601);
    std::discrete_distribution<int> pick(g.density.begin(), g.density.end());
    double prev = 1.0;
    for (int n : {100, 1000, 20000}) {
        ParamRootSet rs;
        for (int k = 0; k < n; ++k) {
            const int idx = pick(gen.engine());
            rs.roots.push_back({g.center(idx % g.nx, idx / g.nx), 0.0});
        }
        const double tv = compare_measures(rs, g);
        EXPECT_LE(tv, prev + 0.02) << n;
        prev = tv;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(CompareMeasures, DisjointSupportsAndEmptyRoots) {
    MeasureGrid g = synthetic_grid(8, 8);
    std::fill(g.density.begin(), g.density.end(), 0.0);
    g.density[0] = 1.0;
    ParamRootSet rs;
    EXPECT_THROW(compare_measures(rs, g), UsageError);
    rs.roots.push_back({Complex(0.95, 0.95), 0.0});
    EXPECT_DOUBLE_EQ(compare_measures(rs, g), 1.0);
    rs.roots[0].value = Complex(0.05, 0.05);
    EXPECT_DOUBLE_EQ(compare_measures(rs, g), 0.0);
}

TEST(Export, CsvShapes) {
    ParamRootSet rs;
    const Metadata meta{{"tool", "test"}, {"config", "{}"}};
    const std::string empty = roots_csv(rs, meta);
    EXPECT_EQ(empty, "# tool=test\n# config={}\nre,im,residual\n");
    rs.roots = {{Complex(1, 2), 1e-12}, {Complex(-0.5, 0), 0}, {Complex(0, 0.25), 3e-11}};
    const std::string three = roots_csv(rs);
    EXPECT_EQ(lines(three), 4);
    EXPECT_NE(three.find("-0.5,0,0\n"), std::string::npos);
    const MeasureGrid g = synthetic_grid(4, 3);
    const std::string grid = grid_csv(g);
    EXPECT_EQ(grid.substr(0, grid.find('\n')), "x,y,density");
    EXPECT_EQ(lines(grid), 13);
}

TEST(Export, SvgHasOneCellPerGridPoint) {
    const MeasureGrid g = synthetic_grid(64, 64);
    ParamRootSet rs;
    rs.roots = {{Complex(0.5, 0.5), 0}, {Complex(0.25, 0.75), 0}};
    const std::string svg = density_svg(g, &rs, {{"k", "v"}});
    EXPECT_EQ(count(svg, "class=\"cell\""), 4096);
    EXPECT_EQ(count(svg, "class=\"root\""), 2);
    EXPECT_EQ(svg.find("href"), std::string::npos) << "self-contained";
    EXPECT_NE(svg.find("k=v"), std::string::npos);
}

TEST(Export, FilesAndIoErrors) {
    const std::string dir = CUBICPCF_TEST_TMP;
    ParamRootSet rs;
    rs.roots = {{Complex(1, 1), 0}};
    export_csv(dir + "/equidist_roots.csv", rs);
    std::ifstream in(dir + "/equidist_roots.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), roots_csv(rs));
    EXPECT_THROW(export_csv("/nonexistent-dir/x.csv", rs), IoError);
    EXPECT_THROW(export_svg("/nonexistent-dir/x.svg", synthetic_grid(2, 2)), IoError);
}
