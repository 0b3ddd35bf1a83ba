#include <gtest/gtest.h>

#include <cstdio>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

const std::string kCli = CUBICPCF_CLI_PATH;
const std::string kTmp = CUBICPCF_TEST_TMP;

struct CliResult {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr discarded and captures stdout.
CliResult run(const std::string& args) {
    CliResult r;
    const std::string cmd = "'" + kCli + "' " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string write_curve(const std::string& name, const std::string& body) {
    const std::string path = kTmp + "/" + name;
    std::ofstream(path) << body;
    return path;
}

bool has(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, OrbitOfTheBasicPcfPoint) {
    const CliResult r = run("orbit --a 1 --b 0 --sign + --steps 3");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "k,c_k\n0,1\n1,-2\n2,-2\n3,-2\n");
}

TEST(Cli, NumericOrbitAcceptsComplexInput) {
    const CliResult r = run("orbit --a 0.5+0.5i --b 0 --steps 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST(Cli, Heights) {
    CliResult r = run("height --a 1 --b 0 --critical");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has(r.out, "critical_height=0\n"));
    EXPECT_TRUE(has(r.out, "pcf=yes"));
    r = run("height --a 1 --b 1 --z 1 --place inf");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has(r.out, "green[inf]=0.1089520857"));
}

TEST(Cli, CurvesAndCertification) {
    CliResult r = run("curve --kind III --n 0 --m 0");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "III(0,0): a\n");
    r = run("pcf --certify --a 1 --b 0 --N 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has(r.out, "relation=I(2,1)"));
    EXPECT_TRUE(has(r.out, "b_zero_line=yes"));
    r = run("pcf --k1 'I(2,1)' --k2 'II(2,1)'");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has(r.out, "1+0i,0+0i,0,0,yes,1 0\n"));
    EXPECT_TRUE(has(r.out, "common_component=no"));
}

TEST(Cli, LaurentAndBoettcher) {
    const std::string good = write_curve("cli_good.json", R"({"a_num":["1"],"a_den":["0","1"],"b_num":["1"],"b_den":["0","1"]})");
    CliResult r = run("laurent --curve '" + good + "' --puncture 0 --divisor 3");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has(r.out, "class=GoodPole"));
    EXPECT_TRUE(has(r.out, "D_3=0:27"));
    r = run("boettcher --order 3");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has(r.out, "alpha_1 = -a^2\nalpha_2 = 1/3*b\nalpha_3 = -a^4\n"));
    r = run("boettcher --zeta '" + good + "' --puncture 0 --n 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(has(r.out, "zeta=-1\n"));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("orbit --a 1/0x --b 0").code, 2);
    EXPECT_EQ(run("curve --kind I --n 1 --m 1").code, 2);
    EXPECT_EQ(run("orbit --b 0").code, 2) << "missing required option";
    EXPECT_EQ(run("orbit --a 7 --b 3 --steps 30 --bit-budget 200").code, 3);
    const std::string line = write_curve("cli_line.json", R"({"a_num":["0","1"],"b_num":["0"]})");
    EXPECT_EQ(run("equidist --curve '" + line + "' --depths 2 --resolution 64").code, 4);
    EXPECT_EQ(run("laurent --curve /nonexistent-dir/c.json").code, 5);
    const std::string fixed = write_curve("cli_fixed.json", R"({"a_num":["0","1"],"b_num":["0","1","0","2"]})");
    EXPECT_EQ(run("equidist --curve '" + fixed + "' --depths 1").code, 6);
}

TEST(Cli, EquidistOutputsAreByteIdentical) {
    const std::string line = write_curve("cli_line.json", R"({"a_num":["0","1"],"b_num":["0"]})");
    const std::string p1 = kTmp + "/cli_eq1", p2 = kTmp + "/cli_eq2";
    const CliResult r1 = run("equidist --curve '" + line + "' --depths 2,3 --svg --out '" + p1 + "'");
    const CliResult r2 = run("equidist --curve '" + line + "' --depths 2,3 --svg --out '" + p2 + "'");
    ASSERT_EQ(r1.code, 0);
    ASSERT_EQ(r2.code, 0);
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_TRUE(has(r1.out, "monotone=yes"));
    for (const char* suffix : {"_grid.csv", "_roots_n2.csv", "_roots_n3.csv", ".svg"}) {
        const std::string a = slurp(p1 + suffix), b = slurp(p2 + suffix);
        EXPECT_FALSE(a.empty()) << suffix;
        EXPECT_EQ(a, b) << suffix;
    }
}
