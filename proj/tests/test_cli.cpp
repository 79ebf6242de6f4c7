#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Output {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr discarded; returns the exit status and stdout.
Output gnat(const std::string& args) {
    const std::string cmd = std::string("\"") + GNAT_CLI + "\" " + args + " 2>/dev/null";
    Output o;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) o.out.append(buf.data(), n);
    const int status = pclose(pipe);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return o;
}

std::string scenario(const char* name) { return std::string("\"") + GNAT_SOURCE_DIR + "/scenarios/" + name + "\""; }

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "gnat_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(gnat("--help").code == 0);
    CHECK(gnat("").code == 2);
    CHECK(gnat("tension --no-such-flag").code == 2);
    CHECK(gnat("accept --only 13").code == 2);
}

TEST_CASE("malformed specs exit with an error") {
    CHECK(gnat("tension --manifold klein:2").code == 2);
    CHECK(gnat("check-metric --sextet 'custom:alpha1=1+'").code == 2);
    CHECK(gnat("contact --structure hopf:0").code == 2);
    CHECK(gnat("sweep --quantity kcontact --sextet cg -n 2").code == 2);
    CHECK(gnat("run /nonexistent/scenario.json").code == 2);
    const auto bad = temp_dir() / "bad.json";
    std::ofstream(bad) << R"({"operation": "tension", "manifol": "torus:2"})";
    CHECK(gnat("run \"" + bad.string() + "\"").code == 2);
}

TEST_CASE("passing and failing verdicts") {
    const Output ok = gnat("tension --manifold torus:3 --sextet cg --field parallel:1,0,1 --points 5");
    CHECK(ok.code == 0);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["pass"] == true);
    CHECK(j["scenario"]["seed"] == 1);
    CHECK(gnat("tension --manifold sphere:3 --field hopf --points 5").code == 1);
    CHECK(gnat("tension --manifold sphere:3 --field hopf --points 5 --expect false").code == 0);
    CHECK(gnat("classify --sextet sasaki -n 3 --expect ii").code == 0);
    CHECK(gnat("classify --sextet sasaki -n 3 --expect i").code == 1);
    CHECK(gnat("check-metric --sextet 'custom:alpha1=1-t,alpha3=0' -n 3").code == 1);
}

TEST_CASE("bundled scenario files pass") {
    for (const char* name : {"cg_margin.json", "hopf_sasaki.json", "hopf_exp_family.json", "example_a_classify.json",
                             "example_b_bracket.json", "kcontact_sweep.json", "hopf_energy.json", "cg_oracle.json"}) {
        INFO(name);
        CHECK(gnat("run " + scenario(name) + " -o /dev/null").code == 0);
    }
}

TEST_CASE("flags override scenario fields") {
    const Output o = gnat("run " + scenario("hopf_sasaki.json") + " --sextet exp_family:k1=1,k2=2 --expect true");
    CHECK(o.code == 0);
    CHECK(nlohmann::json::parse(o.out)["scenario"]["sextet"] == "exp_family:k1=1,k2=2");
    CHECK(gnat("tension --scenario " + scenario("cg_margin.json")).code == 2);
}

TEST_CASE("sweeps write CSV with one row per step") {
    const auto dir = temp_dir();
    const auto csv = dir / "margin.csv", report = dir / "margin.json";
    const Output o = gnat("sweep --sextet cg -n 3 --quantity riemannian-margin --t-min 0 --t-max 10 --steps 26"
                          " --expect positive -o \"" + csv.string() + "\" --report \"" + report.string() + "\"");
    CHECK(o.code == 0);
    const std::string text = slurp(csv);
    CHECK(std::count(text.begin(), text.end(), '\n') == 27);
    CHECK(text.rfind("t,", 0) == 0);
    CHECK(nlohmann::json::parse(slurp(report))["rows"] == 26);
    CHECK(gnat("sweep --sextet 'exp_family:k1={},k2=2' -n 3 --quantity kcontact --steps 7 --expect zero").code == 0);
}

TEST_CASE("reports are byte identical across runs") {
    const std::string args = "tension --manifold sphere:2 --sextet cg --field random --seed 4 --points 8 --threads 1";
    const Output a = gnat(args), b = gnat(args);
    CHECK(a.out == b.out);
    CHECK(!a.out.empty());
}

TEST_CASE("acceptance subset") {
    const Output o = gnat("accept --only 2,7 --threads 1");
    CHECK(o.code == 0);
    CHECK(o.out.find("[PASS] 2 ") != std::string::npos);
    CHECK(o.out.find("[PASS] 7 ") != std::string::npos);
    CHECK(o.out.find("[PASS] 1 ") == std::string::npos);
}
