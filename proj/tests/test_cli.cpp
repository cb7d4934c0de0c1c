#include <doctest.h>

#include <array>
#include <cstdio>
#include <string>

#ifndef SNTAIL_CLI_PATH
#define SNTAIL_CLI_PATH "./sntail_cli"
#endif

namespace {

struct cli_result {
    int exit_code;
    std::string out;
};

cli_result run_cli(const std::string& args) {
    std::string cmd = std::string(SNTAIL_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("analyze: symmetric negative slants give theta 1, kappa 2") {
    auto r = run_cli("analyze --alpha1 -1 --alpha2 -1 --rho 0 --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"theta\": 1.0") != std::string::npos);
    CHECK(r.out.find("\"kappa\": 2.0") != std::string::npos);
    CHECK(r.out.find("\"tau2\": 0.0") != std::string::npos);
    CHECK(r.out.find("\"log_tau1\": 0.0") != std::string::npos);
}

TEST_CASE("analyze: equi-skew positive case reports theta = beta^2") {
    // at alpha = 1, rho = 0.5: theta = (1-rho)(1+2 alpha^2 (1+rho))/(1+rho) = 4/3
    auto r = run_cli("analyze --alpha1 1 --alpha2 1 --rho 0.5 --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"theta\": 1.333333333333333") != std::string::npos);
}

TEST_CASE("analyze: zero slant flagged, identical flags give identical bytes") {
    auto r1 = run_cli("analyze --alpha1 0 --alpha2 0.5 --rho 0.2 --format json");
    auto r2 = run_cli("analyze --alpha1 0 --alpha2 0.5 --rho 0.2 --format json");
    CHECK(r1.exit_code == 0);
    CHECK(r1.out == r2.out);
    CHECK(r1.out.find("closed-form path") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("analyze --alpha1 0 --alpha2 0 --rho 1.5").exit_code == 2);
    CHECK(run_cli("analyze --alpha1 0 --alpha2 0").exit_code == 2);  // missing --rho
    CHECK(run_cli("verify --alpha1 -1 --alpha2 -1 --rho 0").exit_code == 2);  // empty grid
    CHECK(run_cli("verify --alpha1 -1 --alpha2 -1 --rho 0 --u-log -5").exit_code == 2);  // out of range
    CHECK(run_cli("nonsense").exit_code == 2);
}

TEST_CASE("verify: csv format has the documented header and improving ratio") {
    auto r = run_cli("verify --alpha1 -1 --alpha2 -0.5 --rho 0.2 "
                     "--u-log-grid \"-50:-400:-50\" --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("u_log,log_exact,log_asym,ratio,summand1_log,summand2_log\n", 0) == 0);
    CHECK(r.out.find("# trend_abs_log_ratio_decreasing=") != std::string::npos);
}

TEST_CASE("fit: synthetic injection recovers exactly, exit 0") {
    auto r = run_cli("fit --inject-rvform \"1.5,-0.25,0.75\" --format json");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"pass\": true") != std::string::npos);
    CHECK(r.out.find("\"theta_rel_dev\": ") != std::string::npos);
}

TEST_CASE("fit: empirical run on a covered case passes at default tolerance") {
    auto r = run_cli("fit --alpha1 -1 --alpha2 -0.5 --rho 0.3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
}

TEST_CASE("selftest passes") {
    CHECK(run_cli("selftest").exit_code == 0);
}
