#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "critwin/oracles.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

// CRITWIN_BINARY is injected by the build as the path of the CLI executable.

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Run the CLI binary with `args`, capturing the requested streams.
RunResult run_cli(const std::string& args, const std::string& redirect = "2>/dev/null",
                  const std::string& env = "") {
    const std::string command =
        (env.empty() ? std::string() : "env " + env + " ") + CRITWIN_BINARY + " " +
        args + " " + redirect;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) {
        result.output.append(buffer, got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    return cells;
}

}  // namespace

TEST_CASE("fk0 prints the certified value and its error bound") {
    const RunResult r = run_cli("fk0");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = split_lines(r.output);
    REQUIRE(lines.size() == 1);
    const std::vector<std::string> cells = split_cells(lines[0]);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].rfind("1.830470321422761", 0) == 0);
    const double bound = std::stod(cells[1]);
    CHECK(bound > 0.0);
    CHECK(bound < 1e-17);
}

TEST_CASE("fk0 honors the digits option") {
    const RunResult r = run_cli("fk0 --k 4 --digits 20");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("3.514851319980977904") != std::string::npos);
}

TEST_CASE("wright emits the expected CSV table") {
    const RunResult r = run_cli("wright --max-ell 5");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = split_lines(r.output);
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "ell,w_ell");
    CHECK(lines[1].rfind("0,1.", 0) == 0);
    // w_2 = 5/24 = 0.2083...
    CHECK(lines[3].find("2.08333333333333") != std::string::npos);
}

TEST_CASE("fk tabulates a lambda grid") {
    const RunResult r = run_cli("fk --k 2 --lambda 0:1:0.5 --threads 1");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = split_lines(r.output);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "lambda,f2");
    const std::vector<std::string> last = split_cells(lines[3]);
    REQUIRE(last.size() == 2);
    CHECK(std::stod(last[0]) == doctest::Approx(1.0));
    CHECK(std::stod(last[1]) == doctest::Approx(5.34989234604761211).epsilon(1e-8));
}

TEST_CASE("fk accepts a single lambda value") {
    const RunResult r = run_cli("fk --k 2,3 --lambda 1 --threads 1");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = split_lines(r.output);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "lambda,f2,f3");
    const std::vector<std::string> cells = split_cells(lines[1]);
    REQUIRE(cells.size() == 3);
    const double f2 = std::stod(cells[1]);
    const double f3 = std::stod(cells[2]);
    // f_3 = 2 + 2 lambda f_2 ties the two columns together.
    CHECK(f3 == doctest::Approx(2.0 + 2.0 * f2).epsilon(1e-7));
}

TEST_CASE("profile prints the CSV header without a config comment on stdout") {
    const RunResult r = run_cli("profile --lo 0 --hi 0.5 --step 0.25 --threads 1");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = split_lines(r.output);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "lambda,log_f,dlog_f,d2log_f");
}

TEST_CASE("file output carries the run configuration as a comment line") {
    const std::string path = "cli_test_fk_out.csv";
    const RunResult r =
        run_cli("fk --k 2 --lambda 0:1:1 --threads 1 --out " + path);
    REQUIRE(r.exit_code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string first;
    std::string second;
    std::getline(in, first);
    std::getline(in, second);
    in.close();
    std::remove(path.c_str());
    REQUIRE(first.rfind("# config=", 0) == 0);
    const nlohmann::json config = nlohmann::json::parse(first.substr(9));
    CHECK(config.at("subcommand") == "fk");
    CHECK(second == "lambda,f2");
}

TEST_CASE("maximize reports the optimum as JSON") {
    const RunResult r = run_cli("maximize --lo 0 --hi 2 --tol 1e-4 --threads 2");
    REQUIRE(r.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(r.output);
    CHECK(report.at("config").at("subcommand") == "maximize");
    const double lambda_star = report.at("lambda_star").get<double>();
    CHECK(lambda_star > 0.5);
    CHECK(lambda_star < 1.5);
    CHECK(report.at("g_star").get<double>() ==
          doctest::Approx(1.1348904880506954).epsilon(1e-4));
    CHECK(report.at("unimodal_observed").get<bool>());
    CHECK_FALSE(report.at("boundary").get<bool>());
    const auto bracket = report.at("bracket");
    REQUIRE(bracket.is_array());
    REQUIRE(bracket.size() == 2);
    CHECK(bracket[0].get<double>() <= lambda_star);
    CHECK(lambda_star <= bracket[1].get<double>());
}

TEST_CASE("maximize signals a clipped window through the exit code") {
    const RunResult r = run_cli("maximize --lo -2 --hi 0 --tol 1e-4 --threads 2");
    CHECK(r.exit_code == 1);
    const nlohmann::json report = nlohmann::json::parse(r.output);
    CHECK(report.at("boundary").get<bool>());
}

TEST_CASE("simulate emits the documented JSON layout") {
    const RunResult r = run_cli(
        "simulate --n 2000 --lambda 0 --reps 8 --seed 3 "
        "--estimands x2,twolarge --threads 2");
    REQUIRE(r.exit_code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.output);
    CHECK(doc.at("config").at("subcommand") == "simulate");
    const auto& params = doc.at("params");
    CHECK(params.at("n") == 2000);
    CHECK(params.at("lambda") == 0.0);
    CHECK(params.at("reps") == 8);
    CHECK(params.at("seed") == 3);
    CHECK(params.at("p").get<double>() ==
          doctest::Approx(1.0 / 2000.0 + 0.0).epsilon(1e-12));
    const auto& estimates = doc.at("estimates");
    REQUIRE(estimates.is_array());
    REQUIRE(estimates.size() == 2);
    CHECK(estimates[0].at("name") == "x2");
    CHECK(estimates[1].at("name") == "twolarge");
    for (const auto& row : estimates) {
        REQUIRE(row.at("ci95").is_array());
        REQUIRE(row.at("ci95").size() == 2);
        CHECK(row.at("ci95")[0].get<double>() <= row.at("mean").get<double>());
        CHECK(row.at("mean").get<double>() <= row.at("ci95")[1].get<double>());
        CHECK(row.at("stderr").get<double>() >= 0.0);
    }
}

TEST_CASE("simulate covers the derivative estimands from a shared pass") {
    const RunResult r = run_cli(
        "simulate --n 500 --lambda -0.5 --reps 6 --seed 5 "
        "--estimands d1,d2 --threads 1");
    REQUIRE(r.exit_code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.output);
    const auto& estimates = doc.at("estimates");
    REQUIRE(estimates.size() == 2);
    CHECK(estimates[0].at("name") == "d_x2");
    CHECK(estimates[1].at("name") == "d2_x2");
}

TEST_CASE("simulate output is byte-identical across reruns and thread counts") {
    const std::string base =
        "simulate --n 3000 --lambda 0.5 --reps 10 --seed 11 --estimands x2,dlogchi";
    const RunResult a = run_cli(base + " --threads 1");
    const RunResult b = run_cli(base + " --threads 1");
    const RunResult c = run_cli(base + " --threads 4");
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    // The config block echoes the flags (so it differs), but the numbers may
    // not depend on the worker count.
    const nlohmann::json doc_a = nlohmann::json::parse(a.output);
    const nlohmann::json doc_c = nlohmann::json::parse(c.output);
    CHECK(doc_a.at("estimates") == doc_c.at("estimates"));
    CHECK(doc_a.at("params") == doc_c.at("params"));
}

TEST_CASE("cycle evaluates a single probability") {
    const RunResult r = run_cli("cycle --n 8 --p 0.5");
    REQUIRE(r.exit_code == 0);
    const std::vector<std::string> lines = split_lines(r.output);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "n,p,chi,dchi_dp,logder");
    const std::vector<std::string> cells = split_cells(lines[1]);
    REQUIRE(cells.size() == 5);
    const critwin::oracles::CycleReport want =
        critwin::oracles::cycle_susceptibility(8, 0.5);
    CHECK(std::stod(cells[2]) == doctest::Approx(want.chi).epsilon(1e-14));
    CHECK(std::stod(cells[4]) == doctest::Approx(want.logder).epsilon(1e-14));
}

TEST_CASE("cycle scan finds an interior peak in the default window") {
    const RunResult r = run_cli("cycle --n 100 --scan", "2>&1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("p,chi,dchi_dp,logder") != std::string::npos);
    const std::size_t at = r.output.find("p_star=");
    REQUIRE(at != std::string::npos);
    CHECK(r.output.find("boundary=false") != std::string::npos);
    // n (1 - p_star) = 2.4351 for n = 100, from the closed form.
    const double p_star = std::stod(r.output.substr(at + 7));
    CHECK(100.0 * (1.0 - p_star) == doctest::Approx(2.4350831839).epsilon(1e-3));
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("bogus").exit_code == 2);
    CHECK(run_cli("fk0 --no-such-flag").exit_code == 2);
    CHECK(run_cli("fk0 --ell0 3").exit_code == 2);       // below the option range
    CHECK(run_cli("fk --lambda 1:0:0.5").exit_code == 2);  // empty grid
    CHECK(run_cli("fk --k 9 --lambda 0").exit_code == 2);  // k outside [2, 8]
    CHECK(run_cli("simulate --n 100 --estimands nope").exit_code == 2);
    CHECK(run_cli("cycle --n 10").exit_code == 2);        // neither --p nor --scan
    CHECK(run_cli("cycle --n 10 --p 0.5 --scan").exit_code == 2);
    CHECK(run_cli("verify --suite bogus").exit_code == 2);
    CHECK(run_cli("verify --quick --full").exit_code == 2);
}

TEST_CASE("help exits cleanly") {
    const RunResult top = run_cli("--help");
    CHECK(top.exit_code == 0);
    CHECK(top.output.find("critwin") != std::string::npos);
    CHECK(run_cli("simulate --help").exit_code == 0);
}

TEST_CASE("thread count falls back to the environment variable") {
    const RunResult good =
        run_cli("fk --k 2 --lambda 0.5 ", "2>/dev/null", "CRITWIN_THREADS=2");
    CHECK(good.exit_code == 0);
    const RunResult bad =
        run_cli("fk --k 2 --lambda 0.5 ", "2>/dev/null", "CRITWIN_THREADS=abc");
    CHECK(bad.exit_code == 2);
    // An explicit flag overrides a broken environment value.
    const RunResult overridden = run_cli("fk --k 2 --lambda 0.5 --threads 1",
                                         "2>/dev/null", "CRITWIN_THREADS=abc");
    CHECK(overridden.exit_code == 0);
}

TEST_CASE("quick verify suites pass and report a table") {
    const RunResult r = run_cli("verify --suite excursion --threads 2", "2>&1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
    CHECK(r.output.find("FAIL") == std::string::npos);
    CHECK(r.output.find("checks passed") != std::string::npos);
}
