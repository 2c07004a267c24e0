#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "critwin/maximizer.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mx = critwin::maximizer;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

// Parse "a,b,c,d" into doubles.
std::vector<double> parse_row(const std::string& line) {
    std::vector<double> out;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        out.push_back(std::stod(cell));
    }
    return out;
}

}  // namespace

TEST_CASE("maximizer lands on the independently computed optimum") {
    const mx::MaximizerReport report = mx::find_maximizer(-2.0, 4.0, 1e-4);
    REQUIRE(report.unimodal_observed);
    REQUIRE_FALSE(report.boundary);
    // Independent reference: lambda* = 1.00882, g* = 1.13489 from a scalar
    // optimizer run against a separate implementation of g.
    CHECK(std::abs(report.lambda_star - 1.008817597380195) < 2e-3);
    CHECK(std::abs(report.g_star - 1.1348904880506954) < 1e-4);
    CHECK(report.bracket_lo <= report.lambda_star);
    CHECK(report.lambda_star <= report.bracket_hi);
    CHECK(report.grid_step > 0.0);
    CHECK(report.grid_step <= 0.05);
    // The reported bracket is the winning coarse-grid cell pair.
    CHECK(report.bracket_hi - report.bracket_lo <= 2.0 * report.grid_step + 1e-12);
    // g at the optimum exceeds g(0) = 0.9600951.
    CHECK(report.g_star > 0.9600951);
}

TEST_CASE("maximizer flags a window that clips the peak") {
    const mx::MaximizerReport report = mx::find_maximizer(-2.0, 0.0, 1e-4);
    CHECK(report.boundary);
    // The argmax sits on the right edge of the window.
    CHECK(report.lambda_star == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("maximizer result is stable under window choice") {
    const mx::MaximizerReport a = mx::find_maximizer(0.0, 2.0, 1e-4);
    const mx::MaximizerReport b = mx::find_maximizer(-1.0, 3.0, 1e-4);
    REQUIRE_FALSE(a.boundary);
    REQUIRE_FALSE(b.boundary);
    CHECK(std::abs(a.lambda_star - b.lambda_star) < 2e-3);
    CHECK(std::abs(a.g_star - b.g_star) < 1e-6);
}

TEST_CASE("maximizer input validation") {
    CHECK_THROWS_AS(mx::find_maximizer(1.0, 1.0, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(mx::find_maximizer(2.0, 1.0, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(mx::find_maximizer(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("profile text covers the requested grid with positive slope") {
    const std::string text = mx::profile_csv_text(-1.75, 3.75, 0.25);
    const std::vector<std::string> lines = split_lines(text);
    REQUIRE_FALSE(lines.empty());
    CHECK(lines[0] == "lambda,log_f,dlog_f,d2log_f");
    // Inclusive endpoints: (3.75 - (-1.75)) / 0.25 + 1 = 23 rows.
    REQUIRE(lines.size() == 24);
    double previous_lambda = -2.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        CAPTURE(lines[i]);
        const std::vector<double> row = parse_row(lines[i]);
        REQUIRE(row.size() == 4);
        CHECK(row[0] > previous_lambda);
        previous_lambda = row[0];
        // log f_2 is strictly increasing in lambda across this window.
        CHECK(row[2] > 0.0);
    }
    const std::vector<double> first = parse_row(lines[1]);
    const std::vector<double> last = parse_row(lines.back());
    CHECK(first[0] == doctest::Approx(-1.75));
    CHECK(last[0] == doctest::Approx(3.75));
    // Curvature flips sign across the window: positive early, negative late.
    CHECK(parse_row(lines[1])[3] > 0.0);
    CHECK(parse_row(lines.back())[3] < 0.0);
}

TEST_CASE("profile text honors a preamble line") {
    const std::string text =
        mx::profile_csv_text(0.0, 0.5, 0.5, 1e-8, 0, "# config={}");
    const std::vector<std::string> lines = split_lines(text);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "# config={}");
    CHECK(lines[1] == "lambda,log_f,dlog_f,d2log_f");
}

TEST_CASE("profile file writer round-trips the text") {
    const std::string path = "test_profile_out.csv";
    mx::emit_profile_csv(0.0, 1.0, 0.5, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    in.close();
    CHECK(buffer.str() == mx::profile_csv_text(0.0, 1.0, 0.5));
    std::remove(path.c_str());
}

TEST_CASE("profile input validation") {
    CHECK_THROWS_AS(mx::profile_csv_text(1.0, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(mx::profile_csv_text(0.0, 1.0, 0.0), std::invalid_argument);
}
