#include "critwin/cli.hpp"

#include "critwin/excursion.hpp"
#include "critwin/io.hpp"
#include "critwin/maximizer.hpp"
#include "critwin/oracles.hpp"
#include "critwin/parallel.hpp"
#include "critwin/percolation.hpp"
#include "critwin/rng.hpp"
#include "critwin/scaling.hpp"
#include "critwin/specfun.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace critwin {
namespace cli {

namespace {

using nlohmann::json;

// Flag misuse discovered after CLI11 parsing (bad range strings, bad
// CRITWIN_THREADS, unknown estimand tokens): exit code 2, like parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int effective_threads(int flag_value) {
    if (flag_value >= 0) {
        return flag_value;  // 0 means auto-detect
    }
    const char* env = std::getenv("CRITWIN_THREADS");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    try {
        std::size_t pos = 0;
        const int value = std::stoi(env, &pos);
        if (pos != std::string(env).size() || value < 0) {
            throw std::invalid_argument("");
        }
        return value;
    } catch (const std::exception&) {
        throw UsageError(std::string("CRITWIN_THREADS must be a nonnegative "
                                     "integer, got \"") +
                         env + "\"");
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, sep)) {
        parts.push_back(token);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

double parse_double(const std::string& text, const std::string& flag) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos != text.size() || !std::isfinite(value)) {
            throw std::invalid_argument("");
        }
        return value;
    } catch (const std::exception&) {
        throw UsageError(flag + ": \"" + text + "\" is not a finite number");
    }
}

// "x" -> {x}; "lo:hi:step" -> inclusive grid.  Anything else is a usage
// error naming the flag.
std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    const std::vector<std::string> parts = split(text, ':');
    if (parts.size() == 1) {
        return {parse_double(parts[0], flag)};
    }
    if (parts.size() != 3) {
        throw UsageError(flag + ": expected a number or lo:hi:step, got \"" +
                         text + "\"");
    }
    const double lo = parse_double(parts[0], flag);
    const double hi = parse_double(parts[1], flag);
    const double step = parse_double(parts[2], flag);
    if (!(step > 0.0) || !(lo <= hi)) {
        throw UsageError(flag + ": need lo <= hi and step > 0 in \"" + text +
                         "\"");
    }
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double value = lo + i * step;
        if (value > hi + step * 1e-9) {
            break;
        }
        grid.push_back(value);
    }
    return grid;
}

std::vector<int> parse_k_set(const std::string& text, const std::string& flag) {
    std::vector<int> k_set;
    for (const std::string& token : split(text, ',')) {
        try {
            std::size_t pos = 0;
            const int k = std::stoi(token, &pos);
            if (pos != token.size() || k < 2 || k > 8) {
                throw std::invalid_argument("");
            }
            k_set.push_back(k);
        } catch (const std::exception&) {
            throw UsageError(flag + ": \"" + token +
                             "\" is not an integer in [2, 8]");
        }
    }
    if (k_set.empty()) {
        throw UsageError(flag + ": at least one k required");
    }
    return k_set;
}

std::string config_comment(const json& config) {
    return "# config=" + config.dump() + "\n";
}

// Data goes to stdout unless --out was given; files get the configuration
// comment (CSV) prepended by the caller when appropriate.
void deliver(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        std::cout.flush();
    } else {
        io::write_text_file(out_path, content);
        std::cerr << "wrote " << out_path << "\n";
    }
}

json summary_to_json(const percolation::EstimatorSummary& summary) {
    return json{{"name", summary.name},
                {"mean", summary.mean},
                {"stderr", summary.std_error},
                {"ci95", json::array({summary.ci_lo, summary.ci_hi})}};
}

// ---------------------------------------------------------------------------
// Subcommand bodies.
// ---------------------------------------------------------------------------

int run_wright(long long max_ell, int digits, const std::string& out) {
    const json config{{"subcommand", "wright"},
                      {"max_ell", max_ell},
                      {"digits", digits}};
    const std::vector<xreal> wright = excursion::wright_constants(max_ell);
    std::ostringstream text;
    if (!out.empty()) {
        text << config_comment(config);
    }
    text << "ell,w_ell\n";
    for (long long ell = 0; ell <= max_ell; ++ell) {
        text << ell << ',' << io::format_xreal(wright[static_cast<std::size_t>(ell)], digits)
             << "\n";
    }
    deliver(text.str(), out);
    return 0;
}

int run_fk(const std::string& k_text, const std::string& lambda_text, double tol,
           int threads, const std::string& out) {
    const std::vector<int> k_set = parse_k_set(k_text, "--k");
    const std::vector<double> grid = parse_grid(lambda_text, "--lambda");
    const json config{{"subcommand", "fk"},
                      {"k", k_text},
                      {"lambda", lambda_text},
                      {"tol", tol},
                      {"threads", threads}};

    const std::vector<std::string> rows = map_blocks<std::string>(
        static_cast<long long>(grid.size()), 1, threads,
        [&](long long index, long long, long long) {
            const double lambda = grid[static_cast<std::size_t>(index)];
            std::ostringstream row;
            row << io::format_number(lambda);
            for (const int k : k_set) {
                row << ',' << io::format_number(scaling::fk_eval(k, lambda, tol));
            }
            row << "\n";
            return row.str();
        });

    std::ostringstream text;
    if (!out.empty()) {
        text << config_comment(config);
    }
    text << "lambda";
    for (const int k : k_set) {
        text << ",f" << k;
    }
    text << "\n";
    for (const std::string& row : rows) {
        text << row;
    }
    deliver(text.str(), out);
    return 0;
}

int run_fk0(int k, long long ell0, int digits, const std::string& out) {
    const json config{
        {"subcommand", "fk0"}, {"k", k}, {"ell0", ell0}, {"digits", digits}};
    const scaling::RigorousValue result = scaling::fk_zero(k, ell0);
    std::ostringstream text;
    if (!out.empty()) {
        text << config_comment(config);
    }
    text << io::format_xreal(result.value, digits) << ','
         << io::format_scientific(result.error_bound, 6) << "\n";
    deliver(text.str(), out);
    return 0;
}

int run_profile(double lo, double hi, double step, double tol, int threads,
                const std::string& out) {
    const json config{{"subcommand", "profile"}, {"lo", lo},         {"hi", hi},
                      {"step", step},            {"tol", tol},       {"threads", threads}};
    const std::string preamble =
        out.empty() ? std::string() : "# config=" + config.dump();
    const std::string text =
        maximizer::profile_csv_text(lo, hi, step, tol, threads, preamble);
    deliver(text, out);
    return 0;
}

int run_maximize(double lo, double hi, double tol, double quad_tol, int threads,
                 const std::string& out) {
    const json config{{"subcommand", "maximize"}, {"lo", lo},
                      {"hi", hi},                 {"tol", tol},
                      {"quad_tol", quad_tol},     {"threads", threads}};
    const maximizer::MaximizerReport report =
        maximizer::find_maximizer(lo, hi, tol, quad_tol, threads);
    json output{{"config", config},
                {"lambda_star", report.lambda_star},
                {"g_star", report.g_star},
                {"bracket", json::array({report.bracket_lo, report.bracket_hi})},
                {"unimodal_observed", report.unimodal_observed},
                {"grid_step", report.grid_step},
                {"boundary", report.boundary}};
    deliver(output.dump(2) + "\n", out);
    return report.boundary ? 1 : 0;
}

int run_simulate(long long n, double lambda, long long reps, std::uint64_t seed,
                 const std::string& estimands_text, int threads,
                 const std::string& out) {
    const std::vector<std::string> tokens = split(estimands_text, ',');
    const std::set<std::string> known{"x2", "dlogchi", "d1", "d2", "twolarge"};
    for (const std::string& token : tokens) {
        if (known.find(token) == known.end()) {
            throw UsageError("--estimands: unknown estimand \"" + token +
                             "\" (known: x2, dlogchi, d1, d2, twolarge)");
        }
    }
    const json config{{"subcommand", "simulate"},
                      {"n", n},
                      {"lambda", lambda},
                      {"reps", reps},
                      {"seed", seed},
                      {"estimands", estimands_text},
                      {"threads", threads}};
    const double p = percolation::window_p(n, lambda);

    // d1 and d2 come from one pass over the same samples.
    std::vector<percolation::EstimatorSummary> derivative_rows;
    const auto derivative = [&](const std::string& name) {
        if (derivative_rows.empty()) {
            derivative_rows = percolation::estimate_derivative_moments(
                n, lambda, reps, seed, threads);
        }
        for (const percolation::EstimatorSummary& row : derivative_rows) {
            if (row.name == name) {
                return row;
            }
        }
        throw std::logic_error("derivative estimand " + name + " missing");
    };

    json estimates = json::array();
    for (const std::string& token : tokens) {
        if (token == "x2") {
            estimates.push_back(summary_to_json(percolation::estimate_susceptibility(
                n, lambda, reps, seed, threads)));
        } else if (token == "dlogchi") {
            estimates.push_back(summary_to_json(percolation::estimate_log_derivative(
                n, lambda, reps, seed, threads)));
        } else if (token == "d1") {
            estimates.push_back(summary_to_json(derivative("d_x2")));
        } else if (token == "d2") {
            estimates.push_back(summary_to_json(derivative("d2_x2")));
        } else {  // twolarge
            estimates.push_back(summary_to_json(percolation::two_large_components_freq(
                n, lambda, reps, seed, threads)));
        }
    }

    json output{{"config", config},
                {"params", json{{"n", n},
                                {"lambda", lambda},
                                {"p", p},
                                {"reps", reps},
                                {"seed", seed}}},
                {"estimates", estimates}};
    deliver(output.dump(2) + "\n", out);
    return 0;
}

int run_cycle(long long n, double p, bool p_given, bool scan,
              const std::string& pgrid_text, const std::string& out) {
    if (p_given == scan) {
        throw UsageError("cycle: pass exactly one of --p or --scan");
    }
    json config{{"subcommand", "cycle"}, {"n", n}};

    if (p_given) {
        config["p"] = p;
        const oracles::CycleReport report = oracles::cycle_susceptibility(n, p);
        std::ostringstream text;
        if (!out.empty()) {
            text << config_comment(config);
        }
        text << "n,p,chi,dchi_dp,logder\n"
             << report.n << ',' << io::format_number(report.p) << ','
             << io::format_number(report.chi) << ','
             << io::format_number(report.dchi_dp) << ','
             << io::format_number(report.logder) << "\n";
        deliver(text.str(), out);
        return 0;
    }

    std::vector<double> grid;
    if (!pgrid_text.empty()) {
        grid = parse_grid(pgrid_text, "--pgrid");
        config["pgrid"] = pgrid_text;
    } else {
        // Default window: p = 1 - x/n with x descending, which brackets the
        // connectivity window where the log-derivative peaks.
        const double x_hi = std::min(8.0, 0.8 * static_cast<double>(n));
        for (double x = x_hi; x >= 0.25 - 1e-12; x -= 0.025) {
            grid.push_back(1.0 - x / static_cast<double>(n));
        }
        config["pgrid"] = "default";
    }
    const oracles::CycleScan result = oracles::cycle_scan(n, grid);

    std::ostringstream text;
    if (!out.empty()) {
        text << config_comment(config);
    }
    text << "p,chi,dchi_dp,logder\n";
    for (const double pv : grid) {
        const oracles::CycleReport row = oracles::cycle_susceptibility(n, pv);
        text << io::format_number(pv) << ',' << io::format_number(row.chi) << ','
             << io::format_number(row.dchi_dp) << ','
             << io::format_number(row.logder) << "\n";
    }
    deliver(text.str(), out);
    std::cerr << "p_star=" << io::format_number(result.p_star)
              << " logder_max=" << io::format_number(result.logder_max)
              << " boundary=" << (result.boundary ? "true" : "false") << "\n";
    return result.boundary ? 1 : 0;
}

// ---------------------------------------------------------------------------
// verify: named checks with pass/fail margins.
// ---------------------------------------------------------------------------

struct CheckResult {
    bool pass = false;
    std::string margin;
};

struct Check {
    std::string suite;
    std::string name;
    bool full_only = false;
    std::function<CheckResult()> fn;
};

std::string rel_margin(double value, double target, double tol) {
    std::ostringstream out;
    out << "value=" << io::format_number(value) << " target="
        << io::format_number(target)
        << " rel_err=" << io::format_scientific(std::abs(value / target - 1.0), 3)
        << " tol=" << io::format_scientific(tol, 3);
    return out.str();
}

std::string abs_margin(double value, double target, double tol) {
    std::ostringstream out;
    out << "value=" << io::format_number(value) << " target="
        << io::format_number(target)
        << " abs_err=" << io::format_scientific(std::abs(value - target), 3)
        << " tol=" << io::format_scientific(tol, 3);
    return out.str();
}

std::vector<Check> build_checks(std::uint64_t seed, int threads) {
    std::vector<Check> checks;

    // --- scaling: the 16-digit constants and their rigorous bounds -------
    checks.push_back({"scaling", "f2-zero-series", false, [] {
        const scaling::RigorousValue v = scaling::fk_zero(2, 75);
        const double value = static_cast<double>(v.value);
        const bool pass = std::abs(value - 1.830470321422761) <= 2e-15 &&
                          v.error_bound < 1e-17;
        return CheckResult{pass, abs_margin(value, 1.830470321422761, 2e-15) +
                                     " bound=" +
                                     io::format_scientific(v.error_bound, 3)};
    }});
    checks.push_back({"scaling", "f4-zero-series", false, [] {
        const scaling::RigorousValue v = scaling::fk_zero(4, 75);
        const double value = static_cast<double>(v.value);
        const bool pass = std::abs(value - 3.514851319980978) <= 2e-15 &&
                          v.error_bound < 1e-17;
        return CheckResult{pass, abs_margin(value, 3.514851319980978, 2e-15) +
                                     " bound=" +
                                     io::format_scientific(v.error_bound, 3)};
    }});
    checks.push_back({"scaling", "f6-zero-series", false, [] {
        const scaling::RigorousValue v = scaling::fk_zero(6, 75);
        const double value = static_cast<double>(v.value);
        const bool pass = std::abs(value - 16.922562003970612) <= 2e-15 &&
                          v.error_bound < 1e-17;
        return CheckResult{pass, abs_margin(value, 16.922562003970612, 2e-15) +
                                     " bound=" +
                                     io::format_scientific(v.error_bound, 3)};
    }});
    checks.push_back({"scaling", "zero-combination", false, [] {
        const xreal f2 = scaling::fk_zero(2, 75).value;
        const xreal f4 = scaling::fk_zero(4, 75).value;
        const xreal f6 = scaling::fk_zero(6, 75).value;
        const double combo = static_cast<double>(f2 * f6 - 8 * f2 - f4 * f4);
        const bool pass = std::abs(combo - 3.9783051377505) <= 5e-13;
        return CheckResult{pass, abs_margin(combo, 3.9783051377505, 5e-13)};
    }});
    checks.push_back({"scaling", "zero-d2-log", false, [] {
        const xreal f2 = scaling::fk_zero(2, 75).value;
        const xreal f4 = scaling::fk_zero(4, 75).value;
        const xreal f6 = scaling::fk_zero(6, 75).value;
        const double value =
            static_cast<double>((f2 * f6 - 8 * f2 - f4 * f4) / (4 * f2 * f2));
        const bool pass = std::abs(value - 0.296833365232) <= 1e-11;
        return CheckResult{pass, abs_margin(value, 0.296833365232, 1e-11)};
    }});
    checks.push_back({"scaling", "f3-identity", false, [] {
        double worst = 0.0;
        for (const double lambda : {-2.0, -1.0, 0.0, 1.0, 2.0, 3.0}) {
            const double f3 = scaling::fk_eval(3, lambda, 1e-9);
            const double f2 = scaling::fk_eval(2, lambda, 1e-9);
            worst = std::max(worst, std::abs(f3 - 2.0 - 2.0 * lambda * f2));
        }
        return CheckResult{worst < 1e-7,
                           "max_defect=" + io::format_scientific(worst, 3) +
                               " tol=1e-07"};
    }});
    checks.push_back({"scaling", "derivative-vs-fd", false, [] {
        double worst = 0.0;
        const double h = 1e-3;
        for (const double lambda : {0.5, 1.5}) {
            const double analytic = scaling::fk_derivative(2, lambda, 1, 1e-10);
            const double fd = (scaling::fk_quadrature(2, lambda + h, 1e-10) -
                               scaling::fk_quadrature(2, lambda - h, 1e-10)) /
                              (2.0 * h);
            worst = std::max(worst, std::abs(fd / analytic - 1.0));
        }
        return CheckResult{worst < 1e-5,
                           "max_rel=" + io::format_scientific(worst, 3) +
                               " tol=1e-05"};
    }});
    checks.push_back({"scaling", "negative-asymptotics", false, [] {
        bool pass = true;
        std::ostringstream detail;
        for (const double lambda : {-5.0, -10.0, -20.0}) {
            const double f2 = scaling::fk_quadrature(2, lambda, 1e-10);
            const double defect = std::abs(std::abs(lambda) * f2 - 1.0);
            const double allowance = 3.0 / std::pow(std::abs(lambda), 3);
            pass = pass && defect <= allowance;
            detail << " " << lambda << ":" << io::format_scientific(defect, 2);
        }
        return CheckResult{pass, "defects" + detail.str() + " vs 3|lambda|^-3"};
    }});
    checks.push_back({"scaling", "maximizer-window", false, [threads] {
        const maximizer::MaximizerReport report =
            maximizer::find_maximizer(-2.0, 4.0, 1e-4, 1e-8, threads);
        const bool pass = report.lambda_star >= 0.5 && report.lambda_star <= 1.5 &&
                          report.unimodal_observed && !report.boundary;
        std::ostringstream detail;
        detail << "lambda_star=" << io::format_number(report.lambda_star)
               << " unimodal=" << (report.unimodal_observed ? "yes" : "no")
               << " boundary=" << (report.boundary ? "yes" : "no");
        return CheckResult{pass, detail.str()};
    }});

    // --- excursion: exact moment table invariants -------------------------
    checks.push_back({"excursion", "wright-upper-bound", false, [] {
        const std::vector<xreal> wright = excursion::wright_constants(75);
        bool pass = true;
        double worst = -1e300;
        for (long long ell = 1; ell <= 75; ++ell) {
            const double log_w =
                static_cast<double>(log(wright[static_cast<std::size_t>(ell)]));
            const double slack = specfun::log_wl_upper(ell) - log_w;
            pass = pass && slack >= 0.0;
            worst = std::max(worst, -slack);
        }
        return CheckResult{pass, "max_overrun=" +
                                     io::format_scientific(std::max(worst, 0.0), 3) +
                                     " (<= 0 required)"};
    }});
    checks.push_back({"excursion", "first-moment", false, [] {
        const std::vector<xreal> wright = excursion::wright_constants(2);
        const xreal m1 = wright[1];  // w_1 = M_1 / 1!, and M_1 = sqrt(pi/8)
        const xreal pi = 4 * atan(xreal(1));
        const double defect = static_cast<double>(abs(m1 - sqrt(pi / 8)));
        return CheckResult{defect < 1e-30,
                           "defect=" + io::format_scientific(defect, 3) +
                               " tol=1e-30"};
    }});
    checks.push_back({"excursion", "w2-rational", false, [] {
        const std::vector<xreal> wright = excursion::wright_constants(2);
        const double defect =
            static_cast<double>(abs(wright[2] - xreal(5) / 24));
        return CheckResult{defect < 1e-30,
                           "defect=" + io::format_scientific(defect, 3) +
                               " tol=1e-30"};
    }});

    // --- oracles: exact enumeration and closed forms ----------------------
    checks.push_back({"oracles", "susceptibility-identity", false, [] {
        // (1-p) dE[s_2]/dp == E[s_2^2 - s_4] as exact integer polynomials,
        // and at 10 probe points, for every n <= 5.
        bool pass = true;
        for (int n = 1; n <= 5; ++n) {
            const oracles::ExactGnpReport report = oracles::exact_small_n(n, 0.3);
            const oracles::Polynomial lhs = oracles::multiply_by_one_minus_p(
                report.expect_s[2].derivative());
            pass = pass && (lhs == report.expect_pair);
            for (int i = 1; i <= 10; ++i) {
                const double p = i / 11.0;
                const oracles::ExactGnpReport at = oracles::exact_small_n(n, p);
                pass = pass &&
                       std::abs((1.0 - p) * at.d_susceptibility_dp -
                                at.expect_pair_at_p) <
                           1e-9 * (1.0 + std::abs(at.expect_pair_at_p));
            }
        }
        return CheckResult{pass, pass ? "exact for all n <= 5" : "mismatch"};
    }});
    checks.push_back({"oracles", "pivotal-identity", false, [] {
        long long mismatches = 0;
        for (unsigned mask = 0; mask < 1024; ++mask) {
            const oracles::GraphStats stats = oracles::graph_stats(5, mask);
            const long long expected =
                stats.power_sums[2] * stats.power_sums[2] - stats.power_sums[4];
            if (oracles::pivotal_pairs_bruteforce(5, mask) != expected) {
                ++mismatches;
            }
        }
        return CheckResult{mismatches == 0,
                           "mismatches=" + std::to_string(mismatches) +
                               " of 1024 graphs"};
    }});
    checks.push_back({"oracles", "tree-graph", false, [] {
        bool pass = true;
        for (int n = 3; n <= 5; ++n) {
            for (const double p : {0.1, 0.3, 0.5}) {
                for (const int k : {2, 3}) {
                    pass = pass && oracles::verify_tree_graph(n, p, k).pass;
                }
            }
        }
        return CheckResult{pass, pass ? "holds for n<=5, k in {2,3}" : "violated"};
    }});
    checks.push_back({"oracles", "cycle-closed-form", false, [] {
        double worst = 0.0;
        for (const double p : {0.2, 0.5, 0.8}) {
            const double closed = oracles::cycle_susceptibility(8, p).chi;
            const double brute = oracles::cycle_chi_enumeration(8, p);
            worst = std::max(worst, std::abs(closed - brute));
        }
        return CheckResult{worst < 1e-12,
                           "max_defect=" + io::format_scientific(worst, 3) +
                               " tol=1e-12"};
    }});
    checks.push_back({"oracles", "rho-fixed-point", false, [] {
        double worst = 0.0;
        for (const double eps : {0.01, 0.1, 1.0}) {
            const double rho = oracles::rho_solver(eps);
            worst = std::max(
                worst, std::abs(1.0 - rho - std::exp(-(1.0 + eps) * rho)));
        }
        return CheckResult{worst < 1e-13,
                           "max_residual=" + io::format_scientific(worst, 3) +
                               " tol=1e-13"};
    }});
    checks.push_back({"oracles", "progeny-total-mass", false, [] {
        // Total progeny mass: 1 in the subcritical phase, 1 - survival in
        // the supercritical phase.
        double sub = 0.0;
        double sup = 0.0;
        for (long long k = 1; k <= 20000; ++k) {
            sub += oracles::otter_dwass_pmf(0.5, k);
            sup += oracles::otter_dwass_pmf(2.0, k);
        }
        const double sup_target = 1.0 - oracles::bp_survival(2.0);
        const bool pass =
            std::abs(sub - 1.0) < 1e-9 && std::abs(sup - sup_target) < 1e-9;
        return CheckResult{pass, "subcritical_defect=" +
                                     io::format_scientific(std::abs(sub - 1.0), 3) +
                                     " supercritical_defect=" +
                                     io::format_scientific(
                                         std::abs(sup - sup_target), 3)};
    }});
    checks.push_back({"oracles", "susceptibility-bounds", false, [seed, threads] {
        const oracles::SusceptibilityBoundsReport sub =
            oracles::verify_susceptibility_bounds(100000, 0.5 / 100000, 0.5, 32,
                                                  seed, threads);
        const oracles::SusceptibilityBoundsReport critical =
            oracles::verify_susceptibility_bounds(100000, 1.0 / 100000, 0.1, 32,
                                                  seed, threads);
        const bool pass = sub.subcritical_applicable && sub.subcritical_pass &&
                          critical.supercritical_applicable &&
                          critical.supercritical_pass;
        std::ostringstream detail;
        detail << "subcritical mean=" << io::format_number(sub.mean_c)
               << " bound=" << io::format_number(sub.subcritical_bound)
               << "; near-critical ratio="
               << io::format_number(critical.supercritical_ratio)
               << " constant=" << io::format_number(critical.supercritical_constant);
        return CheckResult{pass, detail.str()};
    }});

    // --- mc: Monte Carlo suites (minutes; --full only) ---------------------
    checks.push_back({"mc", "x2-limit", true, [threads] {
        const percolation::EstimatorSummary s =
            percolation::estimate_susceptibility(1000000, 0.0, 200, 42, threads);
        const bool pass = std::abs(s.mean / 1.8305 - 1.0) < 0.05;
        return CheckResult{pass, rel_margin(s.mean, 1.8305, 0.05) +
                                     " stderr=" +
                                     io::format_scientific(s.std_error, 3)};
    }});
    checks.push_back({"mc", "logder-limit", true, [threads] {
        const percolation::EstimatorSummary s = percolation::estimate_log_derivative(
            1000000, 0.0, 200, 42, threads);
        const bool pass = std::abs(s.mean / 0.9601 - 1.0) < 0.10;
        return CheckResult{pass, rel_margin(s.mean, 0.9601, 0.10)};
    }});
    checks.push_back({"mc", "derivative-limits", true, [threads] {
        const std::vector<percolation::EstimatorSummary> rows =
            percolation::estimate_derivative_moments(1000000, 0.0, 200, 42,
                                                     threads);
        const bool pass_d1 = std::abs(rows[0].mean / 1.7574 - 1.0) < 0.10;
        const bool pass_d2 = std::abs(rows[1].mean / 2.2306 - 1.0) < 0.25;
        return CheckResult{pass_d1 && pass_d2,
                           rel_margin(rows[0].mean, 1.7574, 0.10) + "; " +
                               rel_margin(rows[1].mean, 2.2306, 0.25)};
    }});
    checks.push_back({"mc", "two-large-positive", true, [threads] {
        const percolation::EstimatorSummary s =
            percolation::two_large_components_freq(1000000, 0.0, 200, 42, threads);
        const bool pass = s.mean > 0.0 && s.ci_lo > 0.0;
        return CheckResult{pass, "freq=" + io::format_number(s.mean) + " ci_lo=" +
                                     io::format_number(s.ci_lo)};
    }});
    checks.push_back({"mc", "coupled-monotonicity", true, [seed] {
        const long long n = 100000;
        const std::vector<double> p_list = {percolation::window_p(n, -2.0),
                                            percolation::window_p(n, 0.0),
                                            percolation::window_p(n, 2.0)};
        long long violations = 0;
        for (std::uint64_t s = 0; s < 50; ++s) {
            const std::vector<percolation::ComponentStats> draws =
                percolation::coupled_sample(n, p_list, seed + s);
            for (std::size_t i = 0; i + 1 < draws.size(); ++i) {
                if (draws[i].power_sums[2] > draws[i + 1].power_sums[2]) {
                    ++violations;
                }
            }
        }
        return CheckResult{violations == 0,
                           "violations=" + std::to_string(violations) +
                               " over 50 seeds"};
    }});
    checks.push_back({"mc", "excursion-moments", true, [seed, threads] {
        const excursion::MomentTable table = excursion::excursion_moments(6);
        const excursion::McMoments mc =
            excursion::mc_excursion_area(1000000, 20000, seed, threads);
        bool pass = true;
        double worst_z = 0.0;
        for (int ell = 1; ell <= 6; ++ell) {
            const double exact =
                static_cast<double>(table.moments[static_cast<std::size_t>(ell)]);
            const double z = std::abs(mc.moment[static_cast<std::size_t>(ell)] -
                                      exact) /
                             mc.std_error[static_cast<std::size_t>(ell)];
            worst_z = std::max(worst_z, z);
            pass = pass && z <= 4.0;
        }
        return CheckResult{pass, "max_z=" + io::format_number(worst_z) +
                                     " (4 SE allowed)"};
    }});
    checks.push_back({"mc", "small-n-mean", true, [seed, threads] {
        // n = 4, p = 1/2: MC mean of s_2 against the enumeration oracle.
        const oracles::ExactGnpReport exact = oracles::exact_small_n(4, 0.5);
        const long long reps = 1000000;
        const std::vector<double> values = map_blocks<double>(
            reps, 8192, threads, [seed](long long, long long begin, long long end) {
                double sum = 0.0;
                for (long long r = begin; r < end; ++r) {
                    std::uint64_t state =
                        seed + 0x9e3779b97f4a7c15ULL *
                                   (static_cast<std::uint64_t>(r) + 1);
                    const percolation::ComponentStats stats =
                        percolation::sample_gnp_components(4, 0.5,
                                                           splitmix64(state));
                    sum += static_cast<double>(stats.power_sums[2]);
                }
                return sum;
            });
        double total = 0.0;
        for (const double v : values) {
            total += v;
        }
        const double mean = total / static_cast<double>(reps);
        // Var(s_2) <= E[s_2^2]; use the exact second moment for the sigma.
        const double variance =
            exact.expect_s2_sq_at_p -
            exact.expect_s_at_p[2] * exact.expect_s_at_p[2];
        const double sigma = std::sqrt(variance / static_cast<double>(reps));
        const double z = std::abs(mean - exact.expect_s_at_p[2]) / sigma;
        return CheckResult{z <= 3.0, "z=" + io::format_number(z) +
                                         " (3 sigma allowed)"};
    }});

    return checks;
}

int run_verify(const std::string& suite, bool full, std::uint64_t seed,
               int threads) {
    const std::set<std::string> known{"all", "scaling", "excursion", "oracles",
                                      "mc"};
    if (known.find(suite) == known.end()) {
        throw UsageError("--suite: unknown suite \"" + suite +
                         "\" (known: all, scaling, excursion, oracles, mc)");
    }
    const std::vector<Check> checks = build_checks(seed, threads);
    int failures = 0;
    int selected = 0;
    for (const Check& check : checks) {
        if (suite != "all" && check.suite != suite) {
            continue;
        }
        if (check.full_only && !full) {
            continue;
        }
        ++selected;
        CheckResult result;
        try {
            result = check.fn();
        } catch (const std::exception& e) {
            result.pass = false;
            result.margin = std::string("exception: ") + e.what();
        }
        if (!result.pass) {
            ++failures;
        }
        std::printf("%-4s %-10s %-24s %s\n", result.pass ? "PASS" : "FAIL",
                    check.suite.c_str(), check.name.c_str(),
                    result.margin.c_str());
        std::fflush(stdout);
    }
    std::fprintf(stderr, "%d/%d checks passed\n", selected - failures, selected);
    if (selected == 0) {
        throw UsageError("--suite/--quick selected no checks");
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{
        "critwin: scaling laws of near-critical random graphs -- analytic "
        "profiles, Monte Carlo estimators, and exact cross-checks"};
    app.require_subcommand(1);

    // wright ---------------------------------------------------------------
    auto* wright = app.add_subcommand(
        "wright", "Emit the excursion-area constants w_ell as CSV");
    long long wright_max_ell = 75;
    int wright_digits = 17;
    std::string wright_out;
    wright->add_option("--max-ell", wright_max_ell, "Largest ell (<= 2000)")
        ->check(CLI::Range(0LL, 2000LL))
        ->capture_default_str();
    wright->add_option("--digits", wright_digits, "Significant digits")
        ->check(CLI::Range(3, 40))
        ->capture_default_str();
    wright->add_option("--out", wright_out, "Output file (default: stdout)");

    // fk ---------------------------------------------------------------------
    auto* fk = app.add_subcommand(
        "fk", "Tabulate f_k(lambda) over a lambda grid as CSV");
    std::string fk_k = "2,3,4,6";
    std::string fk_lambda = "-1.75:3.75:0.05";
    double fk_tol = 1e-8;
    int fk_threads = -1;
    std::string fk_out;
    fk->add_option("--k", fk_k, "Comma-separated k values in [2, 8]")
        ->capture_default_str();
    fk->add_option("--lambda", fk_lambda, "Grid lo:hi:step or single value")
        ->capture_default_str();
    fk->add_option("--tol", fk_tol, "Quadrature relative tolerance")
        ->check(CLI::Range(1e-13, 1e-2))
        ->capture_default_str();
    fk->add_option("--threads", fk_threads,
                   "Worker threads (0 = auto; default: CRITWIN_THREADS or auto)");
    fk->add_option("--out", fk_out, "Output file (default: stdout)");

    // fk0 --------------------------------------------------------------------
    auto* fk0 = app.add_subcommand(
        "fk0", "f_k(0) by the rigorous series: prints value,error_bound");
    int fk0_k = 2;
    long long fk0_ell0 = 75;
    int fk0_digits = 17;
    std::string fk0_out;
    fk0->add_option("--k", fk0_k, "Moment order k >= 2")
        ->check(CLI::Range(2, 8))
        ->capture_default_str();
    fk0->add_option("--ell0", fk0_ell0, "Series truncation index")
        ->check(CLI::Range(4LL, 2000LL))
        ->capture_default_str();
    fk0->add_option("--digits", fk0_digits, "Significant digits")
        ->check(CLI::Range(3, 40))
        ->capture_default_str();
    fk0->add_option("--out", fk0_out, "Output file (default: stdout)");

    // profile ------------------------------------------------------------------
    auto* profile = app.add_subcommand(
        "profile", "CSV profile of log f_2 and its lambda-derivatives");
    double profile_lo = -1.75;
    double profile_hi = 3.75;
    double profile_step = 0.05;
    double profile_tol = 1e-8;
    int profile_threads = -1;
    std::string profile_out;
    profile->add_option("--lo", profile_lo, "Grid start")->capture_default_str();
    profile->add_option("--hi", profile_hi, "Grid end")->capture_default_str();
    profile->add_option("--step", profile_step, "Grid step")
        ->check(CLI::Range(1e-6, 10.0))
        ->capture_default_str();
    profile->add_option("--tol", profile_tol, "Quadrature relative tolerance")
        ->check(CLI::Range(1e-13, 1e-2))
        ->capture_default_str();
    profile->add_option("--threads", profile_threads,
                        "Worker threads (0 = auto)");
    profile->add_option("--out", profile_out, "Output file (default: stdout)");

    // maximize -----------------------------------------------------------------
    auto* maximize = app.add_subcommand(
        "maximize", "Locate the maximizer of d/dlambda log f_2 (JSON report)");
    double maximize_lo = -2.0;
    double maximize_hi = 4.0;
    double maximize_tol = 1e-6;
    double maximize_quad_tol = 1e-9;
    int maximize_threads = -1;
    std::string maximize_out;
    maximize->add_option("--lo", maximize_lo, "Window start")
        ->capture_default_str();
    maximize->add_option("--hi", maximize_hi, "Window end")
        ->capture_default_str();
    maximize->add_option("--tol", maximize_tol, "Bracket width target")
        ->check(CLI::Range(1e-12, 1.0))
        ->capture_default_str();
    maximize->add_option("--quad-tol", maximize_quad_tol,
                         "Quadrature relative tolerance")
        ->check(CLI::Range(1e-13, 1e-2))
        ->capture_default_str();
    maximize->add_option("--threads", maximize_threads,
                         "Worker threads (0 = auto)");
    maximize->add_option("--out", maximize_out, "Output file (default: stdout)");

    // simulate -------------------------------------------------------------------
    auto* simulate = app.add_subcommand(
        "simulate", "Monte Carlo estimators in the critical window (JSON)");
    long long sim_n = 1000000;
    double sim_lambda = 0.0;
    long long sim_reps = 200;
    std::uint64_t sim_seed = 42;
    std::string sim_estimands = "x2,dlogchi,d1,d2,twolarge";
    int sim_threads = -1;
    std::string sim_out;
    simulate->add_option("--n", sim_n, "Number of vertices")
        ->check(CLI::Range(1LL, 1'500'000'000LL))
        ->capture_default_str();
    simulate->add_option("--lambda", sim_lambda, "Window location parameter")
        ->capture_default_str();
    simulate->add_option("--reps", sim_reps, "Replicates")
        ->check(CLI::Range(1LL, 100'000'000LL))
        ->capture_default_str();
    simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    simulate
        ->add_option("--estimands", sim_estimands,
                     "Comma-separated subset of x2,dlogchi,d1,d2,twolarge")
        ->capture_default_str();
    simulate->add_option("--threads", sim_threads, "Worker threads (0 = auto)");
    simulate->add_option("--out", sim_out, "Output file (default: stdout)");

    // cycle --------------------------------------------------------------------
    auto* cycle = app.add_subcommand(
        "cycle", "Cycle-graph susceptibility: closed form and window scan");
    long long cycle_n = 1000;
    double cycle_p = 0.0;
    bool cycle_scan = false;
    std::string cycle_pgrid;
    std::string cycle_out;
    cycle->add_option("--n", cycle_n, "Cycle length")
        ->check(CLI::Range(3LL, 20'000'000LL))
        ->capture_default_str();
    auto* cycle_p_opt =
        cycle->add_option("--p", cycle_p, "Evaluate at a single p in [0, 1]");
    cycle->add_flag("--scan", cycle_scan,
                    "Scan the connectivity window for the log-derivative peak");
    cycle->add_option("--pgrid", cycle_pgrid,
                      "Scan grid lo:hi:step (default: window around 1 - c/n)");
    cycle->add_option("--out", cycle_out, "Output file (default: stdout)");

    // verify -------------------------------------------------------------------
    auto* verify = app.add_subcommand(
        "verify", "Run the cross-check suites and print a pass/fail table");
    std::string verify_suite = "all";
    bool verify_quick = false;
    bool verify_full = false;
    std::uint64_t verify_seed = 1;
    int verify_threads = -1;
    verify
        ->add_option("--suite", verify_suite,
                     "One of all, scaling, excursion, oracles, mc")
        ->capture_default_str();
    verify->add_flag("--quick", verify_quick,
                     "Fast tier only (default; < 1 minute)");
    verify->add_flag("--full", verify_full,
                     "Include the Monte Carlo tiers (minutes)");
    verify->add_option("--seed", verify_seed, "RNG seed for the MC checks")
        ->capture_default_str();
    verify->add_option("--threads", verify_threads, "Worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (wright->parsed()) {
            return run_wright(wright_max_ell, wright_digits, wright_out);
        }
        if (fk->parsed()) {
            return run_fk(fk_k, fk_lambda, fk_tol, effective_threads(fk_threads),
                          fk_out);
        }
        if (fk0->parsed()) {
            return run_fk0(fk0_k, fk0_ell0, fk0_digits, fk0_out);
        }
        if (profile->parsed()) {
            return run_profile(profile_lo, profile_hi, profile_step, profile_tol,
                               effective_threads(profile_threads), profile_out);
        }
        if (maximize->parsed()) {
            return run_maximize(maximize_lo, maximize_hi, maximize_tol,
                                maximize_quad_tol,
                                effective_threads(maximize_threads), maximize_out);
        }
        if (simulate->parsed()) {
            return run_simulate(sim_n, sim_lambda, sim_reps, sim_seed,
                                sim_estimands, effective_threads(sim_threads),
                                sim_out);
        }
        if (cycle->parsed()) {
            return run_cycle(cycle_n, cycle_p, cycle_p_opt->count() > 0,
                             cycle_scan, cycle_pgrid, cycle_out);
        }
        if (verify->parsed()) {
            if (verify_quick && verify_full) {
                throw UsageError("verify: --quick and --full are exclusive");
            }
            return run_verify(verify_suite, verify_full, verify_seed,
                              effective_threads(verify_threads));
        }
        throw UsageError("no subcommand selected");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cli
}  // namespace critwin
