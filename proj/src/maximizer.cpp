#include "critwin/maximizer.hpp"

#include "critwin/io.hpp"
#include "critwin/parallel.hpp"
#include "critwin/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace critwin {
namespace maximizer {

namespace {

// g(lambda) = d/dlambda log f_2 = (f_2'/f_2)(lambda).
double log_derivative(double lambda, double quad_tol) {
    const double f2 = scaling::fk_eval(2, lambda, quad_tol);
    const double f3 = scaling::fk_eval(3, lambda, quad_tol);
    const double f4 = scaling::fk_eval(4, lambda, quad_tol);
    return (0.5 * f4 - lambda * f3) / f2;
}

}  // namespace

MaximizerReport find_maximizer(double lo, double hi, double tol, double quad_tol,
                               int threads) {
    if (!(lo < hi) || !(tol > 0.0)) {
        throw std::invalid_argument("find_maximizer: requires lo < hi and tol > 0");
    }

    const int n_steps =
        std::max(2, static_cast<int>(std::ceil((hi - lo) / 0.05)));
    const double step = (hi - lo) / n_steps;
    std::vector<double> grid(static_cast<std::size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i) {
        grid[static_cast<std::size_t>(i)] = lo + i * step;
    }
    const std::vector<double> values = map_blocks<double>(
        n_steps + 1, 1, threads, [&](long long index, long long, long long) {
            return log_derivative(grid[static_cast<std::size_t>(index)], quad_tol);
        });

    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }

    // Unimodality as observed on the grid: successive differences show
    // exactly one sign change, from rising to falling.
    int sign_changes = 0;
    int previous_sign = 0;
    int first_sign = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double diff = values[i + 1] - values[i];
        const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
        if (sign == 0) {
            continue;
        }
        if (first_sign == 0) {
            first_sign = sign;
        } else if (sign != previous_sign) {
            ++sign_changes;
        }
        previous_sign = sign;
    }
    const bool unimodal =
        first_sign > 0 && previous_sign < 0 && sign_changes == 1;

    MaximizerReport report;
    report.grid_step = step;
    report.unimodal_observed = unimodal;
    report.boundary = best == 0 || best + 1 == values.size();
    report.bracket_lo = grid[best == 0 ? 0 : best - 1];
    report.bracket_hi = grid[std::min(best + 1, values.size() - 1)];
    report.lambda_star = grid[best];
    report.g_star = values[best];
    if (report.boundary) {
        return report;  // window too small; refinement would be meaningless
    }

    // Golden-section refinement inside the winning bracket.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = report.bracket_lo;
    double b = report.bracket_hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double g1 = log_derivative(x1, quad_tol);
    double g2 = log_derivative(x2, quad_tol);
    for (int iter = 0; iter < 200 && (b - a) > tol; ++iter) {
        if (g1 < g2) {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + inv_phi * (b - a);
            g2 = log_derivative(x2, quad_tol);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - inv_phi * (b - a);
            g1 = log_derivative(x1, quad_tol);
        }
    }
    const double center = 0.5 * (a + b);
    const double g_center = log_derivative(center, quad_tol);
    report.lambda_star = center;
    report.g_star = g_center;
    // Keep the invariant g_star >= every sampled value even under quadrature
    // noise at the tolerance floor.
    if (g1 > report.g_star) {
        report.lambda_star = x1;
        report.g_star = g1;
    }
    if (g2 > report.g_star) {
        report.lambda_star = x2;
        report.g_star = g2;
    }
    if (values[best] > report.g_star) {
        report.lambda_star = grid[best];
        report.g_star = values[best];
    }
    return report;
}

std::string profile_csv_text(double lambda_lo, double lambda_hi, double step,
                             double quad_tol, int threads,
                             const std::string& preamble) {
    if (!(lambda_lo < lambda_hi) || !(step > 0.0)) {
        throw std::invalid_argument(
            "profile_csv_text: requires lambda_lo < lambda_hi and step > 0");
    }
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double lambda = lambda_lo + i * step;
        if (lambda > lambda_hi + step * 1e-9) {
            break;
        }
        grid.push_back(lambda);
    }

    const scaling::ScalingProfile profile =
        scaling::log_f_profile(grid, {2}, quad_tol, threads);

    std::ostringstream out;
    if (!preamble.empty()) {
        out << preamble << "\n";
    }
    out << "lambda,log_f,dlog_f,d2log_f\n";
    for (const scaling::ProfileRow& row : profile.rows) {
        if (!row.ok) {
            throw std::runtime_error("profile_csv_text: row lambda=" +
                                     io::format_number(row.lambda) +
                                     " failed: " + row.note);
        }
        out << io::format_number(row.lambda) << ',' << io::format_number(row.log_f2)
            << ',' << io::format_number(row.dlog_f2) << ','
            << io::format_number(row.d2log_f2) << "\n";
    }
    return out.str();
}

void emit_profile_csv(double lambda_lo, double lambda_hi, double step,
                      const std::string& path, double quad_tol, int threads,
                      const std::string& preamble) {
    io::write_text_file(
        path, profile_csv_text(lambda_lo, lambda_hi, step, quad_tol, threads,
                               preamble));
}

}  // namespace maximizer
}  // namespace critwin
