#include "critwin/scaling.hpp"

#include "critwin/excursion.hpp"
#include "critwin/parallel.hpp"
#include "critwin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace critwin {
namespace scaling {

namespace {

constexpr double kLambdaZeroSnap = 1e-12;  // |lambda| below this routes to the series
constexpr long long kDefaultEll0 = 75;     // tail bound < 1e-17 for all k <= 6

// Shared, lazily grown log w_l table for the double-precision integrand.
// Callers hold a snapshot, so concurrent growth never invalidates a reader.
std::shared_ptr<const std::vector<double>> log_wright_snapshot(long long max_ell) {
    static std::mutex mutex;
    static std::shared_ptr<const std::vector<double>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    if (!cache || static_cast<long long>(cache->size()) <= max_ell) {
        const long long have = cache ? static_cast<long long>(cache->size()) : 0;
        const long long build = std::max({max_ell + 1, 2 * have, 256LL});
        cache = std::make_shared<const std::vector<double>>(
            excursion::log_wright_doubles(build));
    }
    return cache;
}

// log sum_{l=0}^{L} w_l x^(3l/2) for x > 0.  The terms are unimodal in l
// (log w_l is concave-decreasing faster than the geometric factor grows), so
// we walk to the peak near l* ~ x^3/12 and accumulate outward until terms
// are negligible.
double log_wright_series(double x, const std::vector<double>& log_w) {
    const long long max_l = static_cast<long long>(log_w.size()) - 1;
    const double step = 1.5 * std::log(x);
    const auto term = [&](long long l) {
        return log_w[static_cast<std::size_t>(l)] + static_cast<double>(l) * step;
    };
    long long center = std::clamp(
        static_cast<long long>(std::llround(x * x * x / 12.0)), 0LL, max_l);
    while (center + 1 <= max_l && term(center + 1) > term(center)) {
        ++center;
    }
    while (center - 1 >= 0 && term(center - 1) > term(center)) {
        --center;
    }
    const double peak = term(center);
    double acc = 1.0;
    for (long long l = center + 1; l <= max_l; ++l) {
        const double rel = std::exp(term(l) - peak);
        acc += rel;
        if (rel < 1e-20) {
            break;
        }
    }
    for (long long l = center - 1; l >= 0; --l) {
        const double rel = std::exp(term(l) - peak);
        acc += rel;
        if (rel < 1e-20) {
            break;
        }
    }
    return peak + std::log(acc);
}

// Series length so that the peak l* ~ x_max^3/12 plus ten standard
// deviations of its width fits in the table.
long long table_length_for(double x_max) {
    const double peak = x_max * x_max * x_max / 12.0;
    return static_cast<long long>(peak + 10.0 * std::sqrt(peak) + 64.0);
}

struct Integrand {
    int k = 2;
    double lambda = 0.0;
    std::shared_ptr<const std::vector<double>> log_w;

    // Integrand of f_k after x = u^2, i.e. 2u * x^(k-5/2) Lambda-core(x):
    // the substitution removes the x^(-1/2) endpoint behavior at k = 2.
    double operator()(double u) const {
        if (u <= 0.0) {
            // Continuous limit: 2 u^(2k-4) -> {2 if k == 2, 0 if k > 2},
            // times (2 pi)^(-1/2) (F(0) = 0 and the series head is w_0 = 1).
            return k == 2 ? 2.0 / std::sqrt(2.0 * M_PI) : 0.0;
        }
        const double x = u * u;
        const double log_value = std::log(2.0) + (2.0 * k - 4.0) * std::log(u) -
                                 big_f(x, lambda) + log_wright_series(x, *log_w) -
                                 0.5 * std::log(2.0 * M_PI);
        return log_value > -745.0 ? std::exp(log_value) : 0.0;
    }
};

const xreal& pi_x() {
    static const xreal value = 4 * atan(xreal(1));
    return value;
}

}  // namespace

double big_f(double x, double lambda) {
    if (!(x >= 0.0)) {
        throw std::domain_error("big_f: requires x >= 0");
    }
    const double shifted = x - lambda;
    return (shifted * shifted * shifted + lambda * lambda * lambda) / 6.0;
}

double lambda_intensity(double x, double lambda, long long ell0) {
    if (!(x > 0.0) || ell0 < 1) {
        throw std::invalid_argument("lambda_intensity: requires x > 0 and ell0 >= 1");
    }
    const auto log_w = log_wright_snapshot(ell0);
    // Plain log-sum-exp over the requested truncation range.
    const double step = 1.5 * std::log(x);
    double peak = -std::numeric_limits<double>::infinity();
    for (long long l = 0; l <= ell0; ++l) {
        peak = std::max(peak, (*log_w)[static_cast<std::size_t>(l)] + l * step);
    }
    double acc = 0.0;
    for (long long l = 0; l <= ell0; ++l) {
        acc += std::exp((*log_w)[static_cast<std::size_t>(l)] + l * step - peak);
    }
    const double log_value = -0.5 * std::log(2.0 * M_PI) - 2.5 * std::log(x) -
                             big_f(x, lambda) + peak + std::log(acc);
    return std::exp(log_value);
}

xreal ikl_exact(int k, long long ell, const PrecisionSpec& prec) {
    if (k < 2 || ell < 0) {
        throw std::invalid_argument("ikl_exact: requires k >= 2 and ell >= 0");
    }
    const xreal exponent = xreal(2 * k + 3 * (ell - 1)) / 6;  // k/3 + (l-1)/2
    return pow(xreal(6), exponent) * specfun::gamma(exponent, prec) / 3;
}

RigorousValue fk_zero(int k, long long ell0, const PrecisionSpec& prec) {
    specfun::validate(prec);
    if (k < 2 || 3 * (ell0 + 1) < 2 * k) {
        throw std::invalid_argument("fk_zero: requires k >= 2 and ell0 >= 2k/3 - 1");
    }
    const std::vector<xreal> wright = excursion::wright_constants(ell0, prec);
    xreal sum = 0;  // ascending l; all terms positive, no cancellation
    for (long long l = 0; l <= ell0; ++l) {
        sum += wright[static_cast<std::size_t>(l)] * ikl_exact(k, l, prec);
    }
    sum /= sqrt(2 * pi_x());

    RigorousValue out;
    out.value = sum;
    // Rounding budget: ~4 extended-precision operations per term at ~1e-50
    // relative each; 1e-48 per term is generous.
    const double rounding = static_cast<double>(sum) * 1e-48 *
                            static_cast<double>(ell0 + 1);
    out.error_bound = specfun::series_tail_bound(k, ell0) + rounding;
    return out;
}

QuadratureValue fk_quadrature_full(int k, double lambda, double tol) {
    if (k < 2 || !(tol > 0.0)) {
        throw std::invalid_argument("fk_quadrature: requires k >= 2 and tol > 0");
    }
    const double x_max = std::max(20.0, 2.0 * lambda + 20.0);

    Integrand f;
    f.k = k;
    f.lambda = lambda;
    f.log_w = log_wright_snapshot(table_length_for(x_max));

    // Breakpoints (in u = sqrt(x)): the integrand peaks near x = 2 lambda for
    // large positive lambda; seeding splits there and at x = 1 keeps the
    // adaptive pass cheap.
    std::vector<double> points{0.0};
    for (const double x_split : {1.0, 2.0 * lambda - 6.0, 2.0 * lambda,
                                 2.0 * lambda + 6.0}) {
        if (x_split > 0.0 && x_split < x_max) {
            points.push_back(std::sqrt(x_split));
        }
    }
    points.push_back(std::sqrt(x_max));
    std::sort(points.begin(), points.end());

    quadrature::Options options;
    options.abs_tol = 0.0;
    options.rel_tol = tol;
    options.max_subdivisions = 4000;
    const quadrature::Result result =
        quadrature::integrate_segments(f, points, options);
    if (!result.converged || !(result.value > 0.0) || !std::isfinite(result.value)) {
        std::ostringstream diag;
        diag << "fk_quadrature: no convergence for k=" << k << " lambda=" << lambda
             << " tol=" << tol << " (value=" << result.value
             << ", error_estimate=" << result.error_estimate
             << ", subdivisions=" << result.subdivisions
             << ", evaluations=" << result.evaluations << ")";
        throw std::runtime_error(diag.str());
    }

    // Domain-truncation allowance: e^(-F) decays faster than exponentially
    // past x_max (F grows like x^3/6), so the integrand value at the cut
    // dominates the tail; 1e-15 floors in the heuristic l-truncation.
    const double tail = f(std::sqrt(x_max));
    QuadratureValue out;
    out.value = result.value;
    out.relative_error_estimate =
        std::max((result.error_estimate + tail) / result.value, 1e-15);
    return out;
}

double fk_quadrature(int k, double lambda, double tol) {
    return fk_quadrature_full(k, lambda, tol).value;
}

double fk_eval(int k, double lambda, double tol) {
    if (std::fabs(lambda) < kLambdaZeroSnap) {
        return static_cast<double>(fk_zero(k, kDefaultEll0).value);
    }
    return fk_quadrature(k, lambda, tol);
}

double fk_derivative(int k, double lambda, int order, double tol) {
    if (order == 1) {
        return 0.5 * fk_eval(k + 2, lambda, tol) - lambda * fk_eval(k + 1, lambda, tol);
    }
    if (order == 2) {
        return 0.25 * fk_eval(k + 4, lambda, tol) - lambda * fk_eval(k + 3, lambda, tol) +
               lambda * lambda * fk_eval(k + 2, lambda, tol) - fk_eval(k + 1, lambda, tol);
    }
    throw std::invalid_argument("fk_derivative: order must be 1 or 2");
}

ScalingProfile log_f_profile(const std::vector<double>& lambda_grid,
                             const std::vector<int>& k_set, double tol, int threads) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("log_f_profile: tol > 0 required");
    }
    std::set<int> needed(k_set.begin(), k_set.end());
    for (const int k : {2, 3, 4, 5, 6}) {  // derivative stencil for f_2
        needed.insert(k);
    }
    for (const int k : needed) {
        if (k < 2) {
            throw std::invalid_argument("log_f_profile: every k must be >= 2");
        }
    }

    ScalingProfile profile;
    profile.k_set = k_set;
    const long long n_rows = static_cast<long long>(lambda_grid.size());
    std::vector<ProfileRow> rows = map_blocks<ProfileRow>(
        n_rows, 1, threads, [&](long long index, long long, long long) {
            const double lambda = lambda_grid[static_cast<std::size_t>(index)];
            ProfileRow row;
            row.lambda = lambda;
            try {
                std::map<int, double> fk;
                double max_rel_err = 0.0;
                for (const int k : needed) {
                    if (std::fabs(lambda) < kLambdaZeroSnap) {
                        const RigorousValue rv = fk_zero(k, kDefaultEll0);
                        fk[k] = static_cast<double>(rv.value);
                        max_rel_err = std::max(
                            max_rel_err, rv.error_bound / fk[k] + 1e-16);
                    } else {
                        const QuadratureValue qv = fk_quadrature_full(k, lambda, tol);
                        fk[k] = qv.value;
                        max_rel_err = std::max(max_rel_err, qv.relative_error_estimate);
                    }
                }
                for (const int k : k_set) {
                    row.fk[k] = fk[k];
                }
                const double f2 = fk[2];
                row.f2_prime = 0.5 * fk[4] - lambda * fk[3];
                row.f2_second = 0.25 * fk[6] - lambda * fk[5] +
                                lambda * lambda * fk[4] - fk[3];
                row.log_f2 = std::log(f2);
                row.dlog_f2 = row.f2_prime / f2;
                row.d2log_f2 = (f2 * row.f2_second - row.f2_prime * row.f2_prime) /
                               (f2 * f2);
                row.quadrature_error_estimate = max_rel_err;
            } catch (const std::exception& e) {
                row.ok = false;
                row.note = e.what();
                const double nan = std::numeric_limits<double>::quiet_NaN();
                row.fk.clear();
                row.f2_prime = row.f2_second = nan;
                row.log_f2 = row.dlog_f2 = row.d2log_f2 = nan;
                row.quadrature_error_estimate = nan;
            }
            return row;
        });
    profile.rows = std::move(rows);
    return profile;
}

double asymptotic_reference(int k, double lambda) {
    if (k < 2) {
        throw std::invalid_argument("asymptotic_reference: requires k >= 2");
    }
    if (lambda == 0.0) {
        throw std::domain_error("asymptotic_reference: lambda must be nonzero");
    }
    if (lambda < 0.0) {
        return static_cast<double>(specfun::semifactorial(2 * k - 5)) /
               std::pow(-lambda, 2 * k - 3);
    }
    return std::pow(2.0 * lambda, k);
}

}  // namespace scaling
}  // namespace critwin
