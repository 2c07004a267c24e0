#include "critwin/specfun.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace critwin {
namespace specfun {

namespace {

using rational = boost::multiprecision::cpp_rational;

// Outward-rounding slack: a handful of double-precision elementary
// operations cost a few ulp each; a relative margin of 1e-12 dominates that
// comfortably while staying irrelevant for the bounds' use as tolerances.
constexpr double kOutwardFactor = 1.0 + 1e-12;

// Adding DBL_MIN keeps the outward margin effective even when the result is
// subnormal (where multiplicative slack can round away) or underflows to 0.
double outward(double log_value) {
    return std::exp(log_value) * kOutwardFactor + std::numeric_limits<double>::min();
}

// Inflate a log-space bound outward.  The absolute error of assembling the
// log is a few ulp of its magnitude, so scale the margin accordingly.
double outward_log(double log_value) {
    return log_value + 1e-12 * (1.0 + std::fabs(log_value));
}

// Stirling-series coefficients B_{2j} / ((2j)(2j-1)), j = 1..25, plus the
// j = 26 coefficient used only for the remainder bound.  The Bernoulli
// numbers are generated exactly from the defining recurrence
//   sum_{j=0}^{m} C(m+1, j) B_j = 0,  B_0 = 1,
// in rational arithmetic, so there is no transcribed table to get wrong.
std::vector<xreal> make_stirling_coefficients() {
    const int max_index = 52;
    std::vector<rational> bernoulli(max_index + 1);
    bernoulli[0] = 1;
    for (int m = 1; m <= max_index; ++m) {
        rational acc = 0;
        rational binom = 1;  // C(m+1, 0)
        for (int j = 0; j < m; ++j) {
            acc += binom * bernoulli[j];
            binom = binom * (m + 1 - j) / (j + 1);  // -> C(m+1, j+1)
        }
        bernoulli[m] = -acc / (m + 1);
    }
    std::vector<xreal> coeffs;
    for (int j = 1; 2 * j <= max_index; ++j) {
        const rational c = bernoulli[2 * j] / rational((2 * j) * (2 * j - 1));
        coeffs.push_back(xreal(boost::multiprecision::numerator(c)) /
                         xreal(boost::multiprecision::denominator(c)));
    }
    return coeffs;
}

const std::vector<xreal>& stirling_coefficients() {
    static const std::vector<xreal> coeffs = make_stirling_coefficients();
    return coeffs;
}

const xreal& pi_x() {
    static const xreal value = 4 * atan(xreal(1));
    return value;
}

}  // namespace

void validate(const PrecisionSpec& prec) {
    if (prec.significant_decimal_digits < kMinDigits ||
        prec.significant_decimal_digits > kMaxDigits) {
        throw std::invalid_argument(
            "PrecisionSpec: significant_decimal_digits must lie in [" +
            std::to_string(kMinDigits) + ", " + std::to_string(kMaxDigits) + "]");
    }
}

xreal gamma(const xreal& x, const PrecisionSpec& prec) {
    validate(prec);
    if (!(x > 0)) {
        throw std::domain_error("gamma: argument must be positive");
    }

    // Shift the argument up to z >= 40, where 25 Stirling terms leave a
    // remainder below |B_52| / (52*51*40^51) < 1e-58 -- far beyond the 40
    // digits this artifact may request.
    const xreal shift_target = 40;
    xreal z = x;
    xreal shift_product = 1;
    while (z < shift_target) {
        shift_product *= z;
        z += 1;
    }

    const std::vector<xreal>& coeffs = stirling_coefficients();
    const xreal inv = 1 / z;
    const xreal inv2 = inv * inv;
    xreal series = 0;
    xreal power = inv;
    for (std::size_t j = 0; j + 1 < coeffs.size(); ++j) {  // drop the remainder-only term
        series += coeffs[j] * power;
        power *= inv2;
    }
    const xreal half = xreal(1) / 2;
    const xreal log_gamma_z =
        (z - half) * log(z) - z + half * log(2 * pi_x()) + series;
    return exp(log_gamma_z) / shift_product;
}

long long semifactorial(long long m) {
    if (m == -1) {
        return 1;
    }
    if (m < -1 || m % 2 == 0) {
        throw std::domain_error("semifactorial: argument must be odd and >= -1");
    }
    if (m > 33) {  // 35!! exceeds the signed 64-bit range
        throw std::overflow_error("semifactorial: result exceeds 64-bit range");
    }
    long long result = 1;
    for (long long j = 1; j <= m; j += 2) {
        result *= j;
    }
    return result;
}

double tail_geometric_bound(double s, long long ell0) {
    if (!(s >= 0) || ell0 < 0 || 2.0 * s > static_cast<double>(ell0)) {
        throw std::invalid_argument("tail_geometric_bound: requires s >= 0 and ell0 >= 2s");
    }
    const double l0 = static_cast<double>(ell0);
    const double log_value = std::log(5.0) + (s == 0.0 ? 0.0 : s * std::log(l0)) -
                             l0 * std::log(2.0);
    return outward(log_value);
}

double log_ikl_upper(int k, long long ell) {
    if (k < 2 || ell < 1) {
        throw std::invalid_argument("ikl_upper: requires k >= 2 and ell >= 1");
    }
    const double l = static_cast<double>(ell);
    const double log_value = std::log(2.0) + 0.5 * std::log(M_PI) +
                             (k / 3.0 - 1.0) * std::log(3.0 * l) +
                             0.5 * l * (std::log(3.0 * l) - 1.0) +
                             2.0 * k * k / (9.0 * l);
    return outward_log(log_value);
}

double ikl_upper(int k, long long ell) {
    return outward(log_ikl_upper(k, ell));
}

double log_wl_upper(long long ell) {
    if (ell < 1) {
        throw std::invalid_argument("wl_upper: requires ell >= 1");
    }
    const double l = static_cast<double>(ell);
    const double log_value = std::log(8.0) - 0.5 * std::log(M_PI) +
                             0.5 * std::log(l) +
                             0.5 * l * (1.0 - std::log(12.0 * l));
    return outward_log(log_value);
}

double wl_upper(long long ell) {
    return outward(log_wl_upper(ell));
}

double series_tail_bound(int k, long long ell0) {
    if (k < 2 || 3 * (ell0 + 1) < 2 * k) {
        throw std::invalid_argument(
            "series_tail_bound: requires k >= 2 and ell0 >= 2k/3 - 1");
    }
    const double l0 = static_cast<double>(ell0);
    const double log_value = std::log(11.0) + 2.0 * k * k / (9.0 * l0) +
                             (k / 3.0) * std::log(3.0) +
                             (k / 3.0 - 0.5) * std::log(l0) - l0 * std::log(2.0);
    return outward(log_value);
}

}  // namespace specfun
}  // namespace critwin
