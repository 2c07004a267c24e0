// specfun.hpp -- extended-precision gamma and the explicit inequality bounds
// shared by the analytic modules (series truncation, Wright-constant bounds).
//
// All "bound" functions return rigorous upper bounds: they are evaluated in a
// way that rounds outward, so the returned double still dominates the exact
// mathematical quantity despite floating-point rounding.

#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>

namespace critwin {

// Extended-precision real (~50 significant decimal digits, wide exponent
// range).  Used wherever double precision cannot certify the target digits.
using xreal = boost::multiprecision::cpp_bin_float_50;

// Requested precision for extended-precision results.  The backend carries
// ~50 digits; we cap requests at 40 so at least 8 guard digits remain.
struct PrecisionSpec {
    int significant_decimal_digits = 30;
};

namespace specfun {

inline constexpr int kMinDigits = 15;
inline constexpr int kMaxDigits = 40;

// Throws std::invalid_argument unless kMinDigits <= digits <= kMaxDigits.
void validate(const PrecisionSpec& prec);

// Gamma function for x > 0 with relative error well below
// 10^(-digits+2).  Implementation: Stirling's series with exact rational
// Bernoulli coefficients and a rigorously bounded remainder; the argument is
// first shifted upward by the recurrence until the remainder bound is
// negligible, then shifted back.  Throws std::domain_error for x <= 0.
xreal gamma(const xreal& x, const PrecisionSpec& prec = {});

// Semifactorial m!! = 1*3*5*...*m for odd m >= 1, with (-1)!! = 1.
// Throws std::domain_error for even or smaller m, std::overflow_error if the
// exact value does not fit in a signed 64-bit integer (m > 33).
long long semifactorial(long long m);

// Upper bound 5 * ell0^s * 2^(-ell0) for the tail sum_{l > ell0} l^s 2^(-l),
// valid whenever ell0 >= 2s.  Throws std::invalid_argument otherwise.
double tail_geometric_bound(double s, long long ell0);

// Upper bound 2*sqrt(pi) * (3l)^(k/3-1) * (3l/e)^(l/2) * e^(2k^2/(9l)) for
// the moment integral I_{k,l}.  Requires k >= 2, l >= 1.
double ikl_upper(int k, long long ell);

// Upper bound 8/sqrt(pi) * sqrt(l) * (e/(12l))^(l/2) for the Wright
// constant w_l.  Requires l >= 1.
double wl_upper(long long ell);

// Natural logs of the two bounds above (same outward rounding, but immune to
// double overflow/underflow; used for term-wise comparisons at large l).
double log_ikl_upper(int k, long long ell);
double log_wl_upper(long long ell);

// Rigorous bound 11 * e^(2k^2/(9 ell0)) * 3^(k/3) * ell0^(k/3-1/2) * 2^(-ell0)
// on the tail sum_{l > ell0} (2 pi)^(-1/2) w_l I_{k,l} of the lambda = 0
// moment series.  Requires k >= 2 and ell0 >= 2k/3 - 1.
double series_tail_bound(int k, long long ell0);

}  // namespace specfun
}  // namespace critwin
