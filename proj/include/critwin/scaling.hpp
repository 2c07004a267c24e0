// scaling.hpp -- the scaling function f_k(lambda) of the critical window and
// its derivatives.
//
// Two independent evaluation routes:
//   * lambda = 0: a positive series in the Wright constants with a rigorous
//     truncation bound (extended precision, ~16 certified digits);
//   * general lambda: adaptive quadrature of x^k Lambda^(lambda)(x) over
//     (0, x_max] after the substitution x = u^2 (double precision).
// The two routes agreeing at lambda = 0 is one of the artifact's central
// cross-checks.

#pragma once

#include "critwin/specfun.hpp"

#include <map>
#include <string>
#include <vector>

namespace critwin {
namespace scaling {

// Extended-precision value together with a proven bound on |value - true|.
// The bound covers both series truncation and accumulated rounding.
struct RigorousValue {
    xreal value;
    double error_bound = 0.0;
};

// One row of the scaling profile.  `ok` is false when quadrature failed to
// converge for this row; such rows carry the diagnostic in `note` and NaN
// values, and downstream consumers must check the flag.
struct ProfileRow {
    double lambda = 0.0;
    std::map<int, double> fk;  // k -> f_k(lambda) for the requested k set
    double f2_prime = 0.0;     // d/dlambda f_2
    double f2_second = 0.0;    // d^2/dlambda^2 f_2
    double log_f2 = 0.0;
    double dlog_f2 = 0.0;      // f_2'/f_2
    double d2log_f2 = 0.0;     // (f_2 f_2'' - f_2'^2)/f_2^2
    double quadrature_error_estimate = 0.0;  // max relative estimate in the row
    bool ok = true;
    std::string note;
};

struct ScalingProfile {
    std::vector<int> k_set;
    std::vector<ProfileRow> rows;
};

// F(x, lambda) = ((x - lambda)^3 + lambda^3) / 6, the exponent of the
// intensity; requires x >= 0.
double big_f(double x, double lambda);

// Intensity (2 pi)^(-1/2) x^(-5/2) e^(-F(x,lambda)) sum_{l<=ell0} w_l x^(3l/2)
// of the limiting point process of rescaled component sizes; x > 0, ell0 >= 1.
double lambda_intensity(double x, double lambda, long long ell0);

// Moment integral I_{k,l} = (1/3) 6^(k/3+(l-1)/2) Gamma(k/3 + (l-1)/2) at
// lambda = 0; k >= 2, l >= 0.
xreal ikl_exact(int k, long long ell, const PrecisionSpec& prec = {});

// f_k(0) by the truncated series sum_{l=0}^{ell0} (2 pi)^(-1/2) w_l I_{k,l}.
// All terms are positive, so the value is a lower bound on f_k(0); the
// rigorous error_bound adds the closed-form tail bound and a rounding budget.
// Requires k >= 2 and ell0 >= 2k/3 - 1.
RigorousValue fk_zero(int k, long long ell0, const PrecisionSpec& prec = {});

// f_k(lambda) = int_0^inf x^k Lambda^(lambda)(x) dx by adaptive quadrature
// with estimated relative error <= tol.  Throws std::runtime_error with
// diagnostics if the refinement budget is exhausted before convergence.
double fk_quadrature(int k, double lambda, double tol = 1e-10);

// Same, but also reports the relative error estimate (quadrature estimate
// plus domain-truncation allowance).
struct QuadratureValue {
    double value = 0.0;
    double relative_error_estimate = 0.0;
};
QuadratureValue fk_quadrature_full(int k, double lambda, double tol = 1e-10);

// f_k(lambda) routed to the rigorous series when lambda is (numerically) 0
// and to quadrature otherwise.
double fk_eval(int k, double lambda, double tol = 1e-10);

// Analytic derivatives obtained by differentiating under the integral sign:
//   d/dlambda   f_k = 1/2 f_{k+2} - lambda f_{k+1}
//   d^2/dlambda^2 f_k = 1/4 f_{k+4} - lambda f_{k+3} + lambda^2 f_{k+2} - f_{k+1}
// (the second line is the first applied to itself plus the product rule).
// order must be 1 or 2.
double fk_derivative(int k, double lambda, int order, double tol = 1e-10);

// Profile of f_k, log f_2 and its first two lambda-derivatives over a grid.
// Rows evaluate independently (optionally in parallel); the result does not
// depend on the worker count.
ScalingProfile log_f_profile(const std::vector<double>& lambda_grid,
                             const std::vector<int>& k_set = {2, 3, 4, 6},
                             double tol = 1e-8, int threads = 0);

// Closed-form asymptotic reference for f_k: (2k-5)!!/|lambda|^(2k-3) as
// lambda -> -inf and (2 lambda)^k as lambda -> +inf.  lambda = 0 is a
// domain error.
double asymptotic_reference(int k, double lambda);

}  // namespace scaling
}  // namespace critwin
