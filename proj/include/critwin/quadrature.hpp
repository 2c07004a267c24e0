// quadrature.hpp -- adaptive Gauss-Kronrod (7,15) integration on finite
// intervals, with an explicit error estimate and convergence flag.

#pragma once

#include <functional>
#include <vector>

namespace critwin {
namespace quadrature {

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
};

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;  // conservative: sum of |K15 - G7| per interval
    long long evaluations = 0;
    int subdivisions = 0;
    bool converged = false;
};

// Integrates f over [a, b] (a <= b), bisecting the interval with the largest
// error estimate until the global estimate meets max(abs_tol, rel_tol*|I|)
// or the subdivision budget is exhausted (converged = false, best value
// still returned).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options = {});

// Integrates over consecutive segments [points[0], points[1]], ...; the
// interior points seed the adaptive refinement (useful when the integrand's
// peak location is known).  points must be nondecreasing, size >= 2.
Result integrate_segments(const std::function<double(double)>& f,
                          const std::vector<double>& points,
                          const Options& options = {});

}  // namespace quadrature
}  // namespace critwin
