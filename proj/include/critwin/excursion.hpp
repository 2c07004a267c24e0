// excursion.hpp -- moments of the Brownian excursion area and Wright's
// constants w_l = E(B_ex^l) / l!, plus an independent Monte Carlo oracle.
//
// The exact route evaluates the classical recursion for the area moments in
// extended precision.  The Monte Carlo route samples discrete excursions (a
// uniform lattice bridge turned into an excursion by a Vervaat-style cyclic
// shift) and extrapolates the discretization bias away; the two routes share
// no code and cross-validate each other.

#pragma once

#include "critwin/specfun.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace critwin {
namespace excursion {

struct MomentTable {
    long long max_ell = 0;
    std::vector<xreal> moments;  // M_0..M_L, M_l = E(B_ex^l)
    std::vector<xreal> wright;   // w_0..w_L, w_l = M_l / l!
    PrecisionSpec precision;
};

// Exact area moments through l = max_ell.  The result is validated against
// the type's invariants (positivity, moment log-convexity, the explicit
// w_l upper bound); any violation signals accumulated error and throws
// std::runtime_error rather than returning a degraded table.
MomentTable excursion_moments(long long max_ell, const PrecisionSpec& prec = {});

// Projection of excursion_moments onto the Wright constants w_0..w_max_ell.
std::vector<xreal> wright_constants(long long max_ell, const PrecisionSpec& prec = {});

// log w_l in hardware doubles for l = 0..max_ell, computed by an independent
// log-space evaluation of the same recursion (log-sum-exp, no overflow).
// Usable far beyond the range where w_l itself underflows; the quadrature
// integrand consumes this table.
std::vector<double> log_wright_doubles(long long max_ell);

// Monte Carlo estimates of M_1..M_6 with standard errors.
struct McMoments {
    long long paths = 0;
    long long steps = 0;
    std::uint64_t seed = 0;
    std::array<double, 7> moment{};     // index l; moment[0] == 1 exactly
    std::array<double, 7> std_error{};  // std_error[0] == 0
};

// Samples `paths` discrete excursions of about `steps` steps each (steps >=
// 100) and estimates the area moments.  A discrete excursion of finite length
// is biased for the continuum limit by O(steps^(-1/2)); the estimator removes
// the leading bias orders by Richardson extrapolation across step counts
// {steps, steps/4, steps/16}, and the reported standard error accounts for
// the extrapolation weights.  Deterministic given (paths, steps, seed): every
// path derives its randomness from (seed, level, path index) only, so the
// result is independent of the worker count.
McMoments mc_excursion_area(long long paths, long long steps, std::uint64_t seed,
                            int threads = 0);

}  // namespace excursion
}  // namespace critwin
