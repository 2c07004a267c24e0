// percolation.hpp -- Monte Carlo engine for G(n,p) inside the critical
// window p = 1/n + lambda n^(-4/3): exact component statistics per draw,
// susceptibility and derivative estimators, and the coupled monotone sampler.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace critwin {
namespace percolation {

using bigint = boost::multiprecision::cpp_int;

// Component statistics of one G(n,p) draw.  Power sums s_k = sum_i |C_i|^k
// are exact integers (s_6 can reach n^6, far beyond 64 bits).
struct ComponentStats {
    long long n = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
    std::vector<long long> sizes;      // descending
    std::array<bigint, 7> power_sums;  // index k = 1..6; [0] unused
};

// Rescaled functionals of one sample.
struct SampleFunctionals {
    double x2 = 0, x3 = 0, x4 = 0, x5 = 0, x6 = 0;  // X_k = s_k / n^(2k/3)
    bigint pair_product;  // sum_{i != j} |C_i|^2 |C_j|^2 = s_2^2 - s_4, exact
    bool two_large = false;  // |C_2| >= n^(2/3) (integer threshold, ties in)
};

struct EstimatorSummary {
    std::string name;
    long long n = 0;
    double lambda = 0.0;
    double p = 0.0;
    long long replicates = 0;
    std::uint64_t seed = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;  // 95% interval: mean -/+ 1.96 std_error, except for
    double ci_hi = 0.0;  // the binary two-large estimator (Wilson score)
};

// p = 1/n + lambda n^(-4/3); throws std::domain_error naming (n, lambda)
// when the result leaves (0, 1).
double window_p(long long n, double lambda);

// One exact draw of G(n,p) component statistics.  Edges are sampled by
// geometric skipping over the C(n,2) lexicographic edge ranks (expected
// O(1) work per present edge), merged with union-find.  Deterministic given
// seed.  Throws std::length_error with an estimate when the expected work or
// memory is out of budget.
ComponentStats sample_gnp_components(long long n, double p, std::uint64_t seed);

// Single coupled draw across an ascending p_list: each edge present at
// p_max carries an independent uniform height V in [0, p_max] and belongs to
// G(p) iff V <= p.  Marginals are exact G(n,p); per-sample statistics are
// monotone along the list.
std::vector<ComponentStats> coupled_sample(long long n,
                                           const std::vector<double>& p_list,
                                           std::uint64_t seed);

SampleFunctionals functionals(const ComponentStats& stats);

// mean of X_2 = s_2/n^(4/3), estimating chi(p)/n^(1/3) = f_2(lambda) in the
// limit.
EstimatorSummary estimate_susceptibility(long long n, double lambda,
                                         long long replicates, std::uint64_t seed,
                                         int threads = 0);

// Ratio estimator: mean of (s_2^2 - s_4)/((1-p) n^(8/3)) divided by mean of
// s_2/n^(4/3); estimates n^(-4/3) d/dp log chi.  Standard error by the delta
// method.
EstimatorSummary estimate_log_derivative(long long n, double lambda,
                                         long long replicates, std::uint64_t seed,
                                         int threads = 0);

// The two rescaled-derivative estimands, from the same samples:
//   D E[X_2]      via  E[X_2^2] - E[X_4]
//   D^2 E[X_2]    via  2 E[X_2^3] - 6 E[X_4 X_2] - E[X_3^2] + 5 E[X_6]
// where D = n^(-4/3) (1-p) d/dp.  Returns {"d_x2", "d2_x2"}.
std::vector<EstimatorSummary> estimate_derivative_moments(long long n, double lambda,
                                                          long long replicates,
                                                          std::uint64_t seed,
                                                          int threads = 0);

// Empirical frequency of the event of two distinct components of size
// >= n^(2/3).  The event is rare near lambda = 0 (about 1% of draws), so
// [ci_lo, ci_hi] is a Wilson score interval: it stays within [0, 1] and its
// lower bound is positive exactly when at least one hit was observed.
EstimatorSummary two_large_components_freq(long long n, double lambda,
                                           long long replicates, std::uint64_t seed,
                                           int threads = 0);

}  // namespace percolation
}  // namespace critwin
