#include "critwin/excursion.hpp"

#include "critwin/parallel.hpp"
#include "critwin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace critwin {
namespace excursion {

namespace {

// The area moments obey a quadratic convolution recursion (Takacs): with
//   K_0 = -1/2,
//   K_k = 9(3k-4) K_{k-1} + sum_{j=1}^{k-1} K_j K_{k-j},   k >= 1,
// all K_k are positive for k >= 1 and
//   M_k = 4 sqrt(pi) k! K_k / ((36 sqrt(2))^k Gamma((3k-1)/2)).
// This shape is exactly what the w_l upper-bound proof expects: M_k equals
// 2 sqrt(pi) / ((36 sqrt(2))^k Gamma((3k-1)/2)) times gamma_k = 2 k! K_k,
// whose own recursion's first term is (12k/(6k-1)) Gamma(3k+1/2)/Gamma(k+1/2).
// Correctness is not taken on faith: the table is gated by the invariant
// checks below, by the Monte Carlo oracle, and by the 16-digit reproduction
// of the lambda = 0 series constants downstream.
std::vector<xreal> k_sequence(long long max_ell) {
    std::vector<xreal> k_seq(static_cast<std::size_t>(max_ell) + 1);
    k_seq[0] = xreal(-1) / 2;
    for (long long k = 1; k <= max_ell; ++k) {
        xreal value = 9 * (3 * k - 4) * k_seq[static_cast<std::size_t>(k - 1)];
        for (long long j = 1; j <= k - 1; ++j) {
            value += k_seq[static_cast<std::size_t>(j)] *
                     k_seq[static_cast<std::size_t>(k - j)];
        }
        k_seq[static_cast<std::size_t>(k)] = value;
    }
    return k_seq;
}

const xreal& pi_x() {
    static const xreal value = 4 * atan(xreal(1));
    return value;
}

void validate_table(const MomentTable& table) {
    const auto fail = [](const std::string& what) {
        throw std::runtime_error("excursion_moments: invariant violated (" + what +
                                 "); precision insufficient for requested max_ell");
    };
    if (table.moments[0] != 1 || table.wright[0] != 1) {
        fail("M_0 = w_0 = 1");
    }
    for (long long l = 0; l <= table.max_ell; ++l) {
        const auto i = static_cast<std::size_t>(l);
        if (!(table.moments[i] > 0) || !(table.wright[i] > 0)) {
            fail("positivity at l = " + std::to_string(l));
        }
    }
    // Cauchy-Schwarz for moments of a positive random variable.
    for (long long l = 1; l + 1 <= table.max_ell; ++l) {
        const auto i = static_cast<std::size_t>(l);
        if (!(table.moments[i] * table.moments[i] <=
              table.moments[i - 1] * table.moments[i + 1])) {
            fail("moment log-convexity at l = " + std::to_string(l));
        }
    }
    // Explicit upper bound on w_l, compared in log space so the check stays
    // meaningful where w_l underflows a double.
    for (long long l = 1; l <= table.max_ell; ++l) {
        const double log_wl =
            static_cast<double>(log(table.wright[static_cast<std::size_t>(l)]));
        if (!(log_wl <= specfun::log_wl_upper(l))) {
            fail("w_l upper bound at l = " + std::to_string(l));
        }
    }
}

}  // namespace

MomentTable excursion_moments(long long max_ell, const PrecisionSpec& prec) {
    specfun::validate(prec);
    if (max_ell < 0) {
        throw std::invalid_argument("excursion_moments: max_ell >= 0 required");
    }
    MomentTable table;
    table.max_ell = max_ell;
    table.precision = prec;
    table.moments.resize(static_cast<std::size_t>(max_ell) + 1);
    table.wright.resize(static_cast<std::size_t>(max_ell) + 1);
    table.moments[0] = 1;
    table.wright[0] = 1;

    const std::vector<xreal> k_seq = k_sequence(max_ell);
    const xreal four_sqrt_pi = 4 * sqrt(pi_x());
    const xreal base = 36 * sqrt(xreal(2));
    xreal base_power = 1;    // (36 sqrt 2)^l
    xreal factorial = 1;     // l!
    for (long long l = 1; l <= max_ell; ++l) {
        base_power *= base;
        factorial *= l;
        const xreal gamma_term =
            specfun::gamma(xreal(3 * l - 1) / 2, prec);
        const xreal m_l = four_sqrt_pi * factorial *
                          k_seq[static_cast<std::size_t>(l)] /
                          (base_power * gamma_term);
        table.moments[static_cast<std::size_t>(l)] = m_l;
        table.wright[static_cast<std::size_t>(l)] = m_l / factorial;
    }
    validate_table(table);
    return table;
}

std::vector<xreal> wright_constants(long long max_ell, const PrecisionSpec& prec) {
    return excursion_moments(max_ell, prec).wright;
}

std::vector<double> log_wright_doubles(long long max_ell) {
    if (max_ell < 0) {
        throw std::invalid_argument("log_wright_doubles: max_ell >= 0 required");
    }
    const std::size_t size = static_cast<std::size_t>(max_ell) + 1;
    std::vector<double> log_w(size, 0.0);
    if (max_ell == 0) {
        return log_w;
    }

    // log K_k.  K_0 = -1/2 is the only negative member; the k = 1 step
    // 9(3-4)(-1/2) = 9/2 is folded in explicitly, after which everything is
    // positive and log-sum-exp applies.  The convolution sum is dominated by
    // its edge terms (log K_j is convex in j), so scanning j upward with an
    // early break keeps the build effectively linear in max_ell.
    std::vector<double> log_k(size);
    log_k[1] = std::log(4.5);
    for (long long k = 2; k <= max_ell; ++k) {
        const double lead = std::log(9.0 * (3 * k - 4)) +
                            log_k[static_cast<std::size_t>(k - 1)];
        double peak = lead;
        double acc = 1.0;  // running sum scaled by exp(-peak)
        for (long long j = 1; 2 * j <= k; ++j) {
            double term = log_k[static_cast<std::size_t>(j)] +
                          log_k[static_cast<std::size_t>(k - j)];
            if (2 * j < k) {
                term += std::log(2.0);  // the symmetric partner j <-> k-j
            }
            if (term > peak) {
                acc = acc * std::exp(peak - term) + 1.0;
                peak = term;
            } else {
                const double rel = std::exp(term - peak);
                acc += rel;
                if (rel < 1e-19 * acc) {
                    break;
                }
            }
        }
        log_k[static_cast<std::size_t>(k)] = peak + std::log(acc);
    }

    const double log_four_sqrt_pi = std::log(4.0) + 0.5 * std::log(M_PI);
    const double log_base = std::log(36.0) + 0.5 * std::log(2.0);
    for (long long l = 1; l <= max_ell; ++l) {
        log_w[static_cast<std::size_t>(l)] =
            log_four_sqrt_pi - l * log_base -
            std::lgamma((3.0 * l - 1.0) / 2.0) + log_k[static_cast<std::size_t>(l)];
    }
    return log_w;
}

namespace {

// Sums of x^p and (x^p)^2 for p = 1..6 over a block of sampled paths.
struct BlockSums {
    long long count = 0;
    std::array<double, 7> sum{};
    std::array<double, 7> sum_sq{};
};

// One discrete excursion area, normalized.  A lattice bridge with m up-steps
// and m+1 down-steps in uniformly random order is rotated at its first
// minimum (cycle lemma), which yields a uniformly random discrete excursion;
// its area follows from the bridge's height sum, minimum, and argmin alone,
// so the path never needs to be stored.
double sample_normalized_area(Xoshiro256pp& rng, long long m) {
    const long long n_steps = 2 * m + 1;
    std::uint64_t ups = static_cast<std::uint64_t>(m);
    std::uint64_t remaining = static_cast<std::uint64_t>(n_steps);
    long long height = 0;
    long long height_sum = 0;
    long long min_height = std::numeric_limits<long long>::max();
    long long argmin = 0;
    for (long long j = 1; j <= n_steps; ++j, --remaining) {
        if (rng.uniform_below(remaining) < ups) {
            ++height;
            --ups;
        } else {
            --height;
        }
        height_sum += height;
        if (height < min_height) {
            min_height = height;
            argmin = j;
        }
    }
    const long long area = height_sum - n_steps * min_height - argmin + 1;
    return static_cast<double>(area) /
           std::pow(static_cast<double>(2 * m), 1.5);
}

struct LevelEstimate {
    std::array<double, 7> mean{};
    std::array<double, 7> var_of_mean{};
};

LevelEstimate run_level(long long paths, long long level_steps, std::uint64_t seed,
                        std::uint64_t level_index, int threads) {
    const long long m = level_steps / 2;
    constexpr long long kBlock = 4096;
    const std::vector<BlockSums> blocks = map_blocks<BlockSums>(
        paths, kBlock, threads,
        [&](long long, long long begin, long long end) {
            BlockSums s;
            for (long long path = begin; path < end; ++path) {
                Xoshiro256pp rng(seed, (level_index << 40) ^
                                           static_cast<std::uint64_t>(path));
                const double x = sample_normalized_area(rng, m);
                double power = 1.0;
                for (int p = 1; p <= 6; ++p) {
                    power *= x;
                    s.sum[static_cast<std::size_t>(p)] += power;
                    s.sum_sq[static_cast<std::size_t>(p)] += power * power;
                }
            }
            s.count = end - begin;
            return s;
        });

    BlockSums total;
    for (const BlockSums& b : blocks) {
        total.count += b.count;
        for (int p = 1; p <= 6; ++p) {
            total.sum[static_cast<std::size_t>(p)] += b.sum[static_cast<std::size_t>(p)];
            total.sum_sq[static_cast<std::size_t>(p)] +=
                b.sum_sq[static_cast<std::size_t>(p)];
        }
    }

    LevelEstimate est;
    const double n = static_cast<double>(total.count);
    for (int p = 1; p <= 6; ++p) {
        const auto i = static_cast<std::size_t>(p);
        const double mean = total.sum[i] / n;
        const double var =
            std::max(0.0, (total.sum_sq[i] - n * mean * mean) / (n - 1.0));
        est.mean[i] = mean;
        est.var_of_mean[i] = var / n;
    }
    return est;
}

}  // namespace

McMoments mc_excursion_area(long long paths, long long steps, std::uint64_t seed,
                            int threads) {
    if (paths < 1 || steps < 100) {
        throw std::invalid_argument(
            "mc_excursion_area: paths >= 1 and steps >= 100 required");
    }

    // Step counts for the bias extrapolation, coarsest last.  Levels that
    // would fall below the minimum resolution collapse into their neighbors.
    std::vector<long long> levels{steps};
    if (steps / 4 >= 100) {
        levels.push_back(steps / 4);
    }
    if (steps / 16 >= 100) {
        levels.push_back(steps / 16);
    }

    std::vector<LevelEstimate> estimates;
    estimates.reserve(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        estimates.push_back(
            run_level(paths, levels[i], seed, static_cast<std::uint64_t>(i), threads));
    }

    // Richardson weights: the discrete-area bias expands in powers of
    // t = steps^(-1/2); Lagrange extrapolation to t = 0 across the levels
    // removes the bias through order t^(levels-1).
    const std::size_t n_levels = levels.size();
    std::vector<double> t(n_levels);
    for (std::size_t i = 0; i < n_levels; ++i) {
        t[i] = 1.0 / std::sqrt(static_cast<double>(levels[i]));
    }
    std::vector<double> weight(n_levels, 1.0);
    for (std::size_t i = 0; i < n_levels; ++i) {
        for (std::size_t j = 0; j < n_levels; ++j) {
            if (j != i) {
                weight[i] *= t[j] / (t[j] - t[i]);
            }
        }
    }

    McMoments out;
    out.paths = paths;
    out.steps = steps;
    out.seed = seed;
    out.moment[0] = 1.0;
    out.std_error[0] = 0.0;
    for (int p = 1; p <= 6; ++p) {
        const auto ip = static_cast<std::size_t>(p);
        double value = 0.0;
        double var = 0.0;
        for (std::size_t i = 0; i < n_levels; ++i) {
            value += weight[i] * estimates[i].mean[ip];
            var += weight[i] * weight[i] * estimates[i].var_of_mean[ip];
        }
        out.moment[ip] = value;
        out.std_error[ip] = std::sqrt(var);
    }
    return out;
}

}  // namespace excursion
}  // namespace critwin
