#include "critwin/percolation.hpp"

#include "critwin/parallel.hpp"
#include "critwin/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace critwin {
namespace percolation {

namespace {

using u128 = unsigned __int128;

constexpr long long kMaxVertices = 1'500'000'000;  // size arrays in memory
constexpr double kMaxExpectedEdges = 2e9;          // work budget per draw
// n^6 fits an unsigned 128-bit accumulator whenever n <= 2e6, so power sums
// can be accumulated without big-integer arithmetic in the hot path.
constexpr long long kU128SafeVertices = 2'000'000;

struct Dsu {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> size;

    explicit Dsu(long long n)
        : parent(static_cast<std::size_t>(n)), size(static_cast<std::size_t>(n), 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }

    std::int32_t find(std::int32_t x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }

    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) {
            std::swap(a, b);
        }
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    }
};

void check_budget(long long n, double p) {
    if (n < 1) {
        throw std::invalid_argument("sample_gnp_components: n >= 1 required");
    }
    if (!(p >= 0.0) || !(p <= 1.0)) {
        throw std::domain_error("sample_gnp_components: p must lie in [0, 1]");
    }
    if (n > kMaxVertices) {
        std::ostringstream msg;
        msg << "sample_gnp_components: n = " << n << " exceeds the vertex budget "
            << kMaxVertices << " (size arrays would need ~" << 8.0 * n / 1e9
            << " GB)";
        throw std::length_error(msg.str());
    }
    const double expected_edges = p * 0.5 * static_cast<double>(n) *
                                  static_cast<double>(n - 1);
    if (expected_edges > kMaxExpectedEdges) {
        std::ostringstream msg;
        msg << "sample_gnp_components: expected edge count ~" << expected_edges
            << " for n = " << n << ", p = " << p << " exceeds the work budget "
            << kMaxExpectedEdges;
        throw std::length_error(msg.str());
    }
}

// Lexicographic edge ranks: edge (i, j), 0 <= i < j < n, has rank
// base(i) + (j - i - 1) with base(i) = i(n-1) - i(i-1)/2.
long long rank_base(long long i, long long n) {
    return i * (n - 1) - i * (i - 1) / 2;
}

void decode_edge(long long rank, long long n, long long& i, long long& j) {
    const double nn = static_cast<double>(n);
    const double disc = (2.0 * nn - 1.0) * (2.0 * nn - 1.0) - 8.0 * static_cast<double>(rank);
    i = static_cast<long long>((2.0 * nn - 1.0 - std::sqrt(std::max(0.0, disc))) / 2.0);
    i = std::clamp<long long>(i, 0, n - 2);
    while (i + 1 <= n - 2 && rank_base(i + 1, n) <= rank) {
        ++i;
    }
    while (i > 0 && rank_base(i, n) > rank) {
        --i;
    }
    j = i + 1 + (rank - rank_base(i, n));
}

// Visits the rank of every present edge of one G(n,p) draw in increasing
// order, by geometric skipping: the gap to the next present edge is
// 1 + floor(log U / log(1-p)).
template <typename Visit>
void for_each_present_edge(long long n, double p, Xoshiro256pp& rng, Visit&& visit) {
    const long long total = n * (n - 1) / 2;
    if (p <= 0.0 || total == 0) {
        return;
    }
    if (p >= 1.0) {
        for (long long r = 0; r < total; ++r) {
            visit(r);
        }
        return;
    }
    const double log_q = std::log1p(-p);
    long long rank = -1;
    for (;;) {
        const double u = rng.uniform01_positive();
        const double gap = std::floor(std::log(u) / log_q);
        if (!(gap < 9e18)) {
            break;  // skip beyond any representable rank
        }
        rank += 1 + static_cast<long long>(gap);
        if (rank >= total || rank < 0) {
            break;
        }
        visit(rank);
    }
}

bigint u128_to_bigint(u128 v) {
    bigint out = static_cast<std::uint64_t>(v >> 64);
    out <<= 64;
    out |= static_cast<std::uint64_t>(v);
    return out;
}

ComponentStats stats_from_dsu(long long n, double p, std::uint64_t seed, Dsu& dsu) {
    ComponentStats stats;
    stats.n = n;
    stats.p = p;
    stats.seed = seed;
    for (long long v = 0; v < n; ++v) {
        const auto vi = static_cast<std::int32_t>(v);
        if (dsu.find(vi) == vi) {
            stats.sizes.push_back(dsu.size[static_cast<std::size_t>(v)]);
        }
    }
    std::sort(stats.sizes.begin(), stats.sizes.end(), std::greater<>());

    if (n <= kU128SafeVertices) {
        // Sum of s_6 over all components is at most n^6 < 2^128.
        std::array<u128, 7> acc{};
        for (const long long s : stats.sizes) {
            u128 power = 1;
            for (int k = 1; k <= 6; ++k) {
                power *= static_cast<u128>(s);
                acc[static_cast<std::size_t>(k)] += power;
            }
        }
        for (int k = 1; k <= 6; ++k) {
            stats.power_sums[static_cast<std::size_t>(k)] =
                u128_to_bigint(acc[static_cast<std::size_t>(k)]);
        }
    } else {
        for (const long long s : stats.sizes) {
            if (s <= kU128SafeVertices) {
                u128 power = 1;
                for (int k = 1; k <= 6; ++k) {
                    power *= static_cast<u128>(s);
                    stats.power_sums[static_cast<std::size_t>(k)] +=
                        u128_to_bigint(power);
                }
            } else {
                bigint power = 1;
                for (int k = 1; k <= 6; ++k) {
                    power *= s;
                    stats.power_sums[static_cast<std::size_t>(k)] += power;
                }
            }
        }
    }
    return stats;
}

}  // namespace

double window_p(long long n, double lambda) {
    if (n < 1) {
        throw std::invalid_argument("window_p: n >= 1 required");
    }
    const double p = 1.0 / static_cast<double>(n) +
                     lambda * std::pow(static_cast<double>(n), -4.0 / 3.0);
    if (!(p > 0.0) || !(p < 1.0)) {
        std::ostringstream msg;
        msg << "window_p: p = " << p << " outside (0, 1) for n = " << n
            << ", lambda = " << lambda;
        throw std::domain_error(msg.str());
    }
    return p;
}

ComponentStats sample_gnp_components(long long n, double p, std::uint64_t seed) {
    check_budget(n, p);
    Dsu dsu(n);
    Xoshiro256pp rng(seed);
    for_each_present_edge(n, p, rng, [&](long long rank) {
        long long i = 0;
        long long j = 0;
        decode_edge(rank, n, i, j);
        dsu.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
    });
    return stats_from_dsu(n, p, seed, dsu);
}

std::vector<ComponentStats> coupled_sample(long long n,
                                           const std::vector<double>& p_list,
                                           std::uint64_t seed) {
    if (p_list.empty()) {
        throw std::invalid_argument("coupled_sample: p_list must be nonempty");
    }
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        if (!(p_list[i] >= 0.0) || !(p_list[i] <= 1.0) ||
            (i > 0 && p_list[i] < p_list[i - 1])) {
            throw std::invalid_argument(
                "coupled_sample: p_list must ascend within [0, 1]");
        }
    }
    const double p_max = p_list.back();
    check_budget(n, p_max);

    std::vector<Dsu> dsus;
    dsus.reserve(p_list.size());
    for (std::size_t i = 0; i < p_list.size(); ++i) {
        dsus.emplace_back(n);
    }

    Xoshiro256pp rng(seed);
    for_each_present_edge(n, p_max, rng, [&](long long rank) {
        long long i = 0;
        long long j = 0;
        decode_edge(rank, n, i, j);
        // Uniform height in [0, p_max]: the edge belongs to G(p) iff V <= p,
        // so the marginal at each p is exact and the graphs are nested.
        const double v = p_max * rng.uniform01();
        for (std::size_t q = 0; q < p_list.size(); ++q) {
            if (v <= p_list[q]) {
                dsus[q].unite(static_cast<std::int32_t>(i),
                              static_cast<std::int32_t>(j));
            }
        }
    });

    std::vector<ComponentStats> out;
    out.reserve(p_list.size());
    for (std::size_t q = 0; q < p_list.size(); ++q) {
        out.push_back(stats_from_dsu(n, p_list[q], seed, dsus[q]));
    }
    return out;
}

SampleFunctionals functionals(const ComponentStats& stats) {
    SampleFunctionals f;
    const double n = static_cast<double>(stats.n);
    f.x2 = static_cast<double>(stats.power_sums[2]) / std::pow(n, 4.0 / 3.0);
    f.x3 = static_cast<double>(stats.power_sums[3]) / std::pow(n, 2.0);
    f.x4 = static_cast<double>(stats.power_sums[4]) / std::pow(n, 8.0 / 3.0);
    f.x5 = static_cast<double>(stats.power_sums[5]) / std::pow(n, 10.0 / 3.0);
    f.x6 = static_cast<double>(stats.power_sums[6]) / std::pow(n, 4.0);
    f.pair_product = stats.power_sums[2] * stats.power_sums[2] - stats.power_sums[4];

    // Smallest integer t with t^3 >= n^2, i.e. t = ceil(n^(2/3)).
    long long t = static_cast<long long>(
        std::cbrt(static_cast<double>(stats.n) * static_cast<double>(stats.n)));
    t = std::max<long long>(t - 2, 1);
    while (t * t * t < stats.n * stats.n) {
        ++t;
    }
    f.two_large = stats.sizes.size() >= 2 && stats.sizes[1] >= t;
    return f;
}

namespace {

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) {
    std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL * (replicate + 1);
    return splitmix64(state);
}

struct RepValues {
    double x2 = 0, x3 = 0, x4 = 0, x5 = 0, x6 = 0;
    double pair_scaled = 0;  // (s_2^2 - s_4) / n^(8/3)
    bool two_large = false;
};

std::vector<RepValues> run_replicates(long long n, double p, long long replicates,
                                      std::uint64_t seed, int threads) {
    if (replicates < 1) {
        throw std::invalid_argument("estimators: replicates >= 1 required");
    }
    return map_blocks<RepValues>(
        replicates, 1, threads, [&](long long index, long long, long long) {
            const ComponentStats stats = sample_gnp_components(
                n, p, replicate_seed(seed, static_cast<std::uint64_t>(index)));
            const SampleFunctionals f = functionals(stats);
            RepValues values;
            values.x2 = f.x2;
            values.x3 = f.x3;
            values.x4 = f.x4;
            values.x5 = f.x5;
            values.x6 = f.x6;
            values.pair_scaled = static_cast<double>(f.pair_product) /
                                 std::pow(static_cast<double>(n), 8.0 / 3.0);
            values.two_large = f.two_large;
            return values;
        });
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (const double x : xs) {
        mean += x;
    }
    mean /= n;
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    MeanSd out;
    out.mean = mean;
    out.sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return out;
}

EstimatorSummary make_summary(const std::string& name, long long n, double lambda,
                              double p, long long replicates, std::uint64_t seed,
                              double mean, double std_error) {
    EstimatorSummary s;
    s.name = name;
    s.n = n;
    s.lambda = lambda;
    s.p = p;
    s.replicates = replicates;
    s.seed = seed;
    s.mean = mean;
    s.std_error = std_error;
    s.ci_lo = mean - 1.96 * std_error;
    s.ci_hi = mean + 1.96 * std_error;
    return s;
}

}  // namespace

EstimatorSummary estimate_susceptibility(long long n, double lambda,
                                         long long replicates, std::uint64_t seed,
                                         int threads) {
    const double p = window_p(n, lambda);
    const std::vector<RepValues> reps = run_replicates(n, p, replicates, seed, threads);
    std::vector<double> x2(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        x2[i] = reps[i].x2;
    }
    const MeanSd stats = mean_sd(x2);
    return make_summary("x2", n, lambda, p, replicates, seed, stats.mean,
                        stats.sd / std::sqrt(static_cast<double>(replicates)));
}

EstimatorSummary estimate_log_derivative(long long n, double lambda,
                                         long long replicates, std::uint64_t seed,
                                         int threads) {
    const double p = window_p(n, lambda);
    const std::vector<RepValues> reps = run_replicates(n, p, replicates, seed, threads);
    std::vector<double> numer(reps.size());
    std::vector<double> denom(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        numer[i] = reps[i].pair_scaled / (1.0 - p);
        denom[i] = reps[i].x2;
    }
    const MeanSd a = mean_sd(numer);
    const MeanSd b = mean_sd(denom);
    const double ratio = a.mean / b.mean;
    // Delta method: Var(A/B) ~ Var(A - ratio B) / (mean B)^2 / replicates.
    std::vector<double> linearized(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        linearized[i] = numer[i] - ratio * denom[i];
    }
    const MeanSd c = mean_sd(linearized);
    const double std_error =
        c.sd / (std::fabs(b.mean) * std::sqrt(static_cast<double>(replicates)));
    return make_summary("dlogchi", n, lambda, p, replicates, seed, ratio, std_error);
}

std::vector<EstimatorSummary> estimate_derivative_moments(long long n, double lambda,
                                                          long long replicates,
                                                          std::uint64_t seed,
                                                          int threads) {
    const double p = window_p(n, lambda);
    const std::vector<RepValues> reps = run_replicates(n, p, replicates, seed, threads);
    std::vector<double> first(reps.size());
    std::vector<double> second(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const RepValues& r = reps[i];
        first[i] = r.x2 * r.x2 - r.x4;
        second[i] = 2.0 * r.x2 * r.x2 * r.x2 - 6.0 * r.x4 * r.x2 - r.x3 * r.x3 +
                    5.0 * r.x6;
    }
    const MeanSd m1 = mean_sd(first);
    const MeanSd m2 = mean_sd(second);
    const double root_reps = std::sqrt(static_cast<double>(replicates));
    return {make_summary("d_x2", n, lambda, p, replicates, seed, m1.mean,
                         m1.sd / root_reps),
            make_summary("d2_x2", n, lambda, p, replicates, seed, m2.mean,
                         m2.sd / root_reps)};
}

EstimatorSummary two_large_components_freq(long long n, double lambda,
                                           long long replicates, std::uint64_t seed,
                                           int threads) {
    const double p = window_p(n, lambda);
    const std::vector<RepValues> reps = run_replicates(n, p, replicates, seed, threads);
    double count = 0.0;
    for (const RepValues& r : reps) {
        count += r.two_large ? 1.0 : 0.0;
    }
    const double m = static_cast<double>(replicates);
    const double freq = count / m;
    const double std_error = std::sqrt(freq * (1.0 - freq) / m);
    EstimatorSummary s =
        make_summary("twolarge", n, lambda, p, replicates, seed, freq, std_error);
    // Binary outcome: the normal-approximation interval degenerates for rare
    // events (its lower bound can go negative even with observed hits), so
    // report a Wilson score interval instead.  Its lower bound is 0 exactly
    // when no hit was observed.
    const double z = 1.96;
    const double denom = 1.0 + z * z / m;
    const double center = (freq + z * z / (2.0 * m)) / denom;
    const double half =
        z * std::sqrt(freq * (1.0 - freq) / m + z * z / (4.0 * m * m)) / denom;
    s.ci_lo = std::max(0.0, center - half);
    s.ci_hi = std::min(1.0, center + half);
    return s;
}

}  // namespace percolation
}  // namespace critwin
