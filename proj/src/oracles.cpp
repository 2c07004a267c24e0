#include "critwin/oracles.hpp"

#include "critwin/percolation.hpp"
#include "critwin/rng.hpp"
#include "critwin/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace critwin {
namespace oracles {

double Polynomial::eval(double p) const {
    double value = 0.0;
    for (std::size_t j = coefficients.size(); j-- > 0;) {
        value = value * p + static_cast<double>(coefficients[j]);
    }
    return value;
}

Polynomial Polynomial::derivative() const {
    Polynomial out;
    if (coefficients.size() <= 1) {
        out.coefficients = {0};
        return out;
    }
    out.coefficients.resize(coefficients.size() - 1);
    for (std::size_t j = 1; j < coefficients.size(); ++j) {
        out.coefficients[j - 1] = static_cast<long long>(j) * coefficients[j];
    }
    return out;
}

bool Polynomial::operator==(const Polynomial& other) const {
    const std::size_t size = std::max(coefficients.size(), other.coefficients.size());
    for (std::size_t j = 0; j < size; ++j) {
        const long long a = j < coefficients.size() ? coefficients[j] : 0;
        const long long b = j < other.coefficients.size() ? other.coefficients[j] : 0;
        if (a != b) {
            return false;
        }
    }
    return true;
}

Polynomial operator-(const Polynomial& lhs, const Polynomial& rhs) {
    Polynomial out;
    out.coefficients.resize(
        std::max(lhs.coefficients.size(), rhs.coefficients.size()), 0);
    for (std::size_t j = 0; j < out.coefficients.size(); ++j) {
        const long long a = j < lhs.coefficients.size() ? lhs.coefficients[j] : 0;
        const long long b = j < rhs.coefficients.size() ? rhs.coefficients[j] : 0;
        out.coefficients[j] = a - b;
    }
    return out;
}

Polynomial multiply_by_one_minus_p(const Polynomial& poly) {
    Polynomial out;
    out.coefficients.resize(poly.coefficients.size() + 1, 0);
    for (std::size_t j = 0; j < poly.coefficients.size(); ++j) {
        out.coefficients[j] += poly.coefficients[j];
        out.coefficients[j + 1] -= poly.coefficients[j];
    }
    return out;
}

namespace {

struct EdgeList {
    int count = 0;
    std::array<std::pair<int, int>, 10> edges{};  // C(5,2) max
};

EdgeList edge_list(int n) {
    EdgeList list;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            list.edges[static_cast<std::size_t>(list.count++)] = {i, j};
        }
    }
    return list;
}

// Component labeling of one tiny graph by repeated merging.
std::array<int, 5> component_ids(int n, unsigned edge_mask, const EdgeList& list) {
    std::array<int, 5> comp{};
    for (int v = 0; v < n; ++v) {
        comp[static_cast<std::size_t>(v)] = v;
    }
    for (int e = 0; e < list.count; ++e) {
        if ((edge_mask >> e) & 1u) {
            const int a = comp[static_cast<std::size_t>(list.edges[static_cast<std::size_t>(e)].first)];
            const int b = comp[static_cast<std::size_t>(list.edges[static_cast<std::size_t>(e)].second)];
            if (a != b) {
                for (int v = 0; v < n; ++v) {
                    if (comp[static_cast<std::size_t>(v)] == b) {
                        comp[static_cast<std::size_t>(v)] = a;
                    }
                }
            }
        }
    }
    return comp;
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    long long result = 1;
    for (int t = 1; t <= k; ++t) {
        result = result * (n - k + t) / t;
    }
    return result;
}

}  // namespace

GraphStats graph_stats(int n, unsigned edge_mask) {
    if (n < 1 || n > 5) {
        throw std::invalid_argument("graph_stats: 1 <= n <= 5 required");
    }
    const EdgeList list = edge_list(n);
    const std::array<int, 5> comp = component_ids(n, edge_mask, list);
    GraphStats stats;
    for (int root = 0; root < n; ++root) {
        int size = 0;
        for (int v = 0; v < n; ++v) {
            if (comp[static_cast<std::size_t>(v)] == root) {
                ++size;
            }
        }
        if (size > 0) {
            stats.sizes.push_back(size);
        }
    }
    std::sort(stats.sizes.begin(), stats.sizes.end(), std::greater<>());
    for (const int s : stats.sizes) {
        long long power = 1;
        for (int k = 1; k <= 6; ++k) {
            power *= s;
            stats.power_sums[static_cast<std::size_t>(k)] += power;
        }
    }
    return stats;
}

long long pivotal_pairs_bruteforce(int n, unsigned edge_mask) {
    if (n < 1 || n > 5) {
        throw std::invalid_argument("pivotal_pairs_bruteforce: 1 <= n <= 5 required");
    }
    const EdgeList list = edge_list(n);
    const std::array<int, 5> comp = component_ids(n, edge_mask, list);
    long long count = 0;
    for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) {
            if (v == w ||
                comp[static_cast<std::size_t>(v)] == comp[static_cast<std::size_t>(w)]) {
                continue;  // already connected (or trivial): no absent pivotal edge
            }
            for (int e = 0; e < list.count; ++e) {
                if ((edge_mask >> e) & 1u) {
                    continue;  // pivotality here concerns edges absent from G
                }
                const std::array<int, 5> merged =
                    component_ids(n, edge_mask | (1u << e), list);
                if (merged[static_cast<std::size_t>(v)] ==
                    merged[static_cast<std::size_t>(w)]) {
                    ++count;
                }
            }
        }
    }
    return count;
}

ExactGnpReport exact_small_n(int n, double p) {
    if (n < 1 || n > 5) {
        throw std::invalid_argument(
            "exact_small_n: n <= 5 required (enumeration over 2^C(n,2) graphs)");
    }
    const EdgeList list = edge_list(n);
    const int m_edges = list.count;

    // Basis polynomials p^m (1-p)^(M-m) expanded with exact integer
    // coefficients: coefficient of p^(m+t) is (-1)^t C(M-m, t).
    std::vector<std::vector<long long>> basis(static_cast<std::size_t>(m_edges) + 1);
    for (int m = 0; m <= m_edges; ++m) {
        std::vector<long long>& row = basis[static_cast<std::size_t>(m)];
        row.assign(static_cast<std::size_t>(m_edges) + 1, 0);
        for (int t = 0; t + m <= m_edges; ++t) {
            row[static_cast<std::size_t>(m + t)] =
                (t % 2 == 0 ? 1 : -1) * binomial(m_edges - m, t);
        }
    }

    ExactGnpReport report;
    report.n = n;
    report.p = p;
    auto zero_poly = [m_edges]() {
        Polynomial poly;
        poly.coefficients.assign(static_cast<std::size_t>(m_edges) + 1, 0);
        return poly;
    };
    for (int k = 1; k <= 6; ++k) {
        report.expect_s[static_cast<std::size_t>(k)] = zero_poly();
    }
    report.expect_s2_sq = zero_poly();
    report.expect_s4_s2 = zero_poly();
    report.expect_s2_cu = zero_poly();
    report.expect_s3_sq = zero_poly();

    const unsigned n_masks = 1u << m_edges;
    for (unsigned mask = 0; mask < n_masks; ++mask) {
        const GraphStats stats = graph_stats(n, mask);
        const int m = __builtin_popcount(mask);
        const std::vector<long long>& row = basis[static_cast<std::size_t>(m)];
        const long long s2 = stats.power_sums[2];
        const long long s3 = stats.power_sums[3];
        const long long s4 = stats.power_sums[4];
        auto accumulate = [&row](Polynomial& poly, long long weight) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                poly.coefficients[j] += weight * row[j];
            }
        };
        for (int k = 1; k <= 6; ++k) {
            accumulate(report.expect_s[static_cast<std::size_t>(k)],
                       stats.power_sums[static_cast<std::size_t>(k)]);
        }
        accumulate(report.expect_s2_sq, s2 * s2);
        accumulate(report.expect_s4_s2, s4 * s2);
        accumulate(report.expect_s2_cu, s2 * s2 * s2);
        accumulate(report.expect_s3_sq, s3 * s3);
    }
    report.expect_pair = report.expect_s2_sq - report.expect_s[4];

    for (int k = 1; k <= 6; ++k) {
        report.expect_s_at_p[static_cast<std::size_t>(k)] =
            report.expect_s[static_cast<std::size_t>(k)].eval(p);
    }
    report.expect_s2_sq_at_p = report.expect_s2_sq.eval(p);
    report.expect_s4_s2_at_p = report.expect_s4_s2.eval(p);
    report.expect_s2_cu_at_p = report.expect_s2_cu.eval(p);
    report.expect_s3_sq_at_p = report.expect_s3_sq.eval(p);
    report.expect_pair_at_p = report.expect_pair.eval(p);
    report.susceptibility_sum = report.expect_s_at_p[2];
    report.d_susceptibility_dp = report.expect_s[2].derivative().eval(p);
    return report;
}

CycleReport cycle_susceptibility(long long n, double p) {
    if (n < 3) {
        throw std::invalid_argument("cycle_susceptibility: n >= 3 required");
    }
    if (n > 20'000'000) {
        throw std::invalid_argument(
            "cycle_susceptibility: n exceeds the 2e7 budget (the power table "
            "would need more than 160 MB)");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("cycle_susceptibility: p in [0, 1] required");
    }
    std::vector<double> power(static_cast<std::size_t>(n) + 1);
    power[0] = 1.0;
    for (long long j = 1; j <= n; ++j) {
        power[static_cast<std::size_t>(j)] = power[static_cast<std::size_t>(j - 1)] * p;
    }
    const double p_n = power[static_cast<std::size_t>(n)];
    double chi = 1.0;
    double dchi = 0.0;
    for (long long j = 1; j < n; ++j) {
        chi += 2.0 * power[static_cast<std::size_t>(j)] - p_n;
        dchi += 2.0 * static_cast<double>(j) * power[static_cast<std::size_t>(j - 1)] *
                (1.0 - power[static_cast<std::size_t>(n - j)]);
    }
    CycleReport report;
    report.n = n;
    report.p = p;
    report.chi = chi;
    report.dchi_dp = dchi;
    report.logder = chi > 0.0 ? dchi / chi : 0.0;
    return report;
}

double cycle_chi_enumeration(int n, double p) {
    if (n < 3 || n > 20) {
        throw std::invalid_argument("cycle_chi_enumeration: 3 <= n <= 20 required");
    }
    // Cycle edges are (v, v+1 mod n); enumerate subsets, E|C(v)| = E[s_2]/n.
    double expect_s2 = 0.0;
    const unsigned n_masks = 1u << n;
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (unsigned mask = 0; mask < n_masks; ++mask) {
        for (int v = 0; v < n; ++v) {
            comp[static_cast<std::size_t>(v)] = v;
        }
        for (int e = 0; e < n; ++e) {
            if ((mask >> e) & 1u) {
                const int a = comp[static_cast<std::size_t>(e)];
                const int b = comp[static_cast<std::size_t>((e + 1) % n)];
                if (a != b) {
                    for (int v = 0; v < n; ++v) {
                        if (comp[static_cast<std::size_t>(v)] == b) {
                            comp[static_cast<std::size_t>(v)] = a;
                        }
                    }
                }
            }
        }
        long long s2 = 0;
        for (int root = 0; root < n; ++root) {
            long long size = 0;
            for (int v = 0; v < n; ++v) {
                if (comp[static_cast<std::size_t>(v)] == root) {
                    ++size;
                }
            }
            s2 += size * size;
        }
        const int m = __builtin_popcount(mask);
        expect_s2 += static_cast<double>(s2) * std::pow(p, m) *
                     std::pow(1.0 - p, n - m);
    }
    return expect_s2 / static_cast<double>(n);
}

CycleScan cycle_scan(long long n, const std::vector<double>& p_grid) {
    if (p_grid.size() < 3) {
        throw std::invalid_argument("cycle_scan: need at least 3 grid points");
    }
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (!(p_grid[i] > 0.0) || !(p_grid[i] < 1.0) ||
            (i > 0 && p_grid[i] <= p_grid[i - 1])) {
            throw std::invalid_argument(
                "cycle_scan: grid must ascend strictly within (0, 1)");
        }
    }
    const auto logder = [n](double p) { return cycle_susceptibility(n, p).logder; };

    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        const double value = logder(p_grid[i]);
        if (value > best_value) {
            best_value = value;
            best = i;
        }
    }
    CycleScan scan;
    scan.boundary = best == 0 || best + 1 == p_grid.size();
    scan.p_star = p_grid[best];
    scan.logder_max = best_value;
    if (scan.boundary) {
        return scan;
    }

    double a = p_grid[best - 1];
    double b = p_grid[best + 1];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double g1 = logder(x1);
    double g2 = logder(x2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-10 * (1.0 + b); ++iter) {
        if (g1 < g2) {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + inv_phi * (b - a);
            g2 = logder(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - inv_phi * (b - a);
            g1 = logder(x1);
        }
    }
    const double center = 0.5 * (a + b);
    const double g_center = logder(center);
    scan.p_star = center;
    scan.logder_max = std::max({g_center, g1, g2, best_value});
    if (g1 >= g2 && g1 >= g_center && g1 >= best_value) {
        scan.p_star = x1;
    } else if (g2 >= g1 && g2 >= g_center && g2 >= best_value) {
        scan.p_star = x2;
    } else if (best_value > g_center && best_value > g1 && best_value > g2) {
        scan.p_star = p_grid[best];
    }
    return scan;
}

double rho_solver(double eps) {
    if (!(eps > 0.0)) {
        throw std::domain_error("rho_solver: eps > 0 required (rho = 0 otherwise)");
    }
    // 1 - rho = e^(-(1+eps) rho)  <=>  h(rho) = -rho - expm1(-(1+eps) rho) = 0;
    // expm1 keeps h accurate near 0, where h ~ eps * rho.
    const auto h = [eps](double rho) {
        return -rho - std::expm1(-(1.0 + eps) * rho);
    };
    double lo = 1e-16;   // h > 0 here (slope eps at the origin)
    double hi = 1.0 - 1e-16;  // h < 0 here (h(1) = -e^(-(1+eps)))
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-14; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double bp_survival(double lambda) {
    if (!(lambda >= 0.0)) {
        throw std::domain_error("bp_survival: lambda >= 0 required");
    }
    if (lambda <= 1.0) {
        return 0.0;
    }
    return rho_solver(lambda - 1.0);
}

double otter_dwass_pmf(double lambda, long long k) {
    if (!(lambda >= 0.0) || k < 1) {
        throw std::invalid_argument("otter_dwass_pmf: lambda >= 0 and k >= 1 required");
    }
    if (lambda == 0.0) {
        return k == 1 ? 1.0 : 0.0;
    }
    const double kk = static_cast<double>(k);
    const double log_pmf = (kk - 1.0) * std::log(lambda * kk) - lambda * kk -
                           std::log(kk) - std::lgamma(kk);
    return std::exp(log_pmf);
}

SusceptibilityBoundsReport verify_susceptibility_bounds(long long n, double p,
                                                        double eps,
                                                        long long replicates,
                                                        std::uint64_t seed,
                                                        int threads) {
    if (n < 1 || !(p >= 0.0) || !(p <= 1.0) || !(eps > 0.0)) {
        throw std::invalid_argument(
            "verify_susceptibility_bounds: n >= 1, p in [0,1], eps > 0 required");
    }
    SusceptibilityBoundsReport report;
    report.n = n;
    report.p = p;
    report.eps = eps;
    report.supercritical_constant = 10.0;
    report.note =
        "the near-critical constant D = 10 is an engineering proxy for a "
        "non-constructive constant";

    if (n <= 5) {
        report.used_enumeration = true;
        const ExactGnpReport exact = exact_small_n(static_cast<int>(n), p);
        report.mean_c = exact.expect_s_at_p[2] / static_cast<double>(n);
        report.mean_c_std_error = 0.0;
    } else {
        report.used_enumeration = false;
        const std::vector<double> values = [&] {
            std::vector<double> out(static_cast<std::size_t>(replicates));
            for (long long r = 0; r < replicates; ++r) {
                std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL *
                                                 (static_cast<std::uint64_t>(r) + 1);
                const percolation::ComponentStats stats =
                    percolation::sample_gnp_components(n, p, splitmix64(state));
                out[static_cast<std::size_t>(r)] =
                    static_cast<double>(stats.power_sums[2]) / static_cast<double>(n);
            }
            return out;
        }();
        (void)threads;
        double mean = 0.0;
        for (const double v : values) {
            mean += v;
        }
        mean /= static_cast<double>(replicates);
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - mean) * (v - mean);
        }
        report.mean_c = mean;
        report.mean_c_std_error =
            replicates > 1 ? std::sqrt(ss / (static_cast<double>(replicates) - 1.0) /
                                       static_cast<double>(replicates))
                           : 0.0;
    }

    const double np = static_cast<double>(n) * p;
    report.subcritical_applicable = np <= 1.0 - eps;
    if (report.subcritical_applicable) {
        report.subcritical_bound = 1.0 / eps;
        report.subcritical_pass =
            report.mean_c - 3.0 * report.mean_c_std_error <= report.subcritical_bound;
    }
    report.supercritical_applicable = np <= 1.0 + eps;
    if (report.supercritical_applicable) {
        report.supercritical_scale =
            std::max(eps * eps * static_cast<double>(n),
                     std::cbrt(static_cast<double>(n)));
        report.supercritical_ratio = report.mean_c / report.supercritical_scale;
        report.supercritical_pass =
            report.supercritical_ratio <= report.supercritical_constant;
    }
    return report;
}

TreeGraphReport verify_tree_graph(int n, double p, int k) {
    if (n < 1 || n > 5 || !(p > 0.0) || !(p < 1.0) || (k != 2 && k != 3)) {
        throw std::invalid_argument(
            "verify_tree_graph: n <= 5, p in (0,1), k in {2,3} required");
    }
    const ExactGnpReport exact = exact_small_n(n, p);
    // E|C(v)|^k = E[sum_i |C_i|^(k+1)] / n = E[s_(k+1)] / n.
    const double mean_c = exact.expect_s_at_p[2] / static_cast<double>(n);
    const double lhs =
        exact.expect_s_at_p[static_cast<std::size_t>(k + 1)] / static_cast<double>(n);
    const double rhs = static_cast<double>(specfun::semifactorial(2 * k - 3)) *
                       std::pow(mean_c, 2 * k - 1);
    TreeGraphReport report;
    report.n = n;
    report.p = p;
    report.k = k;
    report.lhs = lhs;
    report.rhs = rhs;
    report.pass = lhs <= rhs * (1.0 + 1e-12);
    return report;
}

}  // namespace oracles
}  // namespace critwin
