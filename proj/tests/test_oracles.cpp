#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "critwin/oracles.hpp"
#include "critwin/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace critwin::oracles;

TEST_CASE("polynomial arithmetic") {
    const Polynomial p{{1, 2, 3}};  // 1 + 2p + 3p^2
    CHECK(p.eval(0.0) == 1.0);
    CHECK(p.eval(1.0) == 6.0);
    CHECK(p.eval(2.0) == 17.0);
    const Polynomial d = p.derivative();
    CHECK(d == Polynomial{{2, 6}});
    CHECK(d.eval(0.5) == 5.0);
    const Polynomial q = multiply_by_one_minus_p(Polynomial{{1, 1}});
    // (1-p)(1+p) = 1 - p^2
    CHECK(q == Polynomial{{1, 0, -1}});
    CHECK((p - p) == Polynomial{{0, 0, 0}});
    // Trailing zeros do not affect equality.
    CHECK(Polynomial{{1, 2}} == Polynomial{{1, 2, 0, 0}});
}

TEST_CASE("graph_stats on hand-checked graphs") {
    // n = 4, no edges: four singletons.
    const GraphStats empty = graph_stats(4, 0u);
    CHECK(empty.sizes == std::vector<int>{1, 1, 1, 1});
    CHECK(empty.power_sums[1] == 4);
    CHECK(empty.power_sums[2] == 4);
    CHECK(empty.power_sums[6] == 4);

    // n = 4, all six edges: one component of 4.
    const GraphStats full = graph_stats(4, 63u);
    CHECK(full.sizes == std::vector<int>{4});
    CHECK(full.power_sums[2] == 16);
    CHECK(full.power_sums[3] == 64);

    // n = 4, single edge (0,1): sizes 2,1,1.
    const GraphStats one = graph_stats(4, 1u);
    CHECK(one.sizes == std::vector<int>{2, 1, 1});
    CHECK(one.power_sums[1] == 4);
    CHECK(one.power_sums[2] == 6);
    CHECK(one.power_sums[4] == 18);

    CHECK_THROWS_AS(graph_stats(6, 0u), std::invalid_argument);
}

TEST_CASE("two-point graph expectations") {
    // One possible edge: E[s_2] = 2(1-p) + 4p = 2 + 2p.
    const ExactGnpReport report = exact_small_n(2, 0.3);
    CHECK(report.expect_s[2] == Polynomial{{2, 2}});
    CHECK(report.susceptibility_sum == doctest::Approx(2.6).epsilon(1e-14));
    CHECK(report.d_susceptibility_dp == doctest::Approx(2.0).epsilon(1e-14));
    // pair_product is 2 without the edge, 0 with it: E = 2(1-p).
    CHECK(report.expect_pair == Polynomial{{2, -2}});
}

TEST_CASE("three-point mean component size at p = 1/2") {
    const ExactGnpReport report = exact_small_n(3, 0.5);
    CHECK(report.expect_s_at_p[2] / 3.0 == doctest::Approx(2.25).epsilon(1e-14));
}

TEST_CASE("susceptibility derivative identity holds as exact polynomials") {
    for (int n = 1; n <= 5; ++n) {
        const ExactGnpReport report = exact_small_n(n, 0.3);
        const Polynomial lhs =
            multiply_by_one_minus_p(report.expect_s[2].derivative());
        CHECK(lhs == report.expect_pair);
    }
}

TEST_CASE("pivotal triple count equals the pair power sum, graph by graph") {
    // The identity counts ordered disconnected pairs (v, w) against absent
    // edges whose addition joins them.
    for (unsigned mask = 0; mask < 64u; ++mask) {  // all graphs on 4 vertices
        const GraphStats stats = graph_stats(4, mask);
        const long long rhs =
            stats.power_sums[2] * stats.power_sums[2] - stats.power_sums[4];
        CHECK(pivotal_pairs_bruteforce(4, mask) == rhs);
    }
    long long checked = 0;
    for (unsigned mask = 0; mask < 1024u; ++mask) {  // all graphs on 5 vertices
        const GraphStats stats = graph_stats(5, mask);
        const long long rhs =
            stats.power_sums[2] * stats.power_sums[2] - stats.power_sums[4];
        REQUIRE(pivotal_pairs_bruteforce(5, mask) == rhs);
        ++checked;
    }
    CHECK(checked == 1024);
}

TEST_CASE("pivotal count on the two-point graph") {
    // Edge absent: both ordered pairs are joined by the one edge -> 2, and
    // s_2^2 - s_4 = 4 - 2 = 2.  Edge present: nothing to join -> 0 = 16 - 16.
    CHECK(pivotal_pairs_bruteforce(2, 0u) == 2);
    CHECK(pivotal_pairs_bruteforce(2, 1u) == 0);
}

TEST_CASE("moment polynomials evaluate consistently at the probe point") {
    const ExactGnpReport report = exact_small_n(4, 0.37);
    CHECK(report.expect_s2_sq_at_p ==
          doctest::Approx(report.expect_s2_sq.eval(0.37)).epsilon(1e-15));
    CHECK(report.expect_pair_at_p ==
          doctest::Approx(report.expect_s2_sq_at_p -
                          report.expect_s_at_p[4])
              .epsilon(1e-12));
    // E[s_2^3] >= E[s_2]^3 (Jensen) and E[s_3^2] >= 0 sanity.
    CHECK(report.expect_s2_cu_at_p >=
          std::pow(report.expect_s_at_p[2], 3.0) - 1e-9);
    CHECK(report.expect_s3_sq_at_p > 0.0);
}

TEST_CASE("cycle closed form matches brute enumeration") {
    for (const double p : {0.1, 0.2, 0.5, 0.8, 0.95}) {
        const double closed = cycle_susceptibility(8, p).chi;
        const double brute = cycle_chi_enumeration(8, p);
        CHECK(closed == doctest::Approx(brute).epsilon(1e-12));
    }
    // The 3-cycle is the complete graph on three vertices.
    for (const double p : {0.25, 0.5, 0.75}) {
        const ExactGnpReport k3 = exact_small_n(3, p);
        CHECK(cycle_susceptibility(3, p).chi ==
              doctest::Approx(k3.expect_s_at_p[2] / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("cycle derivative matches a finite difference") {
    const long long n = 50;
    const double p = 0.9;
    const double h = 1e-7;
    const double fd = (cycle_susceptibility(n, p + h).chi -
                       cycle_susceptibility(n, p - h).chi) /
                      (2.0 * h);
    const CycleReport report = cycle_susceptibility(n, p);
    CHECK(report.dchi_dp == doctest::Approx(fd).epsilon(1e-6));
    CHECK(report.logder == doctest::Approx(report.dchi_dp / report.chi)
                               .epsilon(1e-14));
}

TEST_CASE("cycle endpoints") {
    CHECK(cycle_susceptibility(10, 0.0).chi == doctest::Approx(1.0));
    CHECK(cycle_susceptibility(10, 1.0).chi == doctest::Approx(10.0));
    CHECK_THROWS_AS(cycle_susceptibility(10, -0.1), std::domain_error);
    CHECK_THROWS_AS(cycle_susceptibility(10, 1.1), std::domain_error);
    CHECK_THROWS_AS(cycle_susceptibility(2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(cycle_chi_enumeration(21, 0.5), std::invalid_argument);
}

TEST_CASE("cycle scan finds an interior peak in the connectivity window") {
    const long long n = 100;
    std::vector<double> grid;
    for (double x = 6.0; x >= 0.5 - 1e-9; x -= 0.05) {
        grid.push_back(1.0 - x / static_cast<double>(n));
    }
    const CycleScan scan = cycle_scan(n, grid);
    CHECK_FALSE(scan.boundary);
    const double xstar = (1.0 - scan.p_star) * static_cast<double>(n);
    // Reference maximizer (independent numerical optimization): x* ~ 2.4,
    // peak height ~ 0.23 n.
    CHECK(xstar > 1.5);
    CHECK(xstar < 3.5);
    CHECK(scan.logder_max / static_cast<double>(n) ==
          doctest::Approx(0.23).epsilon(0.05));
    // The refined peak must dominate every grid sample.
    for (const double p : grid) {
        CHECK(scan.logder_max >= cycle_susceptibility(n, p).logder - 1e-12);
    }
}

TEST_CASE("cycle scan flags a boundary argmax") {
    const long long n = 100;
    // Window strictly left of the peak: logder is increasing here.
    std::vector<double> grid{0.5, 0.6, 0.7, 0.8};
    const CycleScan scan = cycle_scan(n, grid);
    CHECK(scan.boundary);
    CHECK(scan.p_star == 0.8);
    CHECK_THROWS_AS(cycle_scan(n, std::vector<double>{0.3, 0.2, 0.4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(cycle_scan(n, std::vector<double>{0.3, 0.4}),
                    std::invalid_argument);
}

TEST_CASE("fixed point of the survival equation") {
    for (const double eps : {1e-3, 1e-2, 0.1, 0.5, 1.0, 3.0}) {
        const double rho = rho_solver(eps);
        CHECK(rho > 0.0);
        CHECK(rho < 1.0);
        CHECK(std::abs(1.0 - rho - std::exp(-(1.0 + eps) * rho)) < 1e-13);
    }
    // Small-eps expansion: rho = 2 eps (1 + O(eps)).
    CHECK(rho_solver(0.01) / 0.02 == doctest::Approx(1.0).epsilon(0.05));
    // Independent high-precision root of 1 - rho = e^(-2 rho).
    CHECK(rho_solver(1.0) ==
          doctest::Approx(0.7968121300200200).epsilon(1e-12));
    CHECK_THROWS_AS(rho_solver(0.0), std::domain_error);
    CHECK_THROWS_AS(rho_solver(-0.5), std::domain_error);
}

TEST_CASE("branching-process survival probability") {
    CHECK(bp_survival(0.0) == 0.0);
    CHECK(bp_survival(0.7) == 0.0);
    CHECK(bp_survival(1.0) == 0.0);
    CHECK(bp_survival(2.0) ==
          doctest::Approx(0.7968121300200200).epsilon(1e-12));
    CHECK(bp_survival(1.5) > 0.0);
    CHECK(bp_survival(3.0) > bp_survival(2.0));
    CHECK_THROWS_AS(bp_survival(-1.0), std::domain_error);
}

TEST_CASE("total-progeny pmf") {
    CHECK(otter_dwass_pmf(0.0, 1) == 1.0);
    CHECK(otter_dwass_pmf(0.0, 5) == 0.0);
    CHECK(otter_dwass_pmf(1.0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(otter_dwass_pmf(0.7, 1) == doctest::Approx(std::exp(-0.7)));
    // k = 2: (2 lambda)^1 e^(-2 lambda) / (2 * 1!) = lambda e^(-2 lambda).
    CHECK(otter_dwass_pmf(0.7, 2) ==
          doctest::Approx(0.7 * std::exp(-1.4)).epsilon(1e-14));

    // Mass sums to 1 below criticality and to the extinction probability
    // above it.
    double mass_sub = 0.0;
    double mass_sup = 0.0;
    for (long long k = 1; k <= 20000; ++k) {
        mass_sub += otter_dwass_pmf(0.5, k);
        mass_sup += otter_dwass_pmf(2.0, k);
    }
    CHECK(mass_sub == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mass_sup == doctest::Approx(1.0 - bp_survival(2.0)).epsilon(1e-9));

    CHECK_THROWS_AS(otter_dwass_pmf(0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(otter_dwass_pmf(-0.5, 1), std::invalid_argument);
}

TEST_CASE("tree-graph inequality on enumerable graphs") {
    for (int n = 3; n <= 5; ++n) {
        for (const double p : {0.05, 0.2, 0.4, 0.6, 0.9}) {
            for (const int k : {2, 3}) {
                const TreeGraphReport report = verify_tree_graph(n, p, k);
                CHECK(report.pass);
                CHECK(report.lhs > 0.0);
                CHECK(report.rhs > 0.0);
            }
        }
    }
    CHECK_THROWS_AS(verify_tree_graph(4, 0.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(verify_tree_graph(9, 0.5, 2), std::invalid_argument);
}

TEST_CASE("tree-graph inequality k = 2 unpacks to the second moment") {
    // For k = 2 the inequality reads E[s_3]/n <= (E[s_2]/n)^3.
    const double p = 0.3;
    const ExactGnpReport report = exact_small_n(4, p);
    const TreeGraphReport tree = verify_tree_graph(4, p, 2);
    CHECK(tree.lhs ==
          doctest::Approx(report.expect_s_at_p[3] / 4.0).epsilon(1e-14));
    CHECK(tree.rhs ==
          doctest::Approx(std::pow(report.expect_s_at_p[2] / 4.0, 3.0))
              .epsilon(1e-14));
}

TEST_CASE("susceptibility bounds report via enumeration") {
    // n = 4, p = 0.05: np = 0.2 <= 1 - eps for eps = 0.5.
    const SusceptibilityBoundsReport report =
        verify_susceptibility_bounds(4, 0.05, 0.5);
    CHECK(report.used_enumeration);
    CHECK(report.mean_c_std_error == 0.0);
    CHECK(report.subcritical_applicable);
    CHECK(report.subcritical_pass);
    CHECK(report.mean_c <= report.subcritical_bound);
    CHECK(report.supercritical_applicable);
    CHECK(report.supercritical_pass);
    CHECK_FALSE(report.note.empty());
}

TEST_CASE("susceptibility bounds report via sampling") {
    const long long n = 20000;
    const double eps = 0.5;
    const double p = 0.4 / static_cast<double>(n);  // np = 0.4 <= 1 - eps
    const SusceptibilityBoundsReport report =
        verify_susceptibility_bounds(n, p, eps, 16, 9);
    CHECK_FALSE(report.used_enumeration);
    CHECK(report.mean_c > 0.0);
    CHECK(report.mean_c_std_error > 0.0);
    CHECK(report.subcritical_applicable);
    // E|C| <= 1/eps = 2 with margin: the subcritical mean is ~1/(1-np+...).
    CHECK(report.subcritical_pass);
    CHECK(report.supercritical_applicable);
    CHECK(report.supercritical_pass);
    CHECK(report.supercritical_scale ==
          doctest::Approx(std::max(eps * eps * n, std::cbrt(double(n)))));
}

TEST_CASE("bounds report rejects bad arguments") {
    CHECK_THROWS_AS(verify_susceptibility_bounds(0, 0.5, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_susceptibility_bounds(10, 1.5, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_susceptibility_bounds(10, 0.5, 0.0),
                    std::invalid_argument);
}

TEST_CASE("enumeration refuses n > 5") {
    CHECK_THROWS_AS(exact_small_n(6, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(pivotal_pairs_bruteforce(6, 0u), std::invalid_argument);
}
