#include "critwin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critwin {
namespace quadrature {

namespace {

// Gauss-Kronrod (7,15) nodes and weights on [-1, 1] (QUADPACK dqk15).
// Nodes are the positive half; even indices are Kronrod-only points, odd
// indices (and the center) are the embedded 7-point Gauss nodes.
constexpr int kHalfNodes = 8;
constexpr double kNodes[kHalfNodes] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
};
constexpr double kKronrodWeights[kHalfNodes] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278,
};
constexpr double kGaussWeights[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694,
};

struct Interval {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
};

bool by_error(const Interval& lhs, const Interval& rhs) {
    return lhs.error < rhs.error;  // max-heap on error
}

Interval evaluate(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = kKronrodWeights[7] * f(center);
    double gauss = kGaussWeights[3] * f(center);
    for (int i = 0; i < 7; ++i) {
        const double offset = half * kNodes[i];
        const double pair = f(center - offset) + f(center + offset);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) {
            gauss += kGaussWeights[i / 2] * pair;
        }
    }
    Interval result;
    result.a = a;
    result.b = b;
    result.value = kronrod * half;
    result.error = std::fabs((kronrod - gauss) * half);
    return result;
}

Result integrate_impl(const std::function<double(double)>& f,
                      const std::vector<double>& points, const Options& options) {
    std::vector<Interval> heap;
    Result out;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i] > points[i + 1]) {
            throw std::invalid_argument("quadrature: breakpoints must be nondecreasing");
        }
        if (points[i] == points[i + 1]) {
            continue;  // empty segment
        }
        heap.push_back(evaluate(f, points[i], points[i + 1]));
        out.evaluations += 15;
    }
    std::make_heap(heap.begin(), heap.end(), by_error);

    const auto totals = [&heap](double& value, double& error) {
        value = 0.0;
        error = 0.0;
        for (const Interval& node : heap) {
            value += node.value;
            error += node.error;
        }
    };

    double value = 0.0;
    double error = 0.0;
    totals(value, error);
    while (!heap.empty() && out.subdivisions < options.max_subdivisions) {
        if (error <= std::max(options.abs_tol, options.rel_tol * std::fabs(value))) {
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Interval worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval at floating-point resolution; keep it as is.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), by_error);
            break;
        }
        heap.push_back(evaluate(f, worst.a, mid));
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(evaluate(f, mid, worst.b));
        std::push_heap(heap.begin(), heap.end(), by_error);
        out.evaluations += 30;
        ++out.subdivisions;
        totals(value, error);
    }

    // Sum in spatial order for a reproducible result.
    std::sort(heap.begin(), heap.end(),
              [](const Interval& lhs, const Interval& rhs) { return lhs.a < rhs.a; });
    totals(value, error);
    out.value = value;
    out.error_estimate = error;
    out.converged =
        error <= std::max(options.abs_tol, options.rel_tol * std::fabs(value));
    return out;
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options) {
    if (!(a <= b)) {
        throw std::invalid_argument("quadrature: requires a <= b");
    }
    return integrate_impl(f, {a, b}, options);
}

Result integrate_segments(const std::function<double(double)>& f,
                          const std::vector<double>& points, const Options& options) {
    if (points.size() < 2) {
        throw std::invalid_argument("quadrature: need at least two breakpoints");
    }
    return integrate_impl(f, points, options);
}

}  // namespace quadrature
}  // namespace critwin
