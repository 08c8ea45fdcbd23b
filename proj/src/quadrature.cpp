#include "orlicz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/legendre.hpp>

#include "orlicz/errors.hpp"

namespace orlicz {

Rule1D gauss_legendre(int n, double a, double b)
{
    if (n < 1)
        throw InputError("Gauss-Legendre rule needs at least one node");
    if (!(b > a))
        throw InputError("Gauss-Legendre interval must satisfy a < b");
    // nonnegative zeros of P_n, ascending
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> x, w;
    for (double z : zeros) {
        const double dp = boost::math::legendre_p_prime(n, z);
        const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
        if (z == 0.0) {
            x.push_back(0.0);
            w.push_back(wt);
        } else {
            x.push_back(-z);
            w.push_back(wt);
            x.push_back(z);
            w.push_back(wt);
        }
    }
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    Rule1D r;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i : order) {
        r.nodes.push_back(mid + half * x[i]);
        r.weights.push_back(half * w[i]);
    }
    return r;
}

double PointRule::total_weight() const
{
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

PointRule tensor_rule(const std::vector<double>& lo, const std::vector<double>& hi, int per_axis)
{
    if (lo.size() != hi.size() || lo.empty())
        throw InputError("tensor rule needs matching non-empty bounds");
    const int d = static_cast<int>(lo.size());
    std::vector<Rule1D> axes;
    for (int i = 0; i < d; ++i)
        axes.push_back(gauss_legendre(per_axis, lo[i], hi[i]));
    PointRule r;
    r.dim = d;
    std::vector<int> idx(d, 0);
    while (true) {
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
            r.points.push_back(axes[i].nodes[idx[i]]);
            w *= axes[i].weights[idx[i]];
        }
        r.weights.push_back(w);
        int i = 0;
        while (i < d && ++idx[i] == per_axis)
            idx[i++] = 0;
        if (i == d)
            break;
    }
    return r;
}

PointRule ball_rule(const std::vector<double>& center, double radius, int radial, int angular)
{
    if (!(radius > 0.0))
        throw InputError("ball rule needs a positive radius");
    const int d = static_cast<int>(center.size());
    PointRule r;
    r.dim = d;
    if (d == 1) {
        const auto g = gauss_legendre(radial, center[0] - radius, center[0] + radius);
        r.points = g.nodes;
        r.weights = g.weights;
        return r;
    }
    if (d == 2) {
        const auto g = gauss_legendre(radial, 0.0, radius);
        for (int a = 0; a < angular; ++a) {
            const double th = 2.0 * std::numbers::pi * (a + 0.5) / angular;
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                r.points.push_back(center[0] + g.nodes[i] * std::cos(th));
                r.points.push_back(center[1] + g.nodes[i] * std::sin(th));
                r.weights.push_back(g.weights[i] * g.nodes[i] * 2.0 * std::numbers::pi / angular);
            }
        }
        return r;
    }
    std::vector<double> lo(center), hi(center);
    for (int i = 0; i < d; ++i) {
        lo[i] -= radius;
        hi[i] += radius;
    }
    const auto box = tensor_rule(lo, hi, radial);
    for (std::size_t p = 0; p < box.size(); ++p) {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i)
            r2 += (box.point(p)[i] - center[i]) * (box.point(p)[i] - center[i]);
        if (r2 <= radius * radius) {
            r.points.insert(r.points.end(), box.point(p), box.point(p) + d);
            r.weights.push_back(box.weights[p]);
        }
    }
    return r;
}

} // namespace orlicz
