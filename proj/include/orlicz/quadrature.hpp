#pragma once

#include <vector>

namespace orlicz {

/// One-dimensional rule: sum_i weights[i] f(nodes[i]) approximates the integral.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2n - 1.
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Points in R^d with weights.
struct PointRule {
    int dim = 0;
    std::vector<double> points; // row-major, dim per point
    std::vector<double> weights;
    std::size_t size() const { return weights.size(); }
    const double* point(std::size_t i) const { return points.data() + i * static_cast<std::size_t>(dim); }
    double total_weight() const;
};

/// Tensor Gauss-Legendre on the box prod [lo_i, hi_i].
PointRule tensor_rule(const std::vector<double>& lo, const std::vector<double>& hi, int per_axis);

/**
 * Disk of radius r about c in R^2: Gauss-Legendre in the radius (weight r dr)
 * times the periodic trapezoid rule in the angle, which is spectrally accurate.
 * Higher dimensions fall back to a tensor rule on the bounding box restricted
 * to the ball, with the weights of outside points dropped.
 */
PointRule ball_rule(const std::vector<double>& center, double radius, int radial, int angular);

} // namespace orlicz
