#pragma once

#include <optional>
#include <string>
#include <vector>

namespace orlicz {

/**
 * Even convex function phi with phi(t) = 0 iff t = 0.
 *
 * Four families are supported: |t|^p, the log-damped power
 * |t|^p / log(e + 1/|t|)^kappa, and a convex piecewise-linear interpolant
 * of user-supplied knots. Any of them can carry a positive scale factor,
 * which is how K*phi is represented.
 */
class YoungFunction {
public:
    enum class Kind { Power, LogDamped, Tabulated };

    static YoungFunction power(double p);
    static YoungFunction log_damped(double p, double kappa);
    /// Knots 0 = t_0 < t_1 < ... with values 0 = v_0 < v_1 < ..., convex.
    /// Extended linearly with the last slope past the final knot.
    static YoungFunction tabulated(std::vector<double> knots, std::vector<double> values);

    /// K * phi for K > 0.
    YoungFunction scaled(double factor) const;

    double operator()(double t) const;
    /// phi'(t); the right derivative at kinks, odd in t.
    double derivative(double t) const;

    Kind kind() const { return kind_; }
    double exponent() const { return p_; }
    double kappa() const { return kappa_; }
    double scale() const { return scale_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

    /// Doubling constant sup phi(2t)/phi(t) when known in closed form.
    std::optional<double> doubling_constant() const;

    /// Generalized right inverse inf{t >= 0 : phi(t) >= s}, by bisection.
    double inverse(double s) const;

    std::string describe() const;

private:
    YoungFunction() = default;
    double base(double a) const;

    Kind kind_ = Kind::Power;
    double p_ = 2.0;
    double kappa_ = 0.0;
    double scale_ = 1.0;
    std::vector<double> knots_;
    std::vector<double> values_;
};

} // namespace orlicz
