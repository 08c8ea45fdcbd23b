#include "orlicz/young.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

YoungFunction YoungFunction::power(double p)
{
    if (!(p >= 1.0) || !std::isfinite(p))
        throw InputError("power Young function needs p >= 1");
    YoungFunction f;
    f.kind_ = Kind::Power;
    f.p_ = p;
    return f;
}

YoungFunction YoungFunction::log_damped(double p, double kappa)
{
    if (!(p > 1.0) || !(kappa > 0.0) || !std::isfinite(p) || !std::isfinite(kappa))
        throw InputError("log-damped Young function needs p > 1 and kappa > 0");
    YoungFunction f;
    f.kind_ = Kind::LogDamped;
    f.p_ = p;
    f.kappa_ = kappa;
    return f;
}

YoungFunction YoungFunction::tabulated(std::vector<double> knots, std::vector<double> values)
{
    if (knots.size() < 2 || knots.size() != values.size())
        throw InputError("tabulated Young function needs at least two matching knots/values");
    if (knots.front() != 0.0 || values.front() != 0.0)
        throw InputError("tabulated Young function must start at (0, 0)");
    double prev_slope = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i] > knots[i - 1]) || !std::isfinite(knots[i]) || !std::isfinite(values[i]))
            throw InputError("tabulated knots must be finite and strictly increasing");
        const double slope = (values[i] - values[i - 1]) / (knots[i] - knots[i - 1]);
        if (i == 1 && !(slope > 0.0))
            throw InputError("tabulated Young function must be positive away from 0");
        if (slope < prev_slope * (1.0 - 1e-12))
            throw InputError("tabulated Young function is not convex");
        prev_slope = slope;
    }
    YoungFunction f;
    f.kind_ = Kind::Tabulated;
    f.knots_ = std::move(knots);
    f.values_ = std::move(values);
    return f;
}

YoungFunction YoungFunction::scaled(double factor) const
{
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw InputError("scale factor must be positive and finite");
    YoungFunction f = *this;
    f.scale_ *= factor;
    return f;
}

double YoungFunction::base(double a) const
{
    switch (kind_) {
    case Kind::Power:
        return p_ == 2.0 ? a * a : std::pow(a, p_);
    case Kind::LogDamped: {
        if (a == 0.0)
            return 0.0;
        if (std::isinf(a))
            return a;
        const double l = std::log(std::numbers::e + 1.0 / a);
        return std::pow(a, p_) / std::pow(l, kappa_);
    }
    case Kind::Tabulated: {
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), a);
        std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
        if (hi >= knots_.size())
            hi = knots_.size() - 1;
        const std::size_t lo = hi - 1;
        const double slope = (values_[hi] - values_[lo]) / (knots_[hi] - knots_[lo]);
        return values_[lo] + slope * (a - knots_[lo]);
    }
    }
    return 0.0;
}

double YoungFunction::operator()(double t) const
{
    if (!std::isfinite(t))
        throw InputError("Young function evaluated at a non-finite point");
    return scale_ * base(std::abs(t));
}

double YoungFunction::derivative(double t) const
{
    if (!std::isfinite(t))
        throw InputError("Young function derivative at a non-finite point");
    const double a = std::abs(t);
    const double sign = t < 0.0 ? -1.0 : 1.0;
    double d = 0.0;
    switch (kind_) {
    case Kind::Power:
        d = p_ == 1.0 ? 1.0 : p_ * std::pow(a, p_ - 1.0);
        if (a == 0.0 && p_ > 1.0)
            d = 0.0;
        break;
    case Kind::LogDamped: {
        if (a == 0.0)
            break;
        const double inv = 1.0 / a;
        const double l = std::log(std::numbers::e + inv);
        const double lk = std::pow(l, -kappa_);
        d = p_ * std::pow(a, p_ - 1.0) * lk + kappa_ * std::pow(a, p_ - 2.0) * lk / (l * (std::numbers::e + inv));
        break;
    }
    case Kind::Tabulated: {
        // right derivative
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), a);
        std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
        if (hi >= knots_.size())
            hi = knots_.size() - 1;
        const std::size_t lo = hi - 1;
        d = (values_[hi] - values_[lo]) / (knots_[hi] - knots_[lo]);
        break;
    }
    }
    return sign * scale_ * d;
}

std::optional<double> YoungFunction::doubling_constant() const
{
    // log(e + 1/t) <= log 2 + log(e + 1/(2t)) <= (1 + log 2) * log(e + 1/(2t)).
    switch (kind_) {
    case Kind::Power:
        return std::pow(2.0, p_);
    case Kind::LogDamped:
        return std::pow(2.0, p_) * std::pow(1.0 + std::numbers::ln2, kappa_);
    case Kind::Tabulated:
        return std::nullopt;
    }
    return std::nullopt;
}

double YoungFunction::inverse(double s) const
{
    if (!std::isfinite(s))
        throw InputError("inverse of a Young function needs a finite level");
    if (s <= 0.0)
        return 0.0;
    double hi = 1.0;
    while ((*this)(hi) < s) {
        hi *= 2.0;
        if (hi > 1e300)
            throw ResolutionError("Young function inverse: level not reached");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((*this)(mid) >= s)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

std::string YoungFunction::describe() const
{
    std::ostringstream out;
    if (scale_ != 1.0)
        out << scale_ << "*";
    switch (kind_) {
    case Kind::Power:
        out << "|t|^" << p_;
        break;
    case Kind::LogDamped:
        out << "|t|^" << p_ << "/log(e+1/|t|)^" << kappa_;
        break;
    case Kind::Tabulated:
        out << "tabulated(" << knots_.size() << " knots)";
        break;
    }
    return out.str();
}

} // namespace orlicz
