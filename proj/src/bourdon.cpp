#include "orlicz/bourdon.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "orlicz/errors.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/measure.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

namespace {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

double overlap(Interval a, Interval b) { return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo)); }

class Construction {
public:
    Construction(double p, double eps) : p_(p), eps_(eps) {}

    double a(long n) const { return std::pow(static_cast<double>(n), -1.0 / p_); }

    /// A_n: length a_n^p = 1/n, placed 2 eps past n when it fits, centred otherwise.
    Interval piece(long n) const
    {
        if (n < 1)
            return {};
        const double len = 1.0 / static_cast<double>(n);
        const double start = len <= 1.0 - 4.0 * eps_ ? n + 2.0 * eps_ : n + 0.5 * (1.0 - len);
        return {start, start + len};
    }

    Interval window(long n) const { return {n - eps_, n + 1.0 + eps_}; }

    /// Measure of supp f inside U_n.
    double mass(long n) const
    {
        const Interval U = window(n);
        double m = 0.0;
        for (long j = n - 1; j <= n + 1; ++j)
            m += overlap(piece(j), U);
        return m;
    }

private:
    double p_;
    double eps_;
};

/// Indicator of A convolved with the normalized box of width delta.
double mollified(Interval A, double delta, double x)
{
    return overlap({x - 0.5 * delta, x + 0.5 * delta}, A) / delta;
}

/// 1, 2, ..., 10, then 20, 50, 100, 200, 500, ...
long next_in_series(long n)
{
    if (n < 10)
        return n + 1;
    long decade = 1;
    while (decade * 10 <= n)
        decade *= 10;
    const long lead = n / decade;
    return lead == 1 ? 2 * decade : (lead == 2 ? 5 * decade : 10 * decade);
}

} // namespace

BourdonReport bourdon_example(double p, double kappa, long N, double eps, const BourdonOptions& options)
{
    if (!(p > 1.0))
        throw PreconditionError("Bourdon example needs p > 1");
    if (!(kappa > 1.0))
        throw PreconditionError("Bourdon example needs kappa > 1 for the piece norms to be summable");
    if (!(eps > 0.0) || eps >= 0.25)
        throw InputError("Bourdon intervals need 0 < eps < 1/4");
    if (N < 1 || options.pieces < 1 || options.cauchy_start < 1 || options.cauchy_start >= options.pieces)
        throw InputError("Bourdon truncation sizes are out of range");

    const YoungFunction phi = YoungFunction::log_damped(p, kappa);
    const Construction C(p, eps);
    BourdonReport r;
    r.p = p;
    r.kappa = kappa;
    r.eps = eps;
    r.N = N;
    r.phi_one = phi(1.0);

    // Global modular at gamma = 1: phi(1) times the total length of A_1..A_N.
    r.exceeds_from_threshold = true;
    r.log_growth = true;
    double length = 0.0;
    long next_checkpoint = 1;
    for (long n = 1; n <= N; ++n) {
        const Interval A = C.piece(n);
        length += A.hi - A.lo;
        r.harmonic += 1.0 / static_cast<double>(n);
        const double mod = r.phi_one * length;
        if (n >= options.divergence_from && !(mod > 1.0))
            r.exceeds_from_threshold = false;
        if (mod < options.growth_factor * r.phi_one * std::log(static_cast<double>(n)))
            r.log_growth = false;
        if (n == next_checkpoint || n == N) {
            r.modular_series.push_back({n, mod});
            if (n == next_checkpoint)
                next_checkpoint = next_in_series(n);
        }
    }
    r.truncated_modular = r.phi_one * length;
    r.divergent_global = r.truncated_modular > 1.0;

    // ||1_E||_phi = 1 / phi^{-1}(1 / |E|).
    r.pieces = options.pieces;
    double worst = 0.0;
    const long P = options.pieces;
#pragma omp parallel for reduction(max : worst) schedule(static)
    for (long n = 1; n <= P; ++n) {
        const double m = C.mass(n);
        const double norm = 1.0 / phi.inverse(1.0 / m);
        worst = std::max(worst, norm / C.a(n));
    }
    r.worst_piece_ratio = worst;
    for (long n = 1; n <= std::min<long>(P, 10); ++n)
        r.first_piece_norms.push_back(1.0 / phi.inverse(1.0 / C.mass(n)));
    r.finite_piecewise = worst <= 1.0;

    // Partial sums of phi(a_n), smallest terms first.
    double sum = 0.0, comp = 0.0, tail_part = 0.0;
    for (long n = P; n >= 1; --n) {
        const double term = phi(C.a(n));
        if (n == options.cauchy_start)
            tail_part = sum;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    r.partial_sum = sum;
    r.partial_increment = tail_part;
    r.max_increment_after = phi(C.a(options.cauchy_start + 1));
    r.cauchy = r.max_increment_after < options.cauchy_tol;

    // phi(a(x)) dx = du / log(e + e^{u/p})^kappa with u = ln x.
    auto integrand = [&](double u) { return 1.0 / std::pow(std::log(std::exp(1.0) + std::exp(u / p)), kappa); };
    boost::math::quadrature::tanh_sinh<double> finite_rule;
    r.integral_increment = finite_rule.integrate(integrand, std::log(static_cast<double>(options.cauchy_start)),
                                                 std::log(static_cast<double>(P)));
    r.tail_relative_error = std::abs(r.partial_increment - r.integral_increment) / r.integral_increment;
    boost::math::quadrature::exp_sinh<double> tail_rule;
    const double u0 = std::log(static_cast<double>(P));
    r.tail_bound = tail_rule.integrate([&](double v) { return integrand(u0 + v); });
    r.tail_consistent = r.tail_relative_error <= options.tail_tol && std::isfinite(r.tail_bound);

    // Box mollifier of width eps/2 keeps every piece norm at most the indicator's.
    const double delta = 0.5 * eps;
    const Rule1D gl = gauss_legendre(12, 0.0, 1.0);
    r.mollified_worst_ratio = 0.0;
    for (long n = 1; n <= options.mollified_pieces; ++n) {
        const Interval U = C.window(n);
        std::vector<double> cuts = {U.lo, U.hi};
        for (long j = n - 1; j <= n + 1; ++j) {
            const Interval A = C.piece(j);
            if (j < 1)
                continue;
            for (double c : {A.lo - 0.5 * delta, A.lo + 0.5 * delta, A.hi - 0.5 * delta, A.hi + 0.5 * delta})
                if (c > U.lo && c < U.hi)
                    cuts.push_back(c);
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> values, weights;
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double a = cuts[s], b = cuts[s + 1];
            if (b - a <= 0.0)
                continue;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                const double x = a + (b - a) * gl.nodes[q];
                double g = 0.0;
                for (long j = std::max(1L, n - 1); j <= n + 1; ++j)
                    g += mollified(C.piece(j), delta, x);
                values.push_back(g);
                weights.push_back((b - a) * gl.weights[q]);
            }
        }
        const double smooth = luxemburg_norm(phi, values, MeasureSpace::weighted(weights)).value;
        const double sharp = 1.0 / phi.inverse(1.0 / C.mass(n));
        r.mollified_worst_ratio = std::max(r.mollified_worst_ratio, smooth / sharp);
    }
    r.mollified_ok = r.mollified_worst_ratio <= 1.0 + 1e-8;
    return r;
}

} // namespace orlicz
