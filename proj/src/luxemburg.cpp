#include "orlicz/luxemburg.hpp"

#include <numeric>

namespace orlicz {

double modular(const YoungFunction& phi, std::span<const double> f, const MeasureSpace& space, double gamma)
{
    return modular_of(phi, f, space, gamma);
}

NormResult luxemburg_norm(const YoungFunction& phi, std::span<const double> f, const MeasureSpace& space, double tol)
{
    return luxemburg_norm_of(phi, f, space, tol);
}

double counting_norm(const YoungFunction& phi, std::span<const double> f, double tol)
{
    return luxemburg_norm_of(phi, f, MeasureSpace::counting(f.size()), tol).value;
}

namespace {

struct ConjugatePoint {
    double value = 0.0;
    double argmax = 0.0;
};

ConjugatePoint conjugate_solve(const YoungFunction& phi, double s, const ConjugateGrid& grid)
{
    if (!std::isfinite(s))
        throw InputError("conjugate evaluated at a non-finite slope");
    if (grid.samples < 3 || !(grid.t_max > 0.0))
        throw InputError("conjugate grid needs t_max > 0 and at least 3 samples");
    const double a = std::abs(s);
    if (a == 0.0)
        return {};
    const int n = grid.samples;
    const double step = grid.t_max / (n - 1);
    auto objective = [&](double t) { return a * t - phi(t); };

    int best = 0;
    double best_value = objective(0.0);
    for (int i = 1; i < n; ++i) {
        const double v = objective(i * step);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best == n - 1)
        throw ResolutionError("conjugate: maximizer not bracketed by the grid");

    // objective is concave, so golden section on the neighbouring cells converges.
    double lo = best > 0 ? (best - 1) * step : 0.0;
    double hi = (best + 1) * step;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = objective(x1);
        }
    }
    if (best_value >= f1 && best_value >= f2)
        return {best_value, best * step};
    return f1 >= f2 ? ConjugatePoint{f1, x1} : ConjugatePoint{f2, x2};
}

} // namespace

double conjugate_eval(const YoungFunction& phi, double s, const ConjugateGrid& grid)
{
    return conjugate_solve(phi, s, grid).value;
}

ConjugateTable::ConjugateTable(const YoungFunction& phi, double s_max, int knots) : s_max_(s_max)
{
    if (!(s_max > 0.0) || knots < 2)
        throw InputError("conjugate table needs s_max > 0 and at least two knots");
    knots_.resize(static_cast<std::size_t>(knots) + 1);
    values_.resize(knots_.size());
    slopes_.resize(knots_.size());
    finite_count_ = knots_.size();
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const double u = static_cast<double>(i) / knots;
        knots_[i] = s_max * u * u;
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        double value = std::numeric_limits<double>::infinity();
        double slope = 0.0;
        for (double t_max = 1.0; t_max <= 1e8; t_max *= 4.0) {
            try {
                const auto pt = conjugate_solve(phi, knots_[i], {t_max, 513});
                value = pt.value;
                slope = pt.argmax;
                break;
            } catch (const ResolutionError&) {
            }
        }
        if (!std::isfinite(value)) {
            finite_count_ = i;
            break;
        }
        values_[i] = value;
        slopes_[i] = slope;
    }
}

double ConjugateTable::operator()(double s) const
{
    const double a = std::abs(s);
    if (a > s_max_)
        return std::numeric_limits<double>::infinity();
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), a);
    std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
    if (hi >= knots_.size())
        hi = knots_.size() - 1;
    if (hi == 0)
        hi = 1;
    const std::size_t lo = hi - 1;
    if (hi >= finite_count_)
        return std::numeric_limits<double>::infinity();
    // Cubic Hermite: the derivative of phi* at s is the maximizer t*(s).
    // Clamped by the chord so the interpolant never exceeds the convex bound.
    const double h = knots_[hi] - knots_[lo];
    const double w = (a - knots_[lo]) / h;
    const double chord = values_[lo] + w * (values_[hi] - values_[lo]);
    const double w2 = w * w;
    const double w3 = w2 * w;
    const double herm = (2 * w3 - 3 * w2 + 1) * values_[lo] + (w3 - 2 * w2 + w) * h * slopes_[lo] +
                        (-2 * w3 + 3 * w2) * values_[hi] + (w3 - w2) * h * slopes_[hi];
    return std::clamp(herm, 0.0, chord);
}

NormEquivalenceReport check_norm_equivalence(const YoungFunction& phi, double factor, std::span<const double> f,
                                             const MeasureSpace& space, double tol)
{
    if (!(factor >= 1.0))
        throw InputError("norm equivalence check needs K >= 1");
    NormEquivalenceReport r;
    r.factor = factor;
    r.norm_phi = luxemburg_norm(phi, f, space, tol).value;
    r.norm_scaled = luxemburg_norm(phi.scaled(factor), f, space, tol).value;
    if (r.norm_phi > 0.0)
        r.ratio = r.norm_scaled / r.norm_phi;
    const double slack = 4.0 * tol;
    r.holds = r.norm_phi <= r.norm_scaled * (1.0 + slack) && r.norm_scaled <= factor * r.norm_phi * (1.0 + slack);
    return r;
}

HolderReport holder_check(const YoungFunction& phi, const ConjugateTable& conjugate, std::span<const double> f,
                          std::span<const double> g, const MeasureSpace& space, double tol)
{
    if (f.size() != space.size() || g.size() != space.size())
        throw InputError("Holder check: size mismatch");
    HolderReport r;
    for (std::size_t i = 0; i < f.size(); ++i)
        r.lhs += space.weight(i) * std::abs(f[i] * g[i]);
    r.norm_f = luxemburg_norm(phi, f, space, tol).value;
    r.norm_g_conjugate = luxemburg_norm_of(conjugate, g, space, tol).value;
    r.rhs = 2.0 * r.norm_f * r.norm_g_conjugate;
    r.holds = r.lhs <= r.rhs * (1.0 + 4.0 * tol) + 1e-300;
    return r;
}

HolderReport holder_check(const YoungFunction& phi, std::span<const double> f, std::span<const double> g,
                          const MeasureSpace& space, double tol)
{
    return holder_check(phi, ConjugateTable(phi), f, g, space, tol);
}

L1EmbeddingReport l1_embedding_bound(const YoungFunction& phi, std::span<const double> f, const MeasureSpace& space,
                                     double tol)
{
    if (f.size() != space.size())
        throw InputError("L1 embedding: size mismatch");
    L1EmbeddingReport r;
    for (std::size_t i = 0; i < f.size(); ++i)
        r.l1 += space.weight(i) * std::abs(f[i]);
    const double mass = space.total_mass();
    r.constant = mass * phi.inverse(1.0 / mass);
    r.bound = r.constant * luxemburg_norm(phi, f, space, tol).value;
    r.holds = r.l1 <= r.bound * (1.0 + 4.0 * tol) + 1e-300;
    return r;
}

DivergenceReport probe_divergence(const YoungFunction& phi, std::span<const Truncation> truncations,
                                  std::span<const double> gammas, std::size_t threshold, double tol)
{
    DivergenceReport r;
    r.divergent = threshold < truncations.size() && !gammas.empty();
    for (std::size_t i = 0; i < truncations.size(); ++i) {
        const Truncation& tr = truncations[i];
        std::vector<double> row;
        row.reserve(gammas.size());
        for (double g : gammas) {
            const double m = modular(phi, tr.values, tr.space, g);
            row.push_back(m);
            if (i >= threshold && !(m > 1.0))
                r.divergent = false;
        }
        r.modulars.push_back(std::move(row));
        r.norms.push_back(luxemburg_norm(phi, tr.values, tr.space, tol).value);
    }
    return r;
}

} // namespace orlicz
