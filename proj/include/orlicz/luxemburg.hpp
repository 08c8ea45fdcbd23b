#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/measure.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

inline constexpr double kDefaultNormTol = 1e-10;

struct NormResult {
    double value = 0.0;
    bool divergent = false;
    int iterations = 0;
    double lo = 0.0;
    double hi = 0.0;
    double modular_at_value = 0.0;
};

/// sum_i w_i phi(f_i / gamma) for any callable phi.
template <class Phi>
double modular_of(const Phi& phi, std::span<const double> f, const MeasureSpace& space, double gamma)
{
    if (!(gamma > 0.0))
        throw InputError("modular needs gamma > 0");
    if (f.size() != space.size())
        throw InputError("function and measure space sizes differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0.0)
            continue;
        sum += space.weight(i) * phi(f[i] / gamma);
    }
    return sum;
}

/**
 * Luxemburg norm inf{gamma > 0 : modular(gamma) <= 1} for any even, convex
 * callable phi, by geometric bracket expansion from max|f| and bisection.
 * Stops once the bracket width is at most tol * hi; the reported value is
 * the upper end, so modular(value) <= 1 always holds.
 */
template <class Phi>
NormResult luxemburg_norm_of(const Phi& phi, std::span<const double> f, const MeasureSpace& space,
                             double tol = kDefaultNormTol)
{
    if (!(tol > 0.0) || !(tol < 1.0))
        throw InputError("norm tolerance must lie in (0, 1)");
    if (f.size() != space.size())
        throw InputError("function and measure space sizes differ");
    double peak = 0.0;
    for (double v : f) {
        if (!std::isfinite(v))
            throw InputError("Luxemburg norm of a non-finite function");
        peak = std::max(peak, std::abs(v));
    }
    NormResult r;
    if (peak == 0.0)
        return r;

    auto mod = [&](double g) { return modular_of(phi, f, space, g); };
    double lo = peak;
    double hi = peak;
    int expansions = 0;
    if (mod(peak) <= 1.0) {
        do {
            hi = lo;
            lo *= 0.5;
            if (++expansions > 4000)
                throw ResolutionError("Luxemburg bracket: modular stays below 1 as gamma -> 0");
        } while (mod(lo) <= 1.0);
    } else {
        do {
            lo = hi;
            hi *= 2.0;
            if (++expansions > 2000 || !std::isfinite(hi)) {
                r.value = std::numeric_limits<double>::infinity();
                r.divergent = true;
                r.lo = lo;
                r.hi = hi;
                r.iterations = expansions;
                return r;
            }
        } while (mod(hi) > 1.0);
    }
    int it = expansions;
    while (hi - lo > tol * hi && it < 10000) {
        const double mid = 0.5 * (lo + hi);
        if (mod(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
        ++it;
    }
    r.value = hi;
    r.lo = lo;
    r.hi = hi;
    r.iterations = it;
    r.modular_at_value = mod(hi);
    return r;
}

double modular(const YoungFunction& phi, std::span<const double> f, const MeasureSpace& space, double gamma);

NormResult luxemburg_norm(const YoungFunction& phi, std::span<const double> f, const MeasureSpace& space,
                          double tol = kDefaultNormTol);

/// Norm of f over the counting measure on its entries.
double counting_norm(const YoungFunction& phi, std::span<const double> f, double tol = kDefaultNormTol);

/// Sampling of [0, t_max] used by the numeric Legendre transform.
struct ConjugateGrid {
    double t_max = 64.0;
    int samples = 4097;
};

/// sup_t (s*t - phi(t)) over the grid, refined by golden section around the
/// best sample. Throws ResolutionError when the maximizer sits on the grid edge.
double conjugate_eval(const YoungFunction& phi, double s, const ConjugateGrid& grid = {});

/**
 * Tabulated convex conjugate phi* on [0, s_max], cubic Hermite between knots.
 * Knots whose maximizer escapes every grid up to t = 1e8 are +inf, and so
 * is everything past s_max. Evaluation is even in s.
 */
class ConjugateTable {
public:
    ConjugateTable(const YoungFunction& phi, double s_max = 1e3, int knots = 4000);

    double operator()(double s) const;
    double s_max() const { return s_max_; }

private:
    double s_max_;
    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> slopes_;
    std::size_t finite_count_ = 0;
};

struct NormEquivalenceReport {
    double norm_phi = 0.0;
    double norm_scaled = 0.0;
    double ratio = 1.0;
    double factor = 1.0;
    bool holds = true;
};

/// Compares ||f||_phi with ||f||_{K phi}; expects 1 <= ratio <= K.
NormEquivalenceReport check_norm_equivalence(const YoungFunction& phi, double factor, std::span<const double> f,
                                             const MeasureSpace& space, double tol = kDefaultNormTol);

struct HolderReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double norm_f = 0.0;
    double norm_g_conjugate = 0.0;
    bool holds = true;
};

/// ||f g||_1 against 2 ||f||_phi ||g||_{phi*}.
HolderReport holder_check(const YoungFunction& phi, const ConjugateTable& conjugate, std::span<const double> f,
                          std::span<const double> g, const MeasureSpace& space, double tol = kDefaultNormTol);
HolderReport holder_check(const YoungFunction& phi, std::span<const double> f, std::span<const double> g,
                          const MeasureSpace& space, double tol = kDefaultNormTol);

struct L1EmbeddingReport {
    double l1 = 0.0;
    double bound = 0.0;
    double constant = 0.0; // mu(Z) * phi^{-1}(1 / mu(Z))
    bool holds = true;
};

L1EmbeddingReport l1_embedding_bound(const YoungFunction& phi, std::span<const double> f, const MeasureSpace& space,
                                     double tol = kDefaultNormTol);

/// One member of a truncation sequence approximating an infinite space.
struct Truncation {
    std::vector<double> values;
    MeasureSpace space;
};

struct DivergenceReport {
    /// modulars[i][j]: truncation i at gamma j.
    std::vector<std::vector<double>> modulars;
    std::vector<double> norms;
    bool divergent = false;
};

/**
 * Reports "divergent" when, for every probed gamma, the modular exceeds 1 on
 * every truncation from index `threshold` on. Norms of each truncation are
 * recorded as well.
 */
DivergenceReport probe_divergence(const YoungFunction& phi, std::span<const Truncation> truncations,
                                  std::span<const double> gammas, std::size_t threshold,
                                  double tol = kDefaultNormTol);

} // namespace orlicz
