#pragma once

#include <utility>
#include <vector>

#include "orlicz/young.hpp"

namespace orlicz {

struct BourdonOptions {
    long pieces = 1000000;          // per-interval norms and partial sums run to this n
    long cauchy_start = 100000;     // increments must be small past this index
    double cauchy_tol = 1e-6;
    double tail_tol = 0.10;         // relative agreement of partial-sum increments with the integral
    double growth_factor = 0.9;     // modular(N) >= growth_factor * phi(1) * ln N
    long divergence_from = 7;       // modular(N) > 1 required for every N from here
    long mollified_pieces = 20;     // box-mollified copy compared on this many intervals
};

/**
 * Indicator f = sum 1_{A_n} on the line, with a_n = n^{-1/p},
 * A_n of length a_n^p inside (n, n + 1) and U_n = (n - eps, n + 1 + eps).
 */
struct BourdonReport {
    double p = 2.0;
    double kappa = 2.0;
    double eps = 0.05;
    long N = 0;
    double phi_one = 0.0;

    // Global modular at gamma = 1 over the first N pieces.
    double truncated_modular = 0.0;
    double harmonic = 0.0; // H_N
    std::vector<std::pair<long, double>> modular_series; // (N', modular) at checkpoints
    bool divergent_global = false;       // modular(N) > 1
    bool exceeds_from_threshold = false; // modular(N') > 1 for all divergence_from <= N' <= N
    bool log_growth = false;             // modular(N') >= 0.9 phi(1) ln N' for all N' <= N

    // ||f restricted to U_n|| for n <= pieces.
    long pieces = 0;
    double worst_piece_ratio = 0.0; // max_n ||f|U_n|| / a_n
    std::vector<double> first_piece_norms;
    bool finite_piecewise = false;

    // sum phi(a_n) over n <= pieces.
    double partial_sum = 0.0;
    double max_increment_after = 0.0; // max phi(a_n), n > cauchy_start
    bool cauchy = false;
    double partial_increment = 0.0;  // S(pieces) - S(cauchy_start)
    double integral_increment = 0.0; // int over the same range
    double tail_relative_error = 0.0;
    double tail_bound = 0.0;         // int_{pieces}^inf phi(a(x)) dx, bounds the remaining sum
    bool tail_consistent = false;

    // Box-mollified indicator: piece norms do not exceed the indicator's.
    double mollified_worst_ratio = 0.0;
    bool mollified_ok = false;

    bool ok() const
    {
        return divergent_global && exceeds_from_threshold && log_growth && finite_piecewise && cauchy &&
               tail_consistent && mollified_ok;
    }
};

/// Throws PreconditionError for kappa <= 1 or p <= 1, InputError for eps outside (0, 1/4) or N < 1.
BourdonReport bourdon_example(double p, double kappa, long N, double eps = 0.05, const BourdonOptions& options = {});

} // namespace orlicz
