// One PASS/FAIL line per acceptance criterion, each with its wall time and budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "orlicz/cech.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/qi.hpp"
#include "orlicz/simplicial.hpp"
#include "scenarios.hpp"

using namespace orlicz;
using orlicz::cli::json;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a)
{
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

std::string failed_invariants(const cli::Report& r)
{
    std::string s;
    for (const auto& [name, ok] : r.data["invariants"].items())
        if (!ok.get<bool>())
            s += " failed:" + name;
    return s;
}

Outcome luxemburg_suite()
{
    const YoungFunction phis[] = {YoungFunction::power(1.5), YoungFunction::power(2.0), YoungFunction::power(3.0),
                                  YoungFunction::log_damped(2.0, 2.0)};
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> size(1, 64);
    std::uniform_real_distribution<double> w(0.05, 3.0), lam(-5.0, 5.0);
    std::normal_distribution<double> n01;
    double homog = 0.0, triangle = 0.0, euclid = 0.0;
    for (int space_i = 0; space_i < 1000; ++space_i) {
        const int n = size(rng);
        std::vector<double> weights(n), f(n), g(n), fg(n), lf(n);
        const double l = lam(rng);
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
            weights[i] = w(rng);
            f[i] = n01(rng);
            g[i] = n01(rng);
            fg[i] = f[i] + g[i];
            lf[i] = l * f[i];
            sq += weights[i] * f[i] * f[i];
        }
        const auto space = MeasureSpace::weighted(weights);
        for (const auto& phi : phis) {
            const double nf = luxemburg_norm(phi, f, space).value;
            const double ng = luxemburg_norm(phi, g, space).value;
            homog = std::max(homog, std::abs(luxemburg_norm(phi, lf, space).value - std::abs(l) * nf) /
                                        (std::abs(l) * nf));
            triangle = std::max(triangle, luxemburg_norm(phi, fg, space).value / (nf + ng) - 1.0);
            if (phi.kind() == YoungFunction::Kind::Power && phi.exponent() == 2.0)
                euclid = std::max(euclid, std::abs(nf - std::sqrt(sq)) / std::sqrt(sq));
        }
    }
    return {homog <= 1e-9 && triangle <= 1e-9 && euclid <= 1e-9,
            fmt("homogeneity %.2e, triangle excess %.2e, p=2 vs Euclidean %.2e", homog, triangle, euclid)};
}

Outcome coboundary_suite()
{
    const YoungFunction phis[] = {YoungFunction::power(1.5), YoungFunction::power(3.0),
                                  YoungFunction::log_damped(2.0, 2.0)};
    int reports = 0, failures = 0;
    bool exact = true;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto X = complexes::random_bounded(16 + static_cast<int>(seed % 17), 3 + static_cast<int>(seed % 4), seed);
        for (int k = 0; k + 2 <= X.dim(); ++k)
            exact = exact && (X.coboundary_matrix(k + 1) * X.coboundary_matrix(k)).cwiseAbs().maxCoeff() == 0.0;
        const auto& phi = phis[seed % 3];
        for (int k = 0; k < X.dim(); ++k) {
            const auto rep = delta_continuity_report(phi, X, k, 20, seed * 7 + k);
            ++reports;
            failures += rep.holds() ? 0 : 1;
            exact = exact && rep.delta_squared_zero;
            worst = std::max(worst, rep.worst_ratio / rep.constant);
        }
    }
    return {failures == 0 && exact,
            fmt("%d reports, %d violations, worst ratio/constant %.3f, delta^2 exact %s", reports, failures, worst,
                exact ? "yes" : "no")};
}

Outcome qi_suite()
{
    const auto r = cli::run_scenario("qi-check", json::object());
    const auto& res = r.data["residuals"];
    double product_err = 0.0;
    for (const auto& v : res["identity_error_x"])
        product_err = std::max(product_err, v.get<double>());
    for (const auto& v : res["identity_error_y"])
        product_err = std::max(product_err, v.get<double>());
    bool ok = r.pass();

    // Ray of 100 vertices against its doubling; masks matched through the chain maps.
    const auto X = complexes::path(100);
    const auto Y = complexes::path(199);
    std::vector<int> f(100), g(199);
    for (int i = 0; i < 100; ++i)
        f[i] = 2 * i;
    for (int j = 0; j < 199; ++j)
        g[j] = j / 2;
    const auto cf = build_chain_map(X, Y, f, 1);
    const auto cg = build_chain_map(Y, X, g, 1);
    BoundaryPointModel xi_x, xi_y;
    for (int i = 0; i < 100; ++i)
        xi_x.ray.push_back(i);
    for (int i = 0; i < 199; ++i)
        xi_y.ray.push_back(i);
    const auto s = pulled_back_threshold(X, Y, cf, xi_x, xi_y, 100.0);
    const auto mask_x = relative_mask(X, xi_x, s.t_x);
    const auto mask_y = relative_mask(Y, xi_y, 100.0);
    const auto back = pulled_back_threshold(Y, X, cg, xi_y, xi_x, s.t_x);
    const auto mask_back = relative_mask(Y, xi_y, back.t_x);
    std::size_t leaks = 0, checked = 0;
    for (int k = 0; k <= 1; ++k)
        for (std::size_t tau = 0; tau < Y.count(k); ++tau) {
            if (mask_y.contains(k, tau))
                continue;
            Cochain ind = Cochain::zero(Y, k);
            ind.values[tau] = 1.0;
            ++checked;
            leaks += vanishes_on(pullback(X, cf, ind), mask_x) ? 0 : 1;
        }
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 50; ++trial) {
        Cochain theta = Cochain::zero(X, 1);
        for (std::size_t i = 0; i < X.count(1); ++i)
            if (!mask_x.contains(1, i))
                theta.values[i] = n01(rng);
        ++checked;
        leaks += vanishes_on(pullback(Y, cg, theta), mask_back) ? 0 : 1;
    }
    ok = ok && leaks == 0;
    return {ok, fmt("C6/C10 chain %d prism %d homotopy %d defects, |F#Fbar# - I| %.1e; ray: %zu relative cochains, "
                    "%zu leaks (t_x %.0f)",
                    res["chain_defects"].get<int>(), res["prism_defects"].get<int>(),
                    res["homotopy_defects"].get<int>(), product_err, checked, leaks, s.t_x) +
                    failed_invariants(r)};
}

Outcome poincare_suite()
{
    const auto r = cli::run_scenario("poincare", {{"seed", 7}, {"points", 64}, {"t_nodes", 32}});
    const auto& res = r.data["residuals"];
    return {r.pass(), fmt("residuals k=0 %.2e, k=1 %.2e, k=2 %.2e, cone %.2e", res["degree_0"].get<double>(),
                          res["degree_1"].get<double>(), res["degree_2"].get<double>(), res["cone"].get<double>()) +
                          failed_invariants(r)};
}

BicomplexElement poly_element(const CoverNerve& cn, int k, int l, std::uint64_t seed)
{
    const int C = static_cast<int>(multi_indices(2, k).size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> coef(cn.nerve().count(l) * C * 10);
    // Dyadic coefficients on a dyadic lattice keep every sum exact.
    for (double& c : coef)
        c = std::round(8.0 * u(rng)) / 8.0;
    return sample_element(cn, k, l, [&](std::size_t i, const double* x, double* out) {
        for (int c = 0; c < C; ++c) {
            const double* a = &coef[(i * C + c) * 10];
            const double X = x[0], Y = x[1];
            out[c] = a[0] + a[1] * X + a[2] * Y + a[3] * X * X + a[4] * X * Y + a[5] * Y * Y + a[6] * X * X * X +
                     a[7] * X * X * Y + a[8] * X * Y * Y + a[9] * Y * Y * Y;
        }
    });
}

Outcome bicomplex_suite()
{
    const Grid lattice({0, 0}, {1, 1}, {64, 64}, {true, true});
    const auto cn = CoverNerve::build(lattice, uniform_cover(lattice, 4, 0.25));
    double d2 = 0.0, anti = 0.0, retract = 0.0, contract = 0.0;
    std::uint64_t seed = 1;
    for (int l = 0; l <= 2; ++l)
        for (int k = 0; k <= 2; ++k) {
            const auto e = poly_element(cn, k, l, seed++);
            d2 = std::max(d2, d2_double_prime_residual(cn, e));
            contract = std::max(contract, contraction_residual(cn, e));
            if (k <= 1)
                anti = std::max(anti, anticommutator_residual(cn, e, 4));
            if (l <= 1)
                retract = std::max(retract, retraction_residual(cn, e, {}, 4));
        }
    return {d2 == 0.0 && anti <= 1e-8 && retract <= 1e-2 && contract <= 1e-2,
            fmt("d''^2 %.1e, d'd''+d''d' %.2e, Hd'+d'H-Id %.2e, Pd''+d''P-Id %.2e", d2, anti, retract, contract)};
}

Outcome zigzag_suite()
{
    const auto r = cli::run_scenario("zigzag", {{"model", "torus"}});
    const auto& res = r.data["residuals"];
    return {r.pass(), fmt("dim H1 %d, closedness %.2e / %.2e, normalized |det| %.3f, roundtrip %.2e",
                          r.data["values"]["dim_H1"].get<int>(), res["form_closedness"].get<double>(),
                          res["cocycle_defect"].get<double>(),
                          std::abs(r.data["values"]["normalized_det"].get<double>()),
                          res["roundtrip_reduced"].get<double>()) +
                          failed_invariants(r)};
}

Outcome convolution_suite()
{
    bool ok = true;
    std::string detail;
    for (const char* model : {"flat", "half-plane"}) {
        const auto conv = cli::run_scenario("convolve", {{"model", model}, {"seed", 11}, {"samples", 100}});
        const auto cart = cli::run_scenario("cartan", {{"model", model}, {"points", 128}});
        ok = ok && conv.pass() && cart.pass();
        const auto& cr = conv.data["residuals"]["commutation"];
        detail += fmt("%s: commutation@128 %.2e slope %.2f, Cartan %.2e, ratio max conv %.3f h %.4f; ", model,
                      cr.back().get<double>(), conv.data["values"]["commutation_slope"].get<double>(),
                      cart.data["residuals"]["cartan"].get<double>(),
                      conv.data["constants"]["conv_ratio_max"].get<double>(),
                      conv.data["constants"]["homotopy_ratio_max"].get<double>()) +
                  failed_invariants(conv) + failed_invariants(cart);
    }
    return {ok, detail};
}

Outcome bourdon_suite()
{
    const auto r = cli::run_scenario("bourdon", {{"p", 2.0}, {"kappa", 2.0}, {"N", 1000000}});
    const auto& v = r.data["values"];
    return {r.pass(), fmt("modular(N) %.3f, worst piece ratio %.6f, increment after 1e5 %.1e, tail error %.3f",
                          v["truncated_modular"].get<double>(), v["worst_piece_ratio"].get<double>(),
                          v["max_increment_after"].get<double>(),
                          r.data["residuals"]["tail_relative_error"].get<double>()) +
                          failed_invariants(r)};
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"luxemburg-norm-suite", 10, luxemburg_suite},  {"coboundary-continuity", 30, coboundary_suite},
        {"qi-cohomology-isomorphism", 10, qi_suite},     {"poincare-homotopy", 60, poincare_suite},
        {"bicomplex-identities", 60, bicomplex_suite},   {"weil-zigzag", 120, zigzag_suite},
        {"convolution-lemmas", 300, convolution_suite}, {"bourdon-example", 30, bourdon_suite},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.ok && t <= c.budget_s;
        failures += pass ? 0 : 1;
        std::printf("%s %-26s %7.2fs / %3.0fs  %s\n", pass ? "PASS" : "FAIL", c.name, t, c.budget_s,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
