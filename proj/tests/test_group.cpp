#include <doctest.h>

#include <cmath>
#include <random>

#include "orlicz/errors.hpp"
#include "orlicz/group.hpp"
#include "orlicz/quadrature.hpp"

using namespace orlicz;

namespace {

Grid flat_grid(int m) { return Grid({-1.0, -1.0}, {1.0, 1.0}, {m, m}); }
Grid half_plane_grid(int m) { return Grid({-1.5, 0.5}, {1.5, 2.0}, {m, m}); }

double bump(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

/// Smooth 1-form supported in the disk of radius 0.6 about (0, 1.2).
void compact_one_form(const double* x, double* out)
{
    const double dx = (x[0] - 0.0) / 0.6, dy = (x[1] - 1.2) / 0.6;
    const double b = 3.0 * bump(dx * dx + dy * dy);
    out[0] = b * (1.0 + x[1]);
    out[1] = b * std::sin(x[0]);
}

double log2_ratio(double coarse, double fine) { return std::log2(coarse / fine); }

} // namespace

TEST_CASE("group models")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (const auto& G : {GroupModel::abelian(2), GroupModel::affine_half_plane()}) {
        const auto e = G.identity();
        const double zero[2] = {0.0, 0.0};
        double ez[2];
        G.exp(zero, ez);
        CHECK(ez[0] == e[0]);
        CHECK(ez[1] == e[1]);

        for (int trial = 0; trial < 50; ++trial) {
            const double Z[2] = {u(rng), u(rng)};
            double g[2], back[2], x[2], gx[2];
            G.exp(Z, g);
            G.log(g, back);
            CHECK(std::abs(back[0] - Z[0]) < 1e-12);
            CHECK(std::abs(back[1] - Z[1]) < 1e-12);
            const double X[2] = {u(rng), u(rng)};
            G.exp(X, x);
            G.multiply(g, x, gx);

            // Left translations are isometries: (dL_g)^T g(gx) dL_g = g(x), dL_g by central differences.
            Eigen::MatrixXd J(2, 2);
            const double step = 1e-6;
            for (int c = 0; c < 2; ++c) {
                double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]}, fp[2], fm[2];
                xp[c] += step;
                xm[c] -= step;
                G.multiply(g, xp, fp);
                G.multiply(g, xm, fm);
                for (int r = 0; r < 2; ++r)
                    J(r, c) = (fp[r] - fm[r]) / (2 * step);
            }
            const Eigen::MatrixXd pulled = J.transpose() * G.metric(gx) * J;
            CHECK((pulled - G.metric(x)).cwiseAbs().maxCoeff() < 1e-8);

            // Right differential against central differences of x -> x.g.
            Eigen::MatrixXd R(2, 2);
            for (int c = 0; c < 2; ++c) {
                double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]}, fp[2], fm[2];
                xp[c] += step;
                xm[c] -= step;
                G.multiply(xp, g, fp);
                G.multiply(xm, g, fm);
                for (int r = 0; r < 2; ++r)
                    R(r, c) = (fp[r] - fm[r]) / (2 * step);
            }
            CHECK((R - G.right_differential(g)).cwiseAbs().maxCoeff() < 1e-8);

            // Haar density of exp against the Jacobian determinant of exp times the volume density.
            Eigen::MatrixXd E(2, 2);
            for (int c = 0; c < 2; ++c) {
                double Zp[2] = {Z[0], Z[1]}, Zm[2] = {Z[0], Z[1]}, fp[2], fm[2];
                Zp[c] += step;
                Zm[c] -= step;
                G.exp(Zp, fp);
                G.exp(Zm, fm);
                for (int r = 0; r < 2; ++r)
                    E(r, c) = (fp[r] - fm[r]) / (2 * step);
            }
            CHECK(G.haar_density_exp(Z) == doctest::Approx(std::abs(E.determinant()) * G.volume_density(g)).epsilon(1e-8));

            // The flow of a left-invariant field is right multiplication by exp(tZ).
            double field[2], ahead[2], tz[2], et[2];
            G.left_invariant_field(Z, x, field);
            tz[0] = step * Z[0];
            tz[1] = step * Z[1];
            G.exp(tz, et);
            G.multiply(x, et, ahead);
            CHECK(std::abs((ahead[0] - x[0]) / step - field[0]) < 1e-5);
            CHECK(std::abs((ahead[1] - x[1]) / step - field[1]) < 1e-5);
        }
    }
    const auto H = GroupModel::affine_half_plane();
    const double off[2] = {0.0, -1.0};
    double Z[2];
    CHECK_THROWS_AS(H.log(off, Z), ModelError);
    CHECK_THROWS_AS(GroupModel::abelian(4), InputError);
}

TEST_CASE("kernel normalization")
{
    for (const auto& G : {GroupModel::abelian(2), GroupModel::affine_half_plane()}) {
        const Kernel K = Kernel::build(G);
        CHECK(std::abs(K.mass() - 1.0) < 1e-13);
        for (const auto& node : K.nodes())
            CHECK(node.weight > 0.0);

        // Independent oracle: integrate kappa in group coordinates against the volume density.
        const Rule1D ra = gauss_legendre(400, K.support_lo()[0], K.support_hi()[0]);
        const Rule1D rb = gauss_legendre(400, K.support_lo()[1], K.support_hi()[1]);
        double total = 0.0;
        for (std::size_t i = 0; i < ra.nodes.size(); ++i)
            for (std::size_t j = 0; j < rb.nodes.size(); ++j) {
                const double z[2] = {ra.nodes[i], rb.nodes[j]};
                total += ra.weights[i] * rb.weights[j] * K.value(z) * G.volume_density(z);
            }
        CHECK(std::abs(total - 1.0) < 1e-8);
        const double far[2] = {5.0, 5.0};
        CHECK(K.value(far) == 0.0);
    }
    const Kernel flat = Kernel::build(GroupModel::abelian(2));
    CHECK(flat.translation_bound() == doctest::Approx(1.0));
    CHECK(flat.jacobian_min() == doctest::Approx(1.0));

    // |dR_z| = ||[[1, a], [0, b]]|| / b peaks on the support boundary.
    const Kernel curved = Kernel::build(GroupModel::affine_half_plane());
    const double r = curved.spec().radius;
    const double corner[2] = {r, -r};
    double z[2];
    curved.group().exp(corner, z);
    const Eigen::MatrixXd D = curved.group().right_differential(z);
    const double at_corner = Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues()(0) / z[1];
    CHECK(curved.translation_bound() == doctest::Approx(at_corner).epsilon(1e-12));
    CHECK(curved.jacobian_min() == doctest::Approx(std::exp(-r)).epsilon(1e-12));
    CHECK(curved.jacobian_max() == doctest::Approx(std::exp(r)).epsilon(1e-12));

    CHECK_THROWS_AS(Kernel::build(GroupModel::abelian(1), {-1.0}), InputError);
}

TEST_CASE("convolution on the line")
{
    const GroupModel G = GroupModel::abelian(1);
    const Kernel K = Kernel::build(G);
    const Grid line({-2.0}, {2.0}, {81});

    const auto c = convolve(DiscreteForm::sample(line, 1, [](const double*, double* o) { o[0] = 2.5; }), K);
    CHECK(sup_norm(c.form, c.valid) == doctest::Approx(2.5).epsilon(1e-12));
    const auto lin = convolve(DiscreteForm::sample(line, 0, [](const double* x, double* o) { o[0] = x[0]; }), K);
    double err = 0.0, x[1];
    for (std::size_t p = 0; p < line.size(); ++p)
        if (lin.valid[p]) {
            line.point(p, x);
            err = std::max(err, std::abs(lin.form.comps[0][p] - x[0]));
        }
    CHECK(err < 1e-12);
    // Shrunken region: samples within the support radius of either end are dropped.
    CHECK(lin.valid_count == 81 - 2 * 5);

    const std::vector<double> lo{-1.0}, hi{1.0}, wide{1.9};
    CHECK(convolve(DiscreteForm::zero(line, 0), K, lo, hi).valid_count == 41);
    CHECK_THROWS_AS(convolve(DiscreteForm::zero(line, 0), K, lo, wide), RegionError);
    const Grid narrow({0.0}, {0.4}, {9});
    CHECK_THROWS_AS(convolve(DiscreteForm::zero(narrow, 0), K), RegionError);
}

TEST_CASE("pointwise convolution bound")
{
    const Kernel K = Kernel::build(GroupModel::affine_half_plane());
    const Grid grid = half_plane_grid(48);
    for (int k = 0; k <= 2; ++k) {
        const auto omega = DiscreteForm::sample(grid, k, [](const double* x, double* o) {
            o[0] = std::sin(3 * x[0]) * x[1] + 0.3;
            o[1] = std::cos(2 * x[0] * x[1]);
        });
        const auto r = pointwise_bound_check(omega, K);
        CHECK(r.violations == 0);
        CHECK(r.samples > 0);
        CHECK(r.max_ratio <= r.constant);
        CHECK(r.constant == doctest::Approx(std::pow(K.translation_bound(), k)));
        MESSAGE("k = " << k << ": max ratio " << r.max_ratio << ", C = " << r.constant);
    }
}

TEST_CASE("derivative commutes with convolution")
{
    const Kernel flat = Kernel::build(GroupModel::abelian(2));
    const auto constant = DiscreteForm::sample(flat_grid(32), 1, [](const double*, double* o) {
        o[0] = 1.5;
        o[1] = -0.5;
    });
    CHECK(derivative_commutation_check(constant, flat).residual <= 1e-8);

    auto poly = [](const double* x, double* o) {
        const double X = x[0], Y = x[1];
        o[0] = X * X * Y * Y * Y + 0.5 * X * X * X * X * Y - Y * Y * Y * Y * Y;
        o[1] = 0.0;
    };
    std::vector<double> flat_res, curved_res;
    const Kernel curved = Kernel::build(GroupModel::affine_half_plane());
    for (int m : {32, 64, 128}) {
        flat_res.push_back(derivative_commutation_check(DiscreteForm::sample(flat_grid(m), 1, poly), flat).residual);
        curved_res.push_back(
            derivative_commutation_check(DiscreteForm::sample(half_plane_grid(m), 1, poly), curved).residual);
    }
    MESSAGE("flat residuals " << flat_res[0] << " " << flat_res[1] << " " << flat_res[2]);
    MESSAGE("half-plane residuals " << curved_res[0] << " " << curved_res[1] << " " << curved_res[2]);
    CHECK(flat_res[2] <= 1e-2);
    CHECK(log2_ratio(flat_res[1], flat_res[2]) >= 1.9);
    CHECK(curved_res[2] <= 1e-2);
    CHECK(log2_ratio(curved_res[1], curved_res[2]) >= 1.9);

    // Closed input: d(omega * kappa) vanishes up to the same discretization error.
    const auto closed = DiscreteForm::sample(flat_grid(64), 1, [](const double* x, double* o) {
        o[0] = 2 * x[0] * x[1];
        o[1] = x[0] * x[0];
    });
    const auto conv = convolve(closed, flat);
    const auto mask = erode(closed.grid, conv.valid, 1);
    CHECK(sup_norm(exterior_derivative(conv.form), mask) < 1e-10);
}

TEST_CASE("flow homotopy on the line")
{
    const Kernel K = Kernel::build(GroupModel::abelian(1));
    const Grid line({-2.0}, {2.0}, {161});
    const auto dx = DiscreteForm::sample(line, 1, [](const double*, double* o) { o[0] = 1.0; });
    const auto h = flow_homotopy(dx, K);
    CHECK(sup_norm(h.form, h.valid) < 1e-13);

    // h(df) = f - f * kappa
    auto f = [](const double* x, double* o) { o[0] = std::sin(2 * x[0]) + x[0] * x[0]; };
    auto df = [](const double* x, double* o) { o[0] = 2 * std::cos(2 * x[0]) + 2 * x[0]; };
    const auto F = DiscreteForm::sample(line, 0, f);
    const auto hdf = flow_homotopy(DiscreteForm::sample(line, 1, df), K);
    const auto conv = convolve(F, K);
    double err = 0.0;
    for (std::size_t p = 0; p < line.size(); ++p)
        if (conv.valid[p])
            err = std::max(err, std::abs(hdf.form.comps[0][p] - (F.comps[0][p] - conv.form.comps[0][p])));
    CHECK(err < 1e-6);

    CHECK(sup_norm(flow_homotopy(DiscreteForm::zero(line, 1), K).form) == 0.0);
    CHECK_THROWS_AS(flow_homotopy(F, K), InputError);
}

TEST_CASE("Cartan identity")
{
    const Kernel flat = Kernel::build(GroupModel::abelian(2));
    const auto constant = DiscreteForm::sample(flat_grid(32), 1, [](const double*, double* o) {
        o[0] = 0.7;
        o[1] = -1.1;
    });
    CHECK(cartan_identity_check(constant, flat).residual <= 1e-8);

    // Exact form d(sin(2x) cos(y) + x^2 y).
    const auto exact = DiscreteForm::sample(flat_grid(64), 1, [](const double* x, double* o) {
        o[0] = 2 * std::cos(2 * x[0]) * std::cos(x[1]) + 2 * x[0] * x[1];
        o[1] = -std::sin(2 * x[0]) * std::sin(x[1]) + x[0] * x[0];
    });
    const YoungFunction phi = YoungFunction::power(2.0);
    CartanOptions opts;
    opts.phi = &phi;
    const auto r = cartan_identity_check(exact, flat, opts);
    MESSAGE("flat residual " << r.residual << ", |hd| " << r.sup_h_d << ", |dh| " << r.sup_d_h << ", h ratio "
                             << r.h_ratio << ", conv ratio " << r.conv_ratio << ", piecewise " << r.piecewise_ratio);
    CHECK(r.residual <= 1e-2);
    CHECK(r.sup_h_d < 1e-6); // closed input
    CHECK(r.sup_d_h > 1e-3);
    CHECK(std::isfinite(r.h_ratio));
    CHECK(r.conv_ratio <= 1.0 + 1e-6);

    const Kernel curved = Kernel::build(GroupModel::affine_half_plane());
    const auto compact = DiscreteForm::sample(half_plane_grid(96), 1, compact_one_form);
    const auto c = cartan_identity_check(compact, curved, opts);
    MESSAGE("half-plane residual " << c.residual << ", |omega| " << c.sup_omega << ", h ratio " << c.h_ratio
                                   << ", conv ratio " << c.conv_ratio << ", piecewise " << c.piecewise_ratio);
    CHECK(c.residual <= 2e-2);
    CHECK(c.sup_h_d > 1e-3);
    CHECK(std::isfinite(c.piecewise_ratio));
}

TEST_CASE("operator norm ratios")
{
    const YoungFunction phi = YoungFunction::log_damped(2.0, 2.0);
    const Kernel curved = Kernel::build(GroupModel::affine_half_plane());
    const auto r = operator_ratios(phi, curved, half_plane_grid(32), 1, 100, 11);
    CHECK(r.conv.size() == 100);
    CHECK(r.homotopy.size() == 100);
    CHECK(r.finite);
    MESSAGE("max ratios: conv " << r.conv_max << ", h " << r.homotopy_max << ", piecewise " << r.piecewise_max);
    CHECK(r.conv_max > 0.0);
    CHECK(r.homotopy_max > 0.0);
}

TEST_CASE("relative preservation on a horoball")
{
    const Kernel curved = Kernel::build(GroupModel::affine_half_plane());
    const Grid grid = half_plane_grid(96);
    const double c = 1.0;
    // Vanishes on y >= c and is smooth across it.
    const auto omega = DiscreteForm::sample(grid, 1, [&](const double* x, double* o) {
        const double s = x[1] < c ? std::pow(c - x[1], 4) : 0.0;
        o[0] = s * std::cos(x[0]);
        o[1] = s;
    });
    const auto r = relative_preservation(omega, curved, c);
    CHECK(r.samples > 0);
    CHECK(r.preserved);
    CHECK(r.shrunk > c);
    // Just below the shrunken boundary the outputs do feel omega.
    const auto conv = convolve(omega, curved);
    double below = 0.0, x[2];
    for (std::size_t p = 0; p < grid.size(); ++p) {
        grid.point(p, x);
        if (conv.valid[p] && x[1] < c)
            below = std::max(below, std::abs(conv.form.comps[1][p]));
    }
    CHECK(below > 0.0);
}
