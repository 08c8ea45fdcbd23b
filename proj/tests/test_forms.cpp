#include <doctest.h>

#include <cmath>
#include <random>

#include "orlicz/bourdon.hpp"
#include "orlicz/forms.hpp"
#include "orlicz/luxemburg.hpp"

using namespace orlicz;

namespace {

Grid square(int points, double lo = -1.0, double hi = 1.0) { return Grid({lo, lo}, {hi, hi}, {points, points}); }

/// Random cubic polynomial in two variables.
struct Cubic {
    double c[10];
    explicit Cubic(std::mt19937_64& rng)
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (double& v : c)
            v = u(rng);
    }
    double operator()(double x, double y) const
    {
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y + c[6] * x * x * x +
               c[7] * x * x * y + c[8] * x * y * y + c[9] * y * y * y;
    }
    double dx(double x, double y) const
    {
        return c[1] + 2 * c[3] * x + c[4] * y + 3 * c[6] * x * x + 2 * c[7] * x * y + c[8] * y * y;
    }
    double dy(double x, double y) const
    {
        return c[2] + c[4] * x + 2 * c[5] * y + c[7] * x * x + 2 * c[8] * x * y + 3 * c[9] * y * y;
    }
};

} // namespace

TEST_CASE("multi-index ordering")
{
    const auto& two = multi_indices(3, 2);
    REQUIRE(two.size() == 3);
    CHECK(two[0] == std::vector<int>{0, 1});
    CHECK(two[1] == std::vector<int>{0, 2});
    CHECK(two[2] == std::vector<int>{1, 2});
    CHECK(multi_index_position(3, {0, 2}) == 1);
    CHECK(multi_index_position(3, {2, 0}) == -1);
    CHECK(multi_indices(2, 0).size() == 1);
    CHECK(multi_indices(2, 3).empty());
}

TEST_CASE("Gauss-Legendre exactness")
{
    for (int n : {1, 4, 8, 32}) {
        const Rule1D r = gauss_legendre(n, 0.0, 1.0);
        double s = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            s += r.weights[i] * std::pow(r.nodes[i], 2 * n - 1);
        CHECK(s == doctest::Approx(1.0 / (2 * n)).epsilon(1e-13));
    }
    const PointRule disk = ball_rule({0.0, 0.0}, 0.5, 8, 16);
    CHECK(disk.total_weight() == doctest::Approx(M_PI * 0.25).epsilon(1e-13));
    double second = 0.0;
    for (std::size_t i = 0; i < disk.size(); ++i)
        second += disk.weights[i] * disk.point(i)[0] * disk.point(i)[0];
    CHECK(second == doctest::Approx(M_PI * std::pow(0.5, 4) / 4).epsilon(1e-12));
}

TEST_CASE("exterior derivative sign conventions")
{
    const Grid g = square(16);
    const auto xdy = DiscreteForm::sample(g, 1, [](const double* x, double* o) {
        o[0] = 0.0;
        o[1] = x[0];
    });
    const auto ydx = DiscreteForm::sample(g, 1, [](const double* x, double* o) {
        o[0] = x[1];
        o[1] = 0.0;
    });
    const auto a = exterior_derivative(xdy);
    const auto b = exterior_derivative(ydx);
    REQUIRE(a.degree == 2);
    for (std::size_t p = 0; p < g.size(); ++p) {
        CHECK(a.comps[0][p] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b.comps[0][p] == doctest::Approx(-1.0).epsilon(1e-12));
    }
    const auto top = exterior_derivative(a);
    CHECK(top.degree == 3);
    CHECK(top.components() == 0);
}

TEST_CASE("d squared vanishes at second order")
{
    auto residual = [](int points) {
        const Grid g = square(points, 0.0, 1.0);
        // df sampled exactly; d applied by finite differences
        const auto df = DiscreteForm::sample(g, 1, [](const double* x, double* o) {
            o[0] = std::cos(3 * x[0]) * std::exp(x[1]);
            o[1] = std::sin(3 * x[0]) * std::exp(x[1]) / 3.0;
        });
        return sup_norm(exterior_derivative(df));
    };
    const double e16 = residual(17), e32 = residual(33), e64 = residual(65);
    const double slope = std::log2(e16 / e32);
    const double slope2 = std::log2(e32 / e64);
    CHECK(slope >= 1.9);
    CHECK(slope2 >= 1.9);

    // 3D: d of an exactly sampled closed 1-form
    const Grid g3({0, 0, 0}, {1, 1, 1}, {24, 24, 24});
    const auto w = DiscreteForm::sample(g3, 1, [](const double* x, double* o) {
        o[0] = x[1] * x[2];
        o[1] = x[0] * x[2];
        o[2] = x[0] * x[1];
    });
    CHECK(sup_norm(exterior_derivative(w)) < 1e-12);
    const auto v = DiscreteForm::sample(g3, 2, [](const double* x, double* o) {
        o[0] = x[2];
        o[1] = 0.0;
        o[2] = 0.0;
    });
    const auto dv = exterior_derivative(v);
    REQUIRE(dv.components() == 1);
    CHECK(dv.comps[0][100] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pointwise norms")
{
    const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
    const double three_dx[2] = {3.0, 0.0};
    CHECK(pointwise_norm(three_dx, 1, 2, I2) == doctest::Approx(3.0).epsilon(1e-14));
    const double area[1] = {1.0};
    CHECK(pointwise_norm(area, 2, 2, I2) == doctest::Approx(1.0).epsilon(1e-14));
    const double f[1] = {-2.5};
    CHECK(pointwise_norm(f, 0, 2, I2) == 2.5);

    const auto hp = ChartedDomain::half_plane(-1, 1, 1, 3, 8);
    const double at[2] = {0.0, 2.0};
    const double dx[2] = {1.0, 0.0};
    CHECK(pointwise_norm(dx, 1, 2, hp.metric_at(at)) == doctest::Approx(2.0).epsilon(1e-14));

    // dual-metric formula for 1-forms
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Random(3, 3);
        const Eigen::MatrixXd g = A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(3, 3);
        Eigen::Vector3d w(gauss(rng), gauss(rng), gauss(rng));
        const double exact = std::sqrt(w.dot(g.inverse() * w));
        CHECK(std::abs(pointwise_norm(w.data(), 1, 3, g) - exact) <= 1e-10 * std::max(1.0, exact));
        // half-plane metric y^-2 I: |w|_g = y |w|
        const double y = 0.5 + trial * 0.1;
        const Eigen::MatrixXd gh = Eigen::MatrixXd::Identity(2, 2) / (y * y);
        CHECK(pointwise_norm(w.data(), 1, 2, gh) == doctest::Approx(y * w.head<2>().norm()).epsilon(1e-12));
    }

    // 2-forms in R^3 under the flat metric: sup over orthonormal pairs is the Euclidean length
    for (int trial = 0; trial < 10; ++trial) {
        const double w[3] = {gauss(rng), gauss(rng), gauss(rng)};
        const double exact = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
        const double sampled = pointwise_norm(w, 2, 3, Eigen::MatrixXd::Identity(3, 3), 2000, trial + 1);
        CHECK(sampled <= exact * (1 + 1e-12));
        CHECK(sampled >= exact * (1 - 1e-8));
    }
}

TEST_CASE("form norms")
{
    const auto dom = ChartedDomain::box({0.0, 0.0}, {1.0, 1.0}, 33);
    const auto phi2 = YoungFunction::power(2.0);
    const auto zero = DiscreteForm::zero(dom.grid, 1);
    CHECK(form_norm(phi2, zero, dom) == 0.0);

    const auto dx = DiscreteForm::sample(dom.grid, 1, [](const double*, double* o) {
        o[0] = 1.0;
        o[1] = 0.0;
    });
    CHECK(form_norm(phi2, dx, dom) == doctest::Approx(1.0).epsilon(1e-9));

    // g = 4 delta: |dx|_g = 1/2 and dV = 4 dA, so 4 (1 / (2 gamma))^p = 1
    ChartedDomain scaled = dom;
    scaled.metric = [](const double*) { return Eigen::MatrixXd(4.0 * Eigen::MatrixXd::Identity(2, 2)); };
    CHECK(form_norm(phi2, dx, scaled) == doctest::Approx(1.0).epsilon(1e-9));
    const auto phi3 = YoungFunction::power(3.0);
    CHECK(form_norm(phi3, dx, scaled) == doctest::Approx(0.5 * std::cbrt(4.0)).epsilon(1e-9));

    // unit ball volume weights integrate to about pi
    const auto ball = ChartedDomain::unit_ball(2, 129);
    double vol = 0.0;
    for (double w : ball.volume_weights())
        vol += w;
    CHECK(vol == doctest::Approx(M_PI).epsilon(2e-2));
}

TEST_CASE("cone homotopy closed forms")
{
    const auto dom = ChartedDomain::unit_ball(2, 64);
    const std::vector<double> origin = {0.0, 0.0};
    const auto dx = DiscreteForm::sample(dom.grid, 1, [](const double*, double* o) {
        o[0] = 1.0;
        o[1] = 0.0;
    });
    const auto chi = cone_homotopy(dx, dom, origin);
    REQUIRE(chi.degree == 0);
    double x[2];
    double worst = 0.0;
    for (std::size_t p = 0; p < dom.grid.size(); ++p) {
        dom.grid.point(p, x);
        worst = std::max(worst, std::abs(chi.comps[0][p] - x[0]));
    }
    CHECK(worst < 1e-12);

    const auto area = DiscreteForm::sample(dom.grid, 2, [](const double*, double* o) { o[0] = 1.0; });
    const auto chi2 = cone_homotopy(area, dom, origin);
    REQUIRE(chi2.degree == 1);
    worst = 0.0;
    for (std::size_t p = 0; p < dom.grid.size(); ++p) {
        dom.grid.point(p, x);
        worst = std::max(worst, std::abs(chi2.comps[0][p] + 0.5 * x[1]));
        worst = std::max(worst, std::abs(chi2.comps[1][p] - 0.5 * x[0]));
    }
    CHECK(worst < 1e-12);

    const std::vector<double> outside = {0.9, 0.9};
    CHECK_THROWS_AS(cone_homotopy(dx, dom, outside), InputError);
    CHECK_THROWS_AS(cone_homotopy(DiscreteForm::zero(dom.grid, 0), origin), InputError);
}

TEST_CASE("cone homotopy of an exact form")
{
    const auto dom = ChartedDomain::unit_ball(2, 64);
    auto f = [](double x, double y) { return std::sin(2 * x) * std::cos(y) + x * y * y; };
    const auto df = DiscreteForm::sample(dom.grid, 1, [](const double* p, double* o) {
        o[0] = 2 * std::cos(2 * p[0]) * std::cos(p[1]) + p[1] * p[1];
        o[1] = -std::sin(2 * p[0]) * std::sin(p[1]) + 2 * p[0] * p[1];
    });
    const std::vector<double> x0 = {0.2, -0.3};
    const auto chi = cone_homotopy(df, dom, x0);
    double worst = 0.0;
    double y[2];
    for (std::size_t p = 0; p < dom.grid.size(); ++p) {
        if (!dom.active[p])
            continue;
        dom.grid.point(p, y);
        worst = std::max(worst, std::abs(chi.comps[0][p] - (f(y[0], y[1]) - f(x0[0], x0[1]))));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("Poincare homotopy")
{
    const auto dom = ChartedDomain::unit_ball(2, 64);
    const auto body = AveragingBody::unit_ball(2);

    const auto dx = DiscreteForm::sample(dom.grid, 1, [](const double*, double* o) {
        o[0] = 1.0;
        o[1] = 0.0;
    });
    const auto h = poincare_homotopy(dx, body);
    double y[2];
    double worst = 0.0;
    for (std::size_t p = 0; p < dom.grid.size(); ++p) {
        dom.grid.point(p, y);
        worst = std::max(worst, std::abs(h.comps[0][p] - y[0]));
    }
    CHECK(worst < 1e-12);

    CHECK(sup_norm(poincare_homotopy(DiscreteForm::zero(dom.grid, 1), body)) == 0.0);
    CHECK(sup_norm(poincare_homotopy(DiscreteForm::zero(dom.grid, 2), body)) == 0.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 1; ++trial) {
        const Cubic a(rng), b(rng), c(rng);
        const auto one = DiscreteForm::sample(dom.grid, 1, [&](const double* p, double* o) {
            o[0] = a(p[0], p[1]);
            o[1] = b(p[0], p[1]);
        });
        const auto two = DiscreteForm::sample(dom.grid, 2, [&](const double* p, double* o) { o[0] = c(p[0], p[1]); });
        CHECK(homotopy_residual(one, body, dom.active) <= 1e-2);
        CHECK(homotopy_residual(two, body, dom.active) <= 1e-2);
        const auto fn = DiscreteForm::sample(dom.grid, 0, [&](const double* p, double* o) { o[0] = a(p[0], p[1]); });
        CHECK(homotopy_residual(fn, body, dom.active) <= 1e-2);
    }

    // box body gives the same identity on a square chart
    const auto sq = ChartedDomain::box({-1, -1}, {1, 1}, 48);
    const auto box = AveragingBody::box({-1, -1}, {1, 1});
    const Cubic a(rng), b(rng);
    const auto one = DiscreteForm::sample(sq.grid, 1, [&](const double* p, double* o) {
        o[0] = a(p[0], p[1]);
        o[1] = b(p[0], p[1]);
    });
    CHECK(homotopy_residual(one, box, sq.active) <= 1e-2);

    // exact forms: dh(df) = df
    const auto df = DiscreteForm::sample(dom.grid, 1, [&](const double* p, double* o) {
        o[0] = a.dx(p[0], p[1]);
        o[1] = a.dy(p[0], p[1]);
    });
    auto r = exterior_derivative(poincare_homotopy(df, body));
    r -= df;
    CHECK(sup_norm(r, dom.active) <= 1e-2);
}

TEST_CASE("chart pullback")
{
    const auto phi = YoungFunction::power(2.0);
    const auto dom = ChartedDomain::box({0, 0}, {1, 1}, 17);
    std::mt19937_64 rng(3);
    const Cubic a(rng), b(rng);
    const FormFunction omega = [&](const double* x, double* o) {
        o[0] = a(x[0], x[1]);
        o[1] = b(x[0], x[1]);
    };

    ChartMap id;
    id.map = [](const double* x, double* fx) {
        fx[0] = x[0];
        fx[1] = x[1];
    };
    const auto same = chart_pullback(phi, id, omega, 1, dom);
    CHECK(same.ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(same.lipschitz == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(same.holds);

    const auto line = ChartedDomain::box({0.0}, {1.0}, 9);
    ChartMap dilation;
    dilation.map = [](const double* x, double* fx) { fx[0] = 2.0 * x[0]; };
    dilation.jacobian = [](const double*, double* j) { j[0] = 2.0; };
    const auto pulled = pullback_form(dilation, [](const double*, double* o) { o[0] = 1.0; }, 1, line.grid);
    for (double v : pulled.comps[0])
        CHECK(v == 2.0);

    ChartMap shear;
    shear.map = [](const double* x, double* fx) {
        fx[0] = x[0] + 0.5 * x[1];
        fx[1] = x[1];
    };
    shear.jacobian = [](const double*, double* j) {
        j[0] = 1.0;
        j[1] = 0.5;
        j[2] = 0.0;
        j[3] = 1.0;
    };
    for (int k = 0; k <= 2; ++k) {
        const FormFunction w = [&](const double* x, double* o) {
            o[0] = a(x[0], x[1]);
            if (k == 1)
                o[1] = b(x[0], x[1]);
        };
        const auto rep = chart_pullback(phi, shear, w, k, dom);
        // power phi: ||omega||_{L^n phi} = L^{n/p} ||omega||_phi
        CHECK(rep.constant == doctest::Approx(std::pow(rep.lipschitz, k + 1.0)).epsilon(1e-8));
        CHECK(rep.holds);
        CHECK(rep.ratio <= std::pow(rep.lipschitz, k + 1.0) * (1 + 1e-8));
    }

    ChartMap collapse;
    collapse.map = [](const double* x, double* fx) {
        fx[0] = x[0];
        fx[1] = x[0];
    };
    CHECK_THROWS_AS(chart_pullback(phi, collapse, omega, 1, dom), InputError);
}

TEST_CASE("Bourdon example")
{
    BourdonOptions small;
    small.pieces = 2000;
    small.cauchy_start = 1000;
    const auto r = bourdon_example(2.0, 2.0, 100, 0.05, small);
    CHECK(r.phi_one == doctest::Approx(0.5798256865725354).epsilon(1e-14));
    CHECK(r.harmonic == doctest::Approx(5.187377517639621).epsilon(1e-13));
    CHECK(r.truncated_modular == doctest::Approx(r.harmonic * r.phi_one).epsilon(1e-12));
    CHECK(r.truncated_modular == doctest::Approx(3.01).epsilon(2e-3));
    CHECK(r.divergent_global);
    CHECK(r.exceeds_from_threshold);
    CHECK(r.log_growth);
    CHECK(r.finite_piecewise);
    CHECK(r.worst_piece_ratio < 1.0);
    CHECK(r.mollified_ok);
    // modular at N = 2 is 1.5 phi(1) < 1; from N = 3 on it exceeds 1
    CHECK(r.modular_series[1].second < 1.0);
    CHECK(r.modular_series[2].second > 1.0);

    const auto full = bourdon_example(2.0, 2.0, 1000000);
    CHECK(full.ok());
    CHECK(full.max_increment_after < 1e-6);
    CHECK(full.tail_relative_error < 0.1);
    CHECK(full.tail_bound > 0.0);

    CHECK_THROWS_AS(bourdon_example(2.0, 2.0, 10, 0.25), InputError);
    CHECK_THROWS_AS(bourdon_example(2.0, 1.0, 10), PreconditionError);
}
