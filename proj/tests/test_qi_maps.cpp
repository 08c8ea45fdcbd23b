#include <doctest.h>

#include <cmath>
#include <random>

#include "orlicz/qi.hpp"

using namespace orlicz;

namespace {

std::vector<int> circle_map(int from, int to)
{
    std::vector<int> m(from);
    for (int i = 0; i < from; ++i)
        m[i] = static_cast<int>(std::lround(static_cast<double>(to) * i / from)) % to;
    return m;
}

BoundaryPointModel full_ray(int n)
{
    BoundaryPointModel xi;
    xi.base = 0;
    for (int i = 0; i < n; ++i)
        xi.ray.push_back(i);
    return xi;
}

} // namespace

TEST_CASE("explicit circle maps")
{
    CHECK(circle_map(6, 10) == std::vector<int>{0, 2, 3, 5, 7, 8});
    CHECK(circle_map(10, 6) == std::vector<int>{0, 1, 1, 2, 2, 3, 4, 4, 5, 5});
}

TEST_CASE("chain map of the identity and a rotation")
{
    const auto c6 = complexes::cycle(6);
    const auto id = build_chain_map(c6, c6, {0, 1, 2, 3, 4, 5}, 1);
    for (int k = 0; k <= 1; ++k) {
        CHECK(id.sup_bound[k] == 1);
        CHECK(id.length_bound[k] == 1);
        for (std::size_t i = 0; i < c6.count(k); ++i)
            CHECK(id(k, i) == identity_chain_map(c6, 1)(k, i));
    }

    const auto rot = build_chain_map(c6, c6, {1, 2, 3, 4, 5, 0}, 1);
    CHECK(chain_map_defects(c6, c6, rot) == 0);
    for (std::size_t i = 0; i < c6.count(1); ++i) {
        const auto& e = c6.simplex(1, i);
        const Simplex target{std::min((e[0] + 1) % 6, (e[1] + 1) % 6), std::max((e[0] + 1) % 6, (e[1] + 1) % 6)};
        const auto& img = rot(1, i);
        REQUIRE(img.length() == 1);
        CHECK(img.coeffs.begin()->first == *c6.find(target));
        CHECK(std::abs(img.coeffs.begin()->second) == 1);
    }
}

TEST_CASE("doubling map C6 -> C12")
{
    const auto c6 = complexes::cycle(6);
    const auto c12 = complexes::cycle(12);
    const std::vector<int> f{0, 2, 4, 6, 8, 10};
    const auto c = build_chain_map(c6, c12, f, 1);
    CHECK(chain_map_defects(c6, c12, c) == 0);
    CHECK(c.length_bound[1] == 2);
    CHECK(c.sup_bound[1] == 1);
    CHECK(c.multiplicity[1] == 1);

    // indicator of the Y-edge [3,4] pulls back to the indicator of [1,2]
    Cochain theta = Cochain::zero(c12, 1);
    theta.values[*c12.find({3, 4})] = 1.0;
    const auto pulled = pullback(c6, c, theta);
    for (std::size_t i = 0; i < c6.count(1); ++i)
        CHECK(pulled.values[i] == (c6.simplex(1, i) == Simplex{1, 2} ? 1.0 : 0.0));

    CHECK(pullback(c6, c, Cochain::zero(c12, 1)).values == std::vector<double>(6, 0.0));
}

TEST_CASE("pullback commutes with delta exactly")
{
    const auto X = complexes::torus_grid(3, 3);
    const auto Y = complexes::torus_grid(6, 3);
    std::vector<int> f(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            f[i * 3 + j] = (2 * i) * 3 + j;
    const auto c = build_chain_map(X, Y, f, 2);
    CHECK(chain_map_defects(X, Y, c) == 0);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long long> ints(-100, 100);
    for (int k = 0; k < 2; ++k) {
        for (int t = 0; t < 50; ++t) {
            std::vector<long long> theta(Y.count(k));
            for (auto& v : theta)
                v = ints(rng);
            const auto lhs = coboundary_values<long long>(X, k, pullback_exact(X, c, k, theta));
            const auto rhs = pullback_exact(X, c, k + 1, coboundary_values<long long>(Y, k, theta));
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("prism homotopy between identity and rotation")
{
    const auto c6 = complexes::cycle(6);
    const auto id = identity_chain_map(c6, 1);
    const auto rot = build_chain_map(c6, c6, {1, 2, 3, 4, 5, 0}, 1);
    const auto h = prism_homotopy(c6, c6, id, rot);
    CHECK(prism_defects(c6, c6, id, rot, h) == 0);
    for (int v = 0; v < 6; ++v) {
        const auto& hv = h.chains[0][v];
        REQUIRE(hv.length() == 1);
        const Simplex edge{std::min(v, (v + 1) % 6), std::max(v, (v + 1) % 6)};
        CHECK(hv.coeffs.begin()->first == *c6.find(edge));
        // boundary h(v) = v - (v + 1)
        auto b = boundary(c6, hv);
        CHECK(b.coeffs.at(static_cast<std::size_t>(v)) == 1);
        CHECK(b.coeffs.at(static_cast<std::size_t>((v + 1) % 6)) == -1);
    }
    const auto zero = prism_homotopy(c6, c6, id, id);
    for (const auto& level : zero.chains)
        for (const auto& ch : level)
            CHECK(ch.empty());
}

TEST_CASE("random prism pairs on a triangulated disk")
{
    const auto D = complexes::disk_grid(3, 3);
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> g(D.vertex_count());
        for (std::size_t v = 0; v < g.size(); ++v) {
            const auto& nb = D.adjacency()[v];
            std::uniform_int_distribution<std::size_t> pick(0, nb.size());
            const std::size_t p = pick(rng);
            g[v] = p == nb.size() ? static_cast<int>(v) : nb[p];
        }
        std::vector<int> f(D.vertex_count());
        for (std::size_t v = 0; v < f.size(); ++v)
            f[v] = static_cast<int>(v);
        const auto cf = build_chain_map(D, D, f, 2);
        const auto cg = build_chain_map(D, D, g, 2);
        CHECK(chain_map_defects(D, D, cg) == 0);
        const auto h = prism_homotopy(D, D, cf, cg);
        CHECK(prism_defects(D, D, cf, cg, h) == 0);
    }
}

TEST_CASE("fill budget errors")
{
    const auto c6 = complexes::cycle(6);
    ChainValue loop;
    loop.degree = 1;
    // fundamental cycle of C6 bounds nothing
    for (std::size_t i = 0; i < c6.count(1); ++i) {
        const auto& e = c6.simplex(1, i);
        loop.add(i, e == Simplex{0, 5} ? -1 : 1);
    }
    CHECK(boundary(c6, loop).empty());
    CHECK_THROWS_AS(fill_cycle(c6, loop), BudgetError);

    const auto t = complexes::torus_grid(3, 3);
    // a non-contractible loop on the torus: i -> (i, 0)
    const auto ring = build_chain_map(c6, t, {0, 3, 6, 0, 3, 6}, 1);
    ChainValue z;
    z.degree = 1;
    for (std::size_t i = 0; i < c6.count(1); ++i)
        z.add(ring(1, i), loop.coeffs.at(i));
    CHECK_FALSE(z.empty());
    CHECK_THROWS_AS(fill_cycle(t, z, {2, PathRule::SmallestNeighbor}), BudgetError);
}

TEST_CASE("C6 versus C10")
{
    const auto c6 = complexes::cycle(6);
    const auto c10 = complexes::cycle(10);
    QuasiIsometry F{circle_map(6, 10), circle_map(10, 6)};
    const auto r = check_qi_isomorphism(c6, c10, F, 1);
    CHECK(r.chain_defects == 0);
    CHECK(r.prism_defects == 0);
    CHECK(r.homotopy_defects == 0);
    REQUIRE(r.forward.size() == 2);
    for (int k = 0; k <= 1; ++k) {
        REQUIRE(r.forward[k].rows() == 1);
        REQUIRE(r.forward[k].cols() == 1);
        CHECK((r.forward[k] * r.backward[k])(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK((r.backward[k] * r.forward[k])(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    }
    // unit harmonic forms: constants in degree 0, the unit-speed winding form in degree 1
    CHECK(std::abs(r.forward[0](0, 0)) == doctest::Approx(std::sqrt(6.0 / 10.0)).epsilon(1e-12));
    CHECK(std::abs(r.forward[1](0, 0)) == doctest::Approx(std::sqrt(10.0 / 6.0)).epsilon(1e-12));
    CHECK(r.ok(1e-9));
    CHECK(r.forward_constants.lambda >= 1.0);
    CHECK(r.forward_constants.density <= 1);
}

TEST_CASE("identity induces identity on cohomology")
{
    const auto t7 = complexes::torus7();
    const auto id = build_chain_map(t7, t7, {0, 1, 2, 3, 4, 5, 6}, 2);
    for (int k = 0; k <= 2; ++k) {
        const auto m = induced_cohomology_matrix(t7, t7, id, k);
        CHECK((m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("induced map does not depend on the chain map")
{
    const auto X = complexes::torus_grid(3, 3);
    const auto Y = complexes::torus_grid(6, 3);
    std::vector<int> f(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            f[i * 3 + j] = (2 * i) * 3 + j;
    const auto a = build_chain_map(X, Y, f, 2, {8, PathRule::SmallestNeighbor});
    const auto b = build_chain_map(X, Y, f, 2, {8, PathRule::LargestNeighbor});
    bool differ = false;
    for (std::size_t i = 0; i < X.count(1); ++i)
        differ = differ || !(a(1, i) == b(1, i));
    CHECK(differ);
    const auto h = prism_homotopy(X, Y, a, b);
    CHECK(prism_defects(X, Y, a, b, h) == 0);
    for (int k = 0; k <= 2; ++k) {
        const auto ma = induced_cohomology_matrix(X, Y, a, k);
        const auto mb = induced_cohomology_matrix(X, Y, b, k);
        CHECK((ma - mb).cwiseAbs().maxCoeff() <= 1e-10);
    }
    // exact: the pullbacks of an integer cocycle differ by delta H theta
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<long long> ints(-20, 20);
    for (int t = 0; t < 20; ++t) {
        std::vector<long long> eta(Y.count(0));
        for (auto& v : eta)
            v = ints(rng);
        auto theta = coboundary_values<long long>(Y, 0, eta);
        const auto pa = pullback_exact(X, a, 1, theta);
        const auto pb = pullback_exact(X, b, 1, theta);
        const auto dh = coboundary_values<long long>(X, 0, homotopy_operator(X, h, 1, theta));
        for (std::size_t i = 0; i < pa.size(); ++i)
            CHECK(pa[i] - pb[i] == dh[i]);
    }
}

TEST_CASE("pullback norm bound")
{
    const auto c6 = complexes::cycle(6);
    const auto c10 = complexes::cycle(10);
    const auto c = build_chain_map(c6, c10, circle_map(6, 10), 1);
    for (const auto& phi : {YoungFunction::power(1.5), YoungFunction::power(2.0), YoungFunction::log_damped(2, 2)}) {
        for (int k = 0; k <= 1; ++k) {
            const auto r = pullback_norm_report(phi, c6, c10, c, k, 1000, 9);
            CHECK(r.violations == 0);
            CHECK(r.worst_ratio <= r.constant);
        }
    }
}

TEST_CASE("relative preservation on a ray")
{
    const auto X = complexes::path(100);
    const auto Y = complexes::path(199);
    std::vector<int> f(100);
    for (int i = 0; i < 100; ++i)
        f[i] = 2 * i;
    std::vector<int> g(199);
    for (int j = 0; j < 199; ++j)
        g[j] = j / 2;
    const auto cf = build_chain_map(X, Y, f, 1);
    const auto cg = build_chain_map(Y, X, g, 1);
    const auto xi_x = full_ray(100);
    const auto xi_y = full_ray(199);

    const auto s = pulled_back_threshold(X, Y, cf, xi_x, xi_y, 100.0);
    // vertex i goes to 2i, inside the Y-mask exactly when i >= 51
    CHECK(s.t_x == 50.0);
    CHECK(s.shift == -50.0);
    CHECK(s.t_x - s.t_y <= cf.hausdorff[1]);

    const auto mask_x = relative_mask(X, xi_x, s.t_x);
    const auto mask_y = relative_mask(Y, xi_y, 100.0);
    // every indicator outside the Y-mask pulls back to a cochain vanishing on the X-mask
    for (int k = 0; k <= 1; ++k) {
        for (std::size_t tau = 0; tau < Y.count(k); ++tau) {
            if (mask_y.contains(k, tau))
                continue;
            Cochain ind = Cochain::zero(Y, k);
            ind.values[tau] = 1.0;
            CHECK(vanishes_on(pullback(X, cf, ind), mask_x));
        }
    }
    // and for the quasi-inverse
    const auto back = pulled_back_threshold(Y, X, cg, xi_y, xi_x, s.t_x);
    const auto mask_back = relative_mask(Y, xi_y, back.t_x);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 50; ++trial) {
        Cochain theta = Cochain::zero(X, 1);
        for (std::size_t i = 0; i < X.count(1); ++i)
            if (!mask_x.contains(1, i))
                theta.values[i] = n01(rng);
        // every 1-cochain on a graph is a cocycle; relative ones stay relative
        CHECK(vanishes_on(pullback(Y, cg, theta), mask_back));
    }
}

TEST_CASE("measured QI constants")
{
    const auto c6 = complexes::cycle(6);
    const auto c12 = complexes::cycle(12);
    const auto q = measure_qi(c6, c12, {0, 2, 4, 6, 8, 10});
    CHECK(q.lambda == 2.0);
    CHECK(q.epsilon == 0.0);
    CHECK(q.density == 1);
    const auto inv = nearest_preimage(c6, c12, {0, 2, 4, 6, 8, 10});
    CHECK(inv[3] == 1);
    CHECK(inv[4] == 2);
    CHECK(map_distance(c12, {0, 2, 4, 6, 8, 10}, {1, 3, 5, 7, 9, 11}) == 1);
}
