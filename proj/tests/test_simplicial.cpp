#include <doctest.h>

#include <cmath>
#include <random>

#include "orlicz/luxemburg.hpp"
#include "orlicz/simplicial.hpp"

using namespace orlicz;

TEST_CASE("generators")
{
    const auto c6 = complexes::cycle(6);
    CHECK(c6.count(0) == 6);
    CHECK(c6.count(1) == 6);
    CHECK(c6.count(2) == 0);
    CHECK(c6.dim() == 1);

    const auto tri = complexes::filled_triangle();
    CHECK(tri.count(0) == 3);
    CHECK(tri.count(1) == 3);
    CHECK(tri.count(2) == 1);

    const auto t7 = complexes::torus7();
    CHECK(t7.count(0) == 7);
    CHECK(t7.count(1) == 21);
    CHECK(t7.count(2) == 14);
    CHECK(t7.euler_characteristic() == 0);
    // every edge of a closed surface lies on exactly two triangles
    CHECK(t7.max_cofaces(1) == 2);

    CHECK(complexes::torus_grid(4, 5).euler_characteristic() == 0);
    CHECK(complexes::disk_grid(3, 4).euler_characteristic() == 1);
}

TEST_CASE("construction errors")
{
    CHECK_THROWS_AS(SimplicialComplex::from_levels({{{0}, {1}}, {{0, 1}, {1, 2}}}), ConstructionError);
    CHECK_THROWS_AS(SimplicialComplex::from_levels({{{0}, {1}, {2}}, {{0, 1}}, {{0, 1, 2}}}), ConstructionError);
    CHECK_THROWS_AS(SimplicialComplex::from_maximal({{0, 0, 1}}), ConstructionError);
    CHECK_NOTHROW(SimplicialComplex::from_levels({{{0}, {1}, {2}}, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}}}));
}

TEST_CASE("coboundary examples")
{
    const auto p = complexes::path(3);
    const auto d = coboundary(p, Cochain{0, {1, 2, 4}});
    CHECK(d.degree == 1);
    CHECK(d.values == std::vector<double>{1, 2});

    const auto c = complexes::cycle(8);
    const auto dc = coboundary(c, Cochain{0, std::vector<double>(8, 3.5)});
    for (double v : dc.values)
        CHECK(v == 0.0);

    CHECK_THROWS_AS(coboundary(c, Cochain{2, {}}), InputError);
    CHECK(coboundary(c, Cochain::zero(c, 1)).values.empty());
}

TEST_CASE("delta squared vanishes exactly")
{
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<long long> ints(-1000000, 1000000);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto X = complexes::random_bounded(30, 6, seed);
        for (int k = 0; k + 2 <= X.dim(); ++k) {
            std::vector<long long> z(X.count(k));
            for (auto& v : z)
                v = ints(rng);
            const auto dz = coboundary_values<long long>(X, k, z);
            for (long long v : coboundary_values<long long>(X, k + 1, dz))
                CHECK(v == 0);
        }
    }
}

TEST_CASE("cochain_norm")
{
    const auto sq = YoungFunction::power(2.0);
    CHECK(cochain_norm(sq, Cochain{1, {3, 4}}) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(cochain_norm(sq, Cochain{1, {0, 0, 0}}) == 0.0);
    const auto ld = YoungFunction::log_damped(2, 2);
    const std::vector<double> one{1.0};
    CHECK(cochain_norm(ld, Cochain{0, {1.0}}) ==
          doctest::Approx(luxemburg_norm(ld, one, MeasureSpace::counting(1)).value).epsilon(1e-12));
}

TEST_CASE("oriented cochains")
{
    std::vector<int> t{2, 0, 1};
    CHECK(permutation_sign(t) == 1);
    std::vector<int> u{1, 0, 2};
    CHECK(permutation_sign(u) == -1);
    std::vector<int> rep{1, 1};
    CHECK(permutation_sign(rep) == 0);

    const auto c4 = complexes::cycle(4);
    const auto theta = Cochain::from_oriented(c4, 1, {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}, {{3, 0}, 1}});
    // edges are stored as [0,1], [0,3], [1,2], [2,3]
    CHECK(theta.values == std::vector<double>{1, -1, 1, 1});
}

TEST_CASE("continuity report")
{
    const auto sq = YoungFunction::power(2.0);
    const auto c6 = complexes::cycle(6);
    const auto r = delta_continuity_report(sq, c6, 0, 400, 42);
    // operator norm of delta_0 on C_6 from a dense SVD
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c6.coboundary_matrix(0));
    const double opnorm = svd.singularValues()(0);
    CHECK(opnorm == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.n1 == 2);
    CHECK(r.constant == 2.0);
    CHECK(r.worst_ratio <= opnorm * (1 + 1e-9));
    CHECK(r.holds());

    for (const auto& phi : {YoungFunction::power(1.5), YoungFunction::power(3.0), YoungFunction::log_damped(2, 2)}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto X = complexes::random_bounded(24, 5, seed);
            for (int k = 0; k < X.dim(); ++k) {
                const auto rep = delta_continuity_report(phi, X, k, 100, seed + 17);
                CHECK(rep.holds());
                CHECK(rep.worst_exact <= 1.0 + 1e-8);
            }
        }
    }
}

TEST_CASE("cohomology dimensions")
{
    CHECK(cohomology_dim(complexes::cycle(7), 0) == 1);
    CHECK(cohomology_dim(complexes::cycle(7), 1) == 1);
    CHECK(cohomology_dim(complexes::filled_triangle(), 0) == 1);
    CHECK(cohomology_dim(complexes::filled_triangle(), 1) == 0);
    const auto two_edges = SimplicialComplex::from_maximal({{0, 1}, {2, 3}});
    CHECK(cohomology_dim(two_edges, 0) == 2);
    const auto t7 = complexes::torus7();
    CHECK(cohomology_dim(t7, 0) == 1);
    CHECK(cohomology_dim(t7, 1) == 2);
    CHECK(cohomology_dim(t7, 2) == 1);
    CHECK(harmonic_basis(t7, 1).cols() == 2);
    CHECK(cohomology_dim(complexes::disk_grid(3, 3), 1) == 0);
    CHECK(cohomology_dim(complexes::random_tree(40, 3), 1) == 0);
}

TEST_CASE("Euler characteristic matches alternating Betti sum")
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto X = complexes::random_bounded(20 + static_cast<int>(seed % 7), 4 + static_cast<int>(seed % 3), seed);
        long sum = 0;
        for (int k = 0; k <= X.dim(); ++k)
            sum += (k % 2 == 0 ? 1 : -1) * cohomology_dim(X, k);
        CHECK(sum == X.euler_characteristic());
    }
}

TEST_CASE("reduced representative")
{
    const auto sq = YoungFunction::power(2.0);
    const auto c4 = complexes::cycle(4);
    const auto theta = Cochain::from_oriented(c4, 1, {{{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}, {{3, 0}, 1}});
    const auto r = reduced_representative(sq, c4, theta);
    CHECK(r.residual == doctest::Approx(2.0).epsilon(1e-9));

    // exact coboundary
    const auto c9 = complexes::cycle(9);
    Cochain eta0{0, {1, -2, 0.5, 3, 0, 0, 1, 7, -1}};
    const auto exact = coboundary(c9, eta0);
    for (const auto& phi : {sq, YoungFunction::power(1.5), YoungFunction::log_damped(2, 2)})
        CHECK(reduced_representative(phi, c9, exact).residual <= 1e-8);

    // H^1 of the disk vanishes, so every closed 1-cochain reduces to 0
    const auto tri = complexes::filled_triangle();
    const auto closed = coboundary(tri, Cochain{0, {0.3, -1.2, 2.0}});
    CHECK(reduced_representative(YoungFunction::power(3.0), tri, closed).residual <= 1e-8);

    const auto not_closed = Cochain{1, {1, 0, 0}};
    CHECK_THROWS_AS(reduced_representative(sq, tri, not_closed), PreconditionError);
}

TEST_CASE("p = 2 residual equals the harmonic projection")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01;
    const auto sq = YoungFunction::power(2.0);
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto X = complexes::random_bounded(16, 5, seed);
        if (X.count(0) + X.count(1) + X.count(2) > 200)
            continue;
        const auto h = harmonic_basis(X, 1);
        // closed cochain: harmonic part plus a coboundary
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(X.count(1)));
        for (Eigen::Index j = 0; j < h.cols(); ++j)
            theta += n01(rng) * h.col(j);
        std::vector<double> eta(X.count(0));
        for (double& v : eta)
            v = n01(rng);
        const auto d = coboundary_values<double>(X, 0, eta);
        Cochain c{1, std::vector<double>(d)};
        for (std::size_t i = 0; i < d.size(); ++i)
            c.values[i] += theta(static_cast<Eigen::Index>(i));
        const double oracle = (h.transpose() * Eigen::Map<Eigen::VectorXd>(c.values.data(), theta.size())).norm();
        CHECK(reduced_representative(sq, X, c).residual == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("non-quadratic minimization improves on least squares")
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n01;
    const auto c6 = complexes::cycle(6);
    for (const auto& phi : {YoungFunction::power(1.5), YoungFunction::power(4.0), YoungFunction::log_damped(2, 2)}) {
        Cochain theta{1, std::vector<double>(6)};
        for (double& v : theta.values)
            v = n01(rng);
        const auto r = reduced_representative(phi, c6, theta);
        CHECK(r.residual <= r.initial_residual * (1 + 1e-12));
        // probe a few perturbations around the minimizer
        for (int t = 0; t < 50; ++t) {
            std::vector<double> eta = r.eta;
            for (double& v : eta)
                v += 1e-3 * n01(rng);
            auto rep = theta.values;
            const auto d = coboundary_values<double>(c6, 0, eta);
            for (std::size_t i = 0; i < rep.size(); ++i)
                rep[i] -= d[i];
            CHECK(counting_norm(phi, rep) >= r.residual * (1 - 1e-6));
        }
    }
}

TEST_CASE("relative masks")
{
    const auto ray = complexes::path(100);
    BoundaryPointModel xi;
    xi.base = 0;
    for (int i = 0; i < 100; ++i)
        xi.ray.push_back(i);

    auto m_inf = relative_mask(ray, xi, INFINITY);
    CHECK(m_inf.size(0) == 0);
    CHECK(m_inf.size(1) == 0);
    auto m_neg = relative_mask(ray, xi, -INFINITY);
    CHECK(m_neg.size(0) == 100);
    CHECK(m_neg.size(1) == 99);

    const auto m50 = relative_mask(ray, xi, 50.0);
    // BFS distance along the ray is the vertex index
    const auto dist = ray.vertex_distances(0);
    for (std::size_t i = 0; i < ray.count(1); ++i) {
        const auto& e = ray.simplex(1, i);
        CHECK(m50.contains(1, i) == (std::min(dist[e[0]], dist[e[1]]) > 50));
    }
    CHECK(m50.size(0) == 49);
    CHECK(m50.size(1) == 48);

    BoundaryPointModel bad = xi;
    bad.ray = {0, 2};
    CHECK_THROWS_AS(relative_mask(ray, bad, 3.0), InputError);
}

TEST_CASE("mask monotonicity and delta stability")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    const auto X = complexes::disk_grid(6, 6);
    BoundaryPointModel xi;
    xi.base = 0;
    // diagonal of the grid: (i, i) -> id 8 i
    for (int i = 0; i <= 6; ++i)
        xi.ray.push_back(i * 8);
    for (double t = -3.0; t < 12.0; t += 0.5) {
        const auto a = relative_mask(X, xi, t);
        const auto b = relative_mask(X, xi, t + 0.5);
        for (int k = 0; k <= X.dim(); ++k)
            for (std::size_t i = 0; i < X.count(k); ++i)
                CHECK((!b.contains(k, i) || a.contains(k, i)));
        for (int k = 0; k < X.dim(); ++k) {
            Cochain theta{k, std::vector<double>(X.count(k))};
            for (std::size_t i = 0; i < X.count(k); ++i)
                theta.values[i] = a.contains(k, i) ? 0.0 : n01(rng);
            CHECK(vanishes_on(coboundary(X, theta), a));
        }
    }
}
