#include "orlicz/simplicial.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>

#include "orlicz/luxemburg.hpp"

namespace orlicz {

namespace {

void check_tuple(const Simplex& s)
{
    if (s.empty())
        throw ConstructionError("empty simplex");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0)
            throw ConstructionError("negative vertex id");
        if (i > 0 && s[i] <= s[i - 1])
            throw ConstructionError("simplex vertices must be distinct and sorted");
    }
}

} // namespace

int permutation_sign(std::vector<int>& tuple)
{
    int sign = 1;
    // insertion sort, counting transpositions
    for (std::size_t i = 1; i < tuple.size(); ++i) {
        for (std::size_t j = i; j > 0 && tuple[j - 1] > tuple[j]; --j) {
            std::swap(tuple[j - 1], tuple[j]);
            sign = -sign;
        }
    }
    for (std::size_t i = 1; i < tuple.size(); ++i)
        if (tuple[i] == tuple[i - 1])
            return 0;
    return sign;
}

SimplicialComplex SimplicialComplex::from_maximal(const std::vector<Simplex>& simplices, int n_vertices)
{
    std::vector<std::set<Simplex>> sets;
    int max_vertex = n_vertices - 1;
    for (Simplex s : simplices) {
        std::sort(s.begin(), s.end());
        check_tuple(s);
        max_vertex = std::max(max_vertex, s.back());
        const std::size_t n = s.size();
        if (n > 24)
            throw ConstructionError("simplex dimension too large");
        if (sets.size() < n)
            sets.resize(n);
        for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
            Simplex face;
            for (std::size_t i = 0; i < n; ++i)
                if (bits & (1u << i))
                    face.push_back(s[i]);
            sets[face.size() - 1].insert(std::move(face));
        }
    }
    if (sets.empty())
        sets.resize(1);
    for (int v = 0; v <= max_vertex; ++v)
        sets[0].insert(Simplex{v});
    std::vector<std::vector<Simplex>> levels;
    for (auto& s : sets)
        levels.emplace_back(s.begin(), s.end());
    return from_levels(std::move(levels));
}

SimplicialComplex SimplicialComplex::from_levels(std::vector<std::vector<Simplex>> levels)
{
    while (!levels.empty() && levels.back().empty())
        levels.pop_back();
    if (levels.empty())
        throw ConstructionError("complex without vertices");
    for (std::size_t k = 0; k < levels.size(); ++k) {
        for (const Simplex& s : levels[k]) {
            check_tuple(s);
            if (s.size() != k + 1)
                throw ConstructionError("simplex listed under the wrong dimension");
        }
        std::sort(levels[k].begin(), levels[k].end());
        if (std::adjacent_find(levels[k].begin(), levels[k].end()) != levels[k].end())
            throw ConstructionError("duplicate simplex");
    }
    for (std::size_t v = 0; v < levels[0].size(); ++v)
        if (levels[0][v][0] != static_cast<int>(v))
            throw ConstructionError("vertex ids must be 0..n-1");
    SimplicialComplex X;
    X.levels_ = std::move(levels);
    X.index();
    return X;
}

void SimplicialComplex::index()
{
    const std::size_t dims = levels_.size();
    lookup_.assign(dims, {});
    faces_.assign(dims, {});
    cofaces_.assign(dims, {});
    for (std::size_t k = 0; k < dims; ++k) {
        for (std::size_t i = 0; i < levels_[k].size(); ++i)
            lookup_[k].emplace(levels_[k][i], i);
        cofaces_[k].assign(levels_[k].size(), 0);
    }
    for (std::size_t k = 1; k < dims; ++k) {
        faces_[k].resize(levels_[k].size());
        for (std::size_t i = 0; i < levels_[k].size(); ++i) {
            const Simplex& s = levels_[k][i];
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Simplex face;
                face.reserve(s.size() - 1);
                for (std::size_t j = 0; j < s.size(); ++j)
                    if (j != drop)
                        face.push_back(s[j]);
                const auto it = lookup_[k - 1].find(face);
                if (it == lookup_[k - 1].end())
                    throw ConstructionError("a face of a listed simplex is missing");
                faces_[k][i].push_back({it->second, drop % 2 == 0 ? 1 : -1});
                ++cofaces_[k - 1][it->second];
            }
        }
    }
    adjacency_.assign(levels_[0].size(), {});
    if (dims > 1) {
        for (const Simplex& e : levels_[1]) {
            adjacency_[e[0]].push_back(e[1]);
            adjacency_[e[1]].push_back(e[0]);
        }
    }
    for (auto& a : adjacency_)
        std::sort(a.begin(), a.end());
}

std::size_t SimplicialComplex::count(int k) const
{
    if (k < 0 || k > dim())
        return 0;
    return levels_[k].size();
}

const std::vector<Simplex>& SimplicialComplex::simplices(int k) const
{
    static const std::vector<Simplex> empty;
    if (k < 0 || k > dim())
        return empty;
    return levels_[k];
}

std::optional<std::size_t> SimplicialComplex::find(const Simplex& s) const
{
    const int k = static_cast<int>(s.size()) - 1;
    if (k < 0 || k > dim())
        return std::nullopt;
    const auto it = lookup_[k].find(s);
    if (it == lookup_[k].end())
        return std::nullopt;
    return it->second;
}

int SimplicialComplex::max_cofaces(int k) const
{
    if (k < 0 || k > dim())
        return 0;
    int m = 0;
    for (int c : cofaces_[k])
        m = std::max(m, c);
    return m;
}

int SimplicialComplex::n1() const
{
    int m = 0;
    for (int k = 0; k <= dim(); ++k)
        m = std::max(m, max_cofaces(k));
    return m;
}

std::vector<int> SimplicialComplex::vertex_distances(int source) const
{
    const int s[] = {source};
    return distances_to_set(s);
}

std::vector<int> SimplicialComplex::distances_to_set(std::span<const int> sources) const
{
    std::vector<int> dist(vertex_count(), -1);
    std::deque<int> queue;
    for (int s : sources) {
        if (s < 0 || static_cast<std::size_t>(s) >= dist.size())
            throw InputError("source vertex outside the complex");
        if (dist[s] != 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : adjacency_[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

std::size_t SimplicialComplex::local_count(int r) const
{
    std::size_t best = 0;
    for (std::size_t v = 0; v < vertex_count(); ++v) {
        const auto d = vertex_distances(static_cast<int>(v));
        std::size_t n = 0;
        for (int k = 0; k <= dim(); ++k)
            for (const Simplex& s : levels_[k])
                n += std::all_of(s.begin(), s.end(), [&](int x) { return d[x] >= 0 && d[x] <= r; });
        best = std::max(best, n);
    }
    return best;
}

Eigen::MatrixXd SimplicialComplex::coboundary_matrix(int k) const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count(k + 1)), static_cast<Eigen::Index>(count(k)));
    for (std::size_t s = 0; s < count(k + 1); ++s)
        for (const Face& f : faces_[k + 1][s])
            m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(f.index)) = f.sign;
    return m;
}

long SimplicialComplex::euler_characteristic() const
{
    long chi = 0;
    for (int k = 0; k <= dim(); ++k)
        chi += (k % 2 == 0 ? 1 : -1) * static_cast<long>(count(k));
    return chi;
}

void SimplicialComplex::set_positions(std::vector<std::vector<double>> positions)
{
    if (!positions.empty() && positions.size() != vertex_count())
        throw InputError("one position per vertex expected");
    positions_ = std::move(positions);
}

namespace complexes {

SimplicialComplex cycle(int n)
{
    if (n < 3)
        throw InputError("a cycle needs at least 3 vertices");
    std::vector<Simplex> edges;
    for (int i = 0; i < n; ++i)
        edges.push_back({i, (i + 1) % n});
    return SimplicialComplex::from_maximal(edges, n);
}

SimplicialComplex path(int n)
{
    if (n < 1)
        throw InputError("a path needs at least one vertex");
    std::vector<Simplex> edges;
    for (int i = 0; i + 1 < n; ++i)
        edges.push_back({i, i + 1});
    return SimplicialComplex::from_maximal(edges, n);
}

SimplicialComplex filled_triangle()
{
    return SimplicialComplex::from_maximal({{0, 1, 2}});
}

SimplicialComplex torus7()
{
    std::vector<Simplex> tris;
    for (int i = 0; i < 7; ++i) {
        tris.push_back({i, (i + 1) % 7, (i + 3) % 7});
        tris.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return SimplicialComplex::from_maximal(tris, 7);
}

SimplicialComplex torus_grid(int m, int n)
{
    if (m < 3 || n < 3)
        throw InputError("torus grid needs at least 3 x 3 cells");
    auto id = [&](int i, int j) { return ((i % m + m) % m) * n + ((j % n + n) % n); };
    std::vector<Simplex> tris;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
        }
    }
    auto X = SimplicialComplex::from_maximal(tris, m * n);
    std::vector<std::vector<double>> pos(static_cast<std::size_t>(m * n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            pos[id(i, j)] = {static_cast<double>(i) / m, static_cast<double>(j) / n};
    X.set_positions(std::move(pos));
    return X;
}

SimplicialComplex disk_grid(int m, int n)
{
    if (m < 1 || n < 1)
        throw InputError("disk grid needs at least one cell");
    auto id = [&](int i, int j) { return i * (n + 1) + j; };
    std::vector<Simplex> tris;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
        }
    }
    auto X = SimplicialComplex::from_maximal(tris, (m + 1) * (n + 1));
    std::vector<std::vector<double>> pos(static_cast<std::size_t>((m + 1) * (n + 1)));
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j)
            pos[id(i, j)] = {static_cast<double>(i), static_cast<double>(j)};
    X.set_positions(std::move(pos));
    return X;
}

SimplicialComplex random_tree(int n, std::uint64_t seed)
{
    if (n < 1)
        throw InputError("a tree needs at least one vertex");
    std::mt19937_64 rng(seed);
    std::vector<Simplex> edges;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(std::max(0, v - 4), v - 1);
        edges.push_back({parent(rng), v});
    }
    return SimplicialComplex::from_maximal(edges, n);
}

SimplicialComplex random_bounded(int n_vertices, int window, std::uint64_t seed)
{
    if (n_vertices < 4 || window < 2 || window > n_vertices)
        throw InputError("random complex needs n >= 4 and 2 <= window <= n");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> start(0, n_vertices - 1);
    std::uniform_int_distribution<int> offset(0, window - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Simplex> simplices;
    // a spanning path keeps the complex connected
    for (int v = 0; v + 1 < n_vertices; ++v)
        simplices.push_back({v, v + 1});
    const int extras = n_vertices * 2;
    for (int e = 0; e < extras; ++e) {
        const double u = unit(rng);
        const int size = u < 0.45 ? 2 : (u < 0.9 ? 3 : 4);
        if (size > window)
            continue;
        const int s = start(rng);
        std::set<int> verts;
        while (static_cast<int>(verts.size()) < size)
            verts.insert((s + offset(rng)) % n_vertices);
        simplices.emplace_back(verts.begin(), verts.end());
    }
    return SimplicialComplex::from_maximal(simplices, n_vertices);
}

} // namespace complexes

Cochain Cochain::zero(const SimplicialComplex& X, int k)
{
    if (k < 0 || k > X.dim())
        throw InputError("cochain degree outside the complex");
    return {k, std::vector<double>(X.count(k), 0.0)};
}

Cochain Cochain::from_oriented(const SimplicialComplex& X, int k,
                               const std::vector<std::pair<std::vector<int>, double>>& entries)
{
    Cochain c = zero(X, k);
    for (const auto& [tuple, value] : entries) {
        if (static_cast<int>(tuple.size()) != k + 1)
            throw InputError("oriented tuple has the wrong length");
        std::vector<int> sorted = tuple;
        const int sign = permutation_sign(sorted);
        if (sign == 0)
            throw InputError("oriented tuple repeats a vertex");
        const auto idx = X.find(sorted);
        if (!idx)
            throw InputError("oriented tuple is not a simplex of the complex");
        c.values[*idx] = sign * value;
    }
    return c;
}

Cochain coboundary(const SimplicialComplex& X, const Cochain& theta)
{
    return {theta.degree + 1, coboundary_values<double>(X, theta.degree, theta.values)};
}

std::vector<double> coboundary_transpose(const SimplicialComplex& X, int k, std::span<const double> values)
{
    if (values.size() != X.count(k + 1))
        throw InputError("cochain size does not match the complex");
    std::vector<double> out(X.count(k), 0.0);
    for (std::size_t s = 0; s < values.size(); ++s)
        for (const Face& f : X.faces(k + 1, s))
            out[f.index] += f.sign * values[s];
    return out;
}

double cochain_norm(const YoungFunction& phi, const Cochain& theta, double tol)
{
    return counting_norm(phi, theta.values, tol);
}

ContinuityReport delta_continuity_report(const YoungFunction& phi, const SimplicialComplex& X, int k, int trials,
                                         std::uint64_t seed, double tol)
{
    if (k < 0 || k >= X.dim())
        throw InputError("continuity report needs 0 <= k < dim X");
    ContinuityReport r;
    r.degree = k;
    r.n1 = X.max_cofaces(k);
    const double faces = k + 2;
    r.constant = std::max(faces, static_cast<double>(r.n1));
    const std::size_t n = X.count(k);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<long long> ints(-1000, 1000);
    std::bernoulli_distribution coin(0.5);
    const double slack = 1.0 + 16.0 * tol;

    for (int t = 0; t < trials; ++t) {
        std::vector<double> theta(n, 0.0);
        switch (t % 4) {
        case 0:
            for (double& v : theta)
                v = gauss(rng);
            break;
        case 1:
            for (double& v : theta)
                v = coin(rng) ? 1.0 : -1.0;
            break;
        case 2:
            theta[pick(rng)] = 1.0 + std::abs(gauss(rng));
            break;
        default:
            for (double& v : theta)
                if (coin(rng) && coin(rng))
                    v = gauss(rng);
            theta[pick(rng)] = gauss(rng);
            break;
        }
        const auto dtheta = coboundary_values<double>(X, k, theta);
        const double n_theta = counting_norm(phi, theta, tol);
        const double n_delta = dtheta.empty() ? 0.0 : counting_norm(phi, dtheta, tol);
        ++r.trials;
        if (n_theta == 0.0)
            continue;
        const double ratio = n_delta / n_theta;
        r.worst_ratio = std::max(r.worst_ratio, ratio);
        if (r.n1 > 0) {
            const double n_scaled = counting_norm(phi.scaled(r.n1 / faces), theta, tol);
            const double exact = n_delta / (faces * n_scaled);
            r.worst_exact = std::max(r.worst_exact, exact);
            if (exact > slack)
                ++r.violations;
        } else if (n_delta > 0.0) {
            ++r.violations;
        }
        if (ratio > r.constant * slack)
            ++r.violations;

        if (k + 2 <= X.dim()) {
            std::vector<long long> z(n);
            for (auto& v : z)
                v = ints(rng);
            const auto dz = coboundary_values<long long>(X, k, z);
            const auto ddz = coboundary_values<long long>(X, k + 1, dz);
            if (std::any_of(ddz.begin(), ddz.end(), [](long long v) { return v != 0; }))
                r.delta_squared_zero = false;
        }
    }
    return r;
}

int matrix_rank(const Eigen::MatrixXd& m)
{
    if (m.size() == 0)
        return 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(1e-9);
    return static_cast<int>(qr.rank());
}

int cohomology_dim(const SimplicialComplex& X, int k)
{
    if (k < 0 || k > X.dim())
        throw InputError("cohomology degree outside the complex");
    const int n = static_cast<int>(X.count(k));
    const int rank_k = k < X.dim() ? matrix_rank(X.coboundary_matrix(k)) : 0;
    const int rank_prev = k > 0 ? matrix_rank(X.coboundary_matrix(k - 1)) : 0;
    return n - rank_k - rank_prev;
}

Eigen::MatrixXd harmonic_basis(const SimplicialComplex& X, int k)
{
    if (k < 0 || k > X.dim())
        throw InputError("cohomology degree outside the complex");
    const Eigen::Index n = static_cast<Eigen::Index>(X.count(k));
    Eigen::MatrixXd down = k < X.dim() ? X.coboundary_matrix(k) : Eigen::MatrixXd(0, n);
    Eigen::MatrixXd up = k > 0 ? Eigen::MatrixXd(X.coboundary_matrix(k - 1).transpose()) : Eigen::MatrixXd(0, n);
    Eigen::MatrixXd a(down.rows() + up.rows(), n);
    a << down, up;
    if (a.rows() == 0)
        return Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = 1e-9 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut)
            ++rank;
    return svd.matrixV().rightCols(n - rank);
}

ReducedResult reduced_representative(const YoungFunction& phi, const SimplicialComplex& X, const Cochain& theta,
                                     double tol, int max_iterations)
{
    const int k = theta.degree;
    if (k < 0 || k > X.dim() || theta.values.size() != X.count(k))
        throw InputError("cochain does not match the complex");
    double scale = 1.0;
    for (double v : theta.values)
        scale = std::max(scale, std::abs(v));
    for (double v : coboundary_values<double>(X, k, theta.values))
        if (std::abs(v) > 1e-9 * scale)
            throw PreconditionError("reduced representative needs a closed cochain");

    ReducedResult out;
    const double norm_tol = std::min(1e-12, tol);
    if (k == 0 || X.count(k - 1) == 0) {
        out.representative = theta;
        out.residual = out.initial_residual = cochain_norm(phi, theta, norm_tol);
        return out;
    }

    const Eigen::MatrixXd d = X.coboundary_matrix(k - 1);
    const Eigen::Map<const Eigen::VectorXd> th(theta.values.data(), static_cast<Eigen::Index>(theta.values.size()));
    Eigen::VectorXd eta = d.completeOrthogonalDecomposition().solve(th);

    auto residual_of = [&](const Eigen::VectorXd& e, Eigen::VectorXd& r) {
        r = th - d * e;
        return counting_norm(phi, std::span<const double>(r.data(), static_cast<std::size_t>(r.size())), norm_tol);
    };

    Eigen::VectorXd r;
    double value = residual_of(eta, r);
    out.initial_residual = value;
    Eigen::VectorXd best_eta = eta;
    double best = value;
    double gap = 0.25 * value;
    int stall = 0;
    int it = 0;
    Eigen::VectorXd w(r.size());
    for (; it < max_iterations && best > 0.0; ++it) {
        // gradient of the Luxemburg norm: N phi'(r/N) / <phi'(r/N), r>
        double pairing = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            w(i) = phi.derivative(r(i) / value);
            pairing += w(i) * r(i);
        }
        if (!(pairing > 0.0))
            break;
        const Eigen::VectorXd g = -(d.transpose() * w) * (value / pairing);
        const double gg = g.squaredNorm();
        if (gg <= (tol * best) * (tol * best))
            break;
        const double target = best - gap;
        eta -= ((value - target) / gg) * g;
        value = residual_of(eta, r);
        if (value < best * (1.0 - 1e-14)) {
            best = value;
            best_eta = eta;
            stall = 0;
        } else if (++stall >= 25) {
            gap *= 0.5;
            eta = best_eta;
            value = residual_of(eta, r);
            stall = 0;
        }
        if (gap <= tol * best)
            break;
    }
    out.iterations = it;
    out.eta.assign(best_eta.data(), best_eta.data() + best_eta.size());
    Eigen::VectorXd rep;
    out.residual = residual_of(best_eta, rep);
    out.representative = {k, std::vector<double>(rep.data(), rep.data() + rep.size())};
    return out;
}

std::vector<double> busemann_values(const SimplicialComplex& X, const BoundaryPointModel& xi)
{
    const int n = static_cast<int>(X.vertex_count());
    if (xi.base < 0 || xi.base >= n)
        throw InputError("boundary model base outside the complex");
    if (xi.ray.empty() || xi.ray.front() != xi.base)
        throw InputError("boundary model ray must start at its base");
    for (std::size_t i = 0; i < xi.ray.size(); ++i) {
        if (xi.ray[i] < 0 || xi.ray[i] >= n)
            throw InputError("ray vertex outside the complex");
        if (i > 0 && !std::binary_search(X.adjacency()[xi.ray[i - 1]].begin(), X.adjacency()[xi.ray[i - 1]].end(),
                                         xi.ray[i]))
            throw InputError("ray is not a path in the complex");
    }
    const auto from_base = X.vertex_distances(xi.base);
    const auto to_ray = X.distances_to_set(xi.ray);
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
        b[v] = from_base[v] < 0 ? -std::numeric_limits<double>::infinity()
                                : static_cast<double>(from_base[v]) - 2.0 * to_ray[v];
    return b;
}

std::size_t RelativeMask::size(int k) const
{
    if (k < 0 || static_cast<std::size_t>(k) >= masked.size())
        return 0;
    return static_cast<std::size_t>(std::count(masked[k].begin(), masked[k].end(), 1));
}

RelativeMask relative_mask(const SimplicialComplex& X, const BoundaryPointModel& xi)
{
    return relative_mask(X, xi, xi.t);
}

RelativeMask relative_mask(const SimplicialComplex& X, const BoundaryPointModel& xi, double t)
{
    if (std::isnan(t))
        throw InputError("horoparameter is NaN");
    const auto b = busemann_values(X, xi);
    RelativeMask m;
    m.masked.resize(static_cast<std::size_t>(X.dim()) + 1);
    for (int k = 0; k <= X.dim(); ++k) {
        m.masked[k].resize(X.count(k));
        for (std::size_t i = 0; i < X.count(k); ++i) {
            const Simplex& s = X.simplex(k, i);
            double low = std::numeric_limits<double>::infinity();
            for (int v : s)
                low = std::min(low, b[v]);
            m.masked[k][i] = low > t ? 1 : 0;
        }
    }
    return m;
}

bool vanishes_on(const Cochain& theta, const RelativeMask& mask, double tol)
{
    if (theta.degree < 0 || static_cast<std::size_t>(theta.degree) >= mask.masked.size())
        return true;
    const auto& row = mask.masked[theta.degree];
    for (std::size_t i = 0; i < theta.values.size() && i < row.size(); ++i)
        if (row[i] && std::abs(theta.values[i]) > tol)
            return false;
    return true;
}

} // namespace orlicz
