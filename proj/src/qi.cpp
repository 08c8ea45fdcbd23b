#include "orlicz/qi.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "orlicz/luxemburg.hpp"

namespace orlicz {

using Rational = boost::multiprecision::cpp_rational;

void ChainValue::add(std::size_t simplex, long long c)
{
    if (c == 0)
        return;
    auto [it, inserted] = coeffs.emplace(simplex, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0)
            coeffs.erase(it);
    }
}

void ChainValue::add(const ChainValue& other, long long factor)
{
    for (const auto& [s, c] : other.coeffs)
        add(s, c * factor);
}

long long ChainValue::sup_norm() const
{
    long long m = 0;
    for (const auto& [s, c] : coeffs)
        m = std::max(m, c < 0 ? -c : c);
    return m;
}

ChainValue boundary(const SimplicialComplex& Y, const ChainValue& c)
{
    ChainValue out;
    out.degree = c.degree - 1;
    if (c.degree == 0)
        return out;
    for (const auto& [s, coef] : c.coeffs)
        for (const Face& f : Y.faces(c.degree, s))
            out.add(f.index, f.sign * coef);
    return out;
}

namespace {

/// BFS distance tables, computed once per source.
class DistanceCache {
public:
    explicit DistanceCache(const SimplicialComplex& Y) : Y_(Y) {}
    const std::vector<int>& from(int v)
    {
        auto it = cache_.find(v);
        if (it == cache_.end())
            it = cache_.emplace(v, Y_.vertex_distances(v)).first;
        return it->second;
    }

private:
    const SimplicialComplex& Y_;
    std::unordered_map<int, std::vector<int>> cache_;
};

std::set<int> support_vertices(const SimplicialComplex& Y, const ChainValue& c)
{
    std::set<int> verts;
    for (const auto& [s, coef] : c.coeffs)
        for (int v : Y.simplex(c.degree, s))
            verts.insert(v);
    return verts;
}

ChainValue geodesic(const SimplicialComplex& Y, int from, int to, PathRule rule)
{
    ChainValue path;
    path.degree = 1;
    if (from == to)
        return path;
    const auto dist = Y.vertex_distances(to);
    if (dist[from] < 0)
        throw BudgetError("no path between the endpoints of a 0-cycle");
    int u = from;
    while (u != to) {
        int next = -1;
        for (int w : Y.adjacency()[u]) {
            if (dist[w] == dist[u] - 1) {
                next = w;
                if (rule == PathRule::SmallestNeighbor)
                    break;
            }
        }
        const Simplex edge{std::min(u, next), std::max(u, next)};
        path.add(*Y.find(edge), u < next ? 1 : -1);
        u = next;
    }
    return path;
}

/// Integral solution of A x = b by exact row reduction; pivots in column order.
std::optional<std::vector<long long>> solve_integral(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
                                                     std::size_t cols)
{
    const std::size_t rows = a.size();
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0)
            ++p;
        if (p == rows)
            continue;
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        const Rational inv = 1 / a[r][c];
        for (std::size_t j = c; j < cols; ++j)
            a[r][j] *= inv;
        b[r] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0)
                continue;
            const Rational f = a[i][c];
            for (std::size_t j = c; j < cols; ++j)
                if (a[r][j] != 0)
                    a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0)
            return std::nullopt;
    std::vector<long long> x(cols, 0);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) {
        if (denominator(b[i]) != 1)
            return std::nullopt;
        x[pivot_col[i]] = static_cast<long long>(numerator(b[i]));
    }
    return x;
}

} // namespace

ChainValue fill_cycle(const SimplicialComplex& Y, const ChainValue& z, const FillOptions& options)
{
    ChainValue out;
    out.degree = z.degree + 1;
    if (z.empty())
        return out;
    if (z.degree == 0) {
        long long total = 0;
        for (const auto& [s, c] : z.coeffs)
            total += c;
        if (total != 0)
            throw PreconditionError("0-chain with nonzero augmentation has no filling");
        if (z.coeffs.size() == 2) {
            const auto a = *z.coeffs.begin();
            const auto b = *std::next(z.coeffs.begin());
            const auto& pos = a.second > 0 ? a : b;
            const auto& neg = a.second > 0 ? b : a;
            // boundary of a path from neg to pos is pos - neg
            out.add(geodesic(Y, static_cast<int>(neg.first), static_cast<int>(pos.first), options.path_rule),
                    pos.second);
            return out;
        }
    } else if (!boundary(Y, z).empty()) {
        throw PreconditionError("only cycles can be filled");
    }
    const int k = out.degree;
    if (k > Y.dim())
        throw BudgetError("no simplices of degree " + std::to_string(k) + " to fill a nonzero cycle");

    const auto verts = support_vertices(Y, z);
    const std::vector<int> seeds(verts.begin(), verts.end());
    const auto dist = Y.distances_to_set(seeds);
    for (int radius = 0; radius <= options.radius_budget; ++radius) {
        auto inside = [&](const Simplex& s) {
            return std::all_of(s.begin(), s.end(), [&](int v) { return dist[v] >= 0 && dist[v] <= radius; });
        };
        std::vector<std::size_t> cols;
        for (std::size_t i = 0; i < Y.count(k); ++i)
            if (inside(Y.simplex(k, i)))
                cols.push_back(i);
        if (cols.empty())
            continue;
        std::map<std::size_t, std::size_t> row_of;
        for (std::size_t c : cols)
            for (const Face& f : Y.faces(k, c))
                row_of.emplace(f.index, 0);
        bool covered = true;
        for (const auto& [s, c] : z.coeffs)
            covered = covered && row_of.count(s) > 0;
        if (!covered)
            continue;
        std::size_t next = 0;
        for (auto& [s, idx] : row_of)
            idx = next++;
        std::vector<std::vector<Rational>> a(row_of.size(), std::vector<Rational>(cols.size()));
        std::vector<Rational> b(row_of.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (const Face& f : Y.faces(k, cols[j]))
                a[row_of[f.index]][j] = f.sign;
        for (const auto& [s, c] : z.coeffs)
            b[row_of[s]] = c;
        if (auto x = solve_integral(std::move(a), std::move(b), cols.size())) {
            for (std::size_t j = 0; j < cols.size(); ++j)
                out.add(cols[j], (*x)[j]);
            return out;
        }
    }
    throw BudgetError("no filling within radius " + std::to_string(options.radius_budget));
}

QIConstants measure_qi(const SimplicialComplex& X, const SimplicialComplex& Y, const std::vector<int>& map)
{
    if (map.size() != X.vertex_count())
        throw InputError("vertex map size does not match X");
    for (int y : map)
        if (y < 0 || static_cast<std::size_t>(y) >= Y.vertex_count())
            throw InputError("vertex map leaves Y");
    DistanceCache dy(Y);
    std::vector<std::vector<int>> dx(X.vertex_count());
    for (std::size_t v = 0; v < X.vertex_count(); ++v)
        dx[v] = X.vertex_distances(static_cast<int>(v));

    QIConstants q;
    double lambda = 1.0;
    for (std::size_t a = 0; a < map.size(); ++a) {
        const auto& da = dy.from(map[a]);
        for (std::size_t b = a + 1; b < map.size(); ++b) {
            const int x = dx[a][b];
            const int y = da[map[b]];
            if (x <= 0 || y < 0)
                continue;
            lambda = std::max(lambda, static_cast<double>(y) / x);
            if (y > 0)
                lambda = std::max(lambda, static_cast<double>(x) / y);
        }
    }
    double eps = 0.0;
    for (std::size_t a = 0; a < map.size(); ++a) {
        const auto& da = dy.from(map[a]);
        for (std::size_t b = a + 1; b < map.size(); ++b) {
            const int x = dx[a][b];
            const int y = da[map[b]];
            if (x < 0 || y < 0)
                continue;
            eps = std::max({eps, y - lambda * x, x / lambda - y});
        }
    }
    q.lambda = lambda;
    q.epsilon = eps;
    const auto to_image = Y.distances_to_set(map);
    for (int d : to_image)
        q.density = std::max(q.density, d);
    return q;
}

std::vector<int> nearest_preimage(const SimplicialComplex& X, const SimplicialComplex& Y, const std::vector<int>& map)
{
    if (map.size() != X.vertex_count())
        throw InputError("vertex map size does not match X");
    DistanceCache dy(Y);
    std::vector<int> inv(Y.vertex_count(), -1);
    std::vector<int> best(Y.vertex_count(), -1);
    for (std::size_t x = 0; x < map.size(); ++x) {
        const auto& d = dy.from(map[x]);
        for (std::size_t y = 0; y < inv.size(); ++y) {
            if (d[y] < 0)
                continue;
            if (best[y] < 0 || d[y] < best[y]) {
                best[y] = d[y];
                inv[y] = static_cast<int>(x);
            }
        }
    }
    if (std::find(inv.begin(), inv.end(), -1) != inv.end())
        throw InputError("some vertex of Y is not reachable from the image");
    return inv;
}

int map_distance(const SimplicialComplex& Y, const std::vector<int>& f, const std::vector<int>& g)
{
    if (f.size() != g.size())
        throw InputError("maps have different domains");
    int m = 0;
    for (std::size_t v = 0; v < f.size(); ++v) {
        const int d = Y.vertex_distances(f[v])[g[v]];
        if (d < 0)
            throw InputError("maps land in different components");
        m = std::max(m, d);
    }
    return m;
}

void record_constants(const SimplicialComplex& X, const SimplicialComplex& Y, ChainMap& c)
{
    const int levels = c.k_max + 1;
    c.sup_bound.assign(levels, 0);
    c.length_bound.assign(levels, 0);
    c.multiplicity.assign(levels, 0);
    c.hausdorff.assign(levels, 0);
    DistanceCache dy(Y);
    for (int k = 0; k < levels; ++k) {
        std::vector<std::size_t> hits(Y.count(k), 0);
        for (std::size_t i = 0; i < c.images[k].size(); ++i) {
            const ChainValue& ch = c.images[k][i];
            c.sup_bound[k] = std::max(c.sup_bound[k], ch.sup_norm());
            c.length_bound[k] = std::max(c.length_bound[k], ch.length());
            for (const auto& [s, coef] : ch.coeffs)
                c.multiplicity[k] = std::max(c.multiplicity[k], ++hits[s]);
            if (ch.empty())
                continue;
            const auto verts = support_vertices(Y, ch);
            for (int v : X.simplex(k, i)) {
                for (const auto& [fv, coef] : c.images[0][v].coeffs) {
                    const auto& d = dy.from(static_cast<int>(fv));
                    for (int y : verts)
                        c.hausdorff[k] = std::max(c.hausdorff[k], d[y]);
                }
            }
        }
    }
}

ChainMap build_chain_map(const SimplicialComplex& X, const SimplicialComplex& Y, const std::vector<int>& map,
                         int k_max, const FillOptions& options)
{
    if (map.size() != X.vertex_count())
        throw InputError("vertex map size does not match X");
    if (k_max < 0 || k_max > X.dim())
        throw InputError("chain map degree outside X");
    ChainMap c;
    c.k_max = k_max;
    c.images.resize(k_max + 1);
    c.images[0].resize(X.vertex_count());
    for (std::size_t v = 0; v < map.size(); ++v) {
        if (map[v] < 0 || static_cast<std::size_t>(map[v]) >= Y.vertex_count())
            throw InputError("vertex map leaves Y");
        c.images[0][v].add(static_cast<std::size_t>(map[v]), 1);
    }
    for (int k = 1; k <= k_max; ++k) {
        c.images[k].resize(X.count(k));
        for (std::size_t i = 0; i < X.count(k); ++i) {
            ChainValue z;
            z.degree = k - 1;
            for (const Face& f : X.faces(k, i))
                z.add(c.images[k - 1][f.index], f.sign);
            try {
                c.images[k][i] = fill_cycle(Y, z, options);
            } catch (const BudgetError& e) {
                std::string name;
                for (int v : X.simplex(k, i))
                    name += (name.empty() ? "" : ",") + std::to_string(v);
                throw BudgetError(std::string(e.what()) + " for simplex [" + name + "]");
            }
        }
    }
    record_constants(X, Y, c);
    return c;
}

ChainMap identity_chain_map(const SimplicialComplex& X, int k_max)
{
    if (k_max < 0 || k_max > X.dim())
        throw InputError("chain map degree outside X");
    ChainMap c;
    c.k_max = k_max;
    c.images.resize(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
        c.images[k].resize(X.count(k));
        for (std::size_t i = 0; i < X.count(k); ++i) {
            c.images[k][i].degree = k;
            c.images[k][i].add(i, 1);
        }
    }
    record_constants(X, X, c);
    return c;
}

ChainMap compose(const SimplicialComplex& X, const SimplicialComplex& Z, const ChainMap& first,
                 const ChainMap& second)
{
    ChainMap c;
    c.k_max = std::min(first.k_max, second.k_max);
    c.images.resize(c.k_max + 1);
    for (int k = 0; k <= c.k_max; ++k) {
        c.images[k].resize(first.images[k].size());
        for (std::size_t i = 0; i < first.images[k].size(); ++i) {
            c.images[k][i].degree = k;
            for (const auto& [s, coef] : first.images[k][i].coeffs)
                c.images[k][i].add(second.images[k][s], coef);
        }
    }
    record_constants(X, Z, c);
    return c;
}

std::size_t chain_map_defects(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& c)
{
    std::size_t defects = 0;
    for (int k = 1; k <= c.k_max; ++k) {
        for (std::size_t i = 0; i < X.count(k); ++i) {
            ChainValue rhs;
            rhs.degree = k - 1;
            for (const Face& f : X.faces(k, i))
                rhs.add(c.images[k - 1][f.index], f.sign);
            if (!(boundary(Y, c.images[k][i]) == rhs))
                ++defects;
        }
    }
    return defects;
}

Cochain pullback(const SimplicialComplex& X, const ChainMap& c, const Cochain& theta)
{
    const int k = theta.degree;
    if (k < 0 || k > c.k_max)
        throw InputError("pullback degree outside the chain map");
    Cochain out{k, std::vector<double>(X.count(k), 0.0)};
    for (std::size_t i = 0; i < out.values.size(); ++i)
        for (const auto& [s, coef] : c.images[k][i].coeffs)
            out.values[i] += static_cast<double>(coef) * theta.values.at(s);
    return out;
}

std::vector<long long> pullback_exact(const SimplicialComplex& X, const ChainMap& c, int k,
                                      const std::vector<long long>& theta)
{
    if (k < 0 || k > c.k_max)
        throw InputError("pullback degree outside the chain map");
    std::vector<long long> out(X.count(k), 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (const auto& [s, coef] : c.images[k][i].coeffs)
            out[i] += coef * theta.at(s);
    return out;
}

Eigen::MatrixXd pullback_matrix(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& c, int k)
{
    if (k < 0 || k > c.k_max)
        throw InputError("pullback degree outside the chain map");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(X.count(k)), static_cast<Eigen::Index>(Y.count(k)));
    for (std::size_t i = 0; i < X.count(k); ++i)
        for (const auto& [s, coef] : c.images[k][i].coeffs)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) += static_cast<double>(coef);
    return m;
}

PrismHomotopy prism_homotopy(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& cf,
                             const ChainMap& cg, const FillOptions& options)
{
    PrismHomotopy h;
    h.k_max = std::min(cf.k_max, cg.k_max);
    h.chains.resize(h.k_max + 1);
    for (int k = 0; k <= h.k_max; ++k) {
        h.chains[k].resize(X.count(k));
        for (std::size_t i = 0; i < X.count(k); ++i) {
            ChainValue z;
            z.degree = k;
            z.add(cf.images[k][i], 1);
            z.add(cg.images[k][i], -1);
            if (k > 0)
                for (const Face& f : X.faces(k, i))
                    z.add(h.chains[k - 1][f.index], -f.sign);
            h.chains[k][i] = fill_cycle(Y, z, options);
        }
    }
    h.sup_bound.assign(h.k_max + 1, 0);
    h.length_bound.assign(h.k_max + 1, 0);
    for (int k = 0; k <= h.k_max; ++k) {
        for (const auto& ch : h.chains[k]) {
            h.sup_bound[k] = std::max(h.sup_bound[k], ch.sup_norm());
            h.length_bound[k] = std::max(h.length_bound[k], ch.length());
        }
    }
    return h;
}

std::size_t prism_defects(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& cf,
                          const ChainMap& cg, const PrismHomotopy& h)
{
    std::size_t defects = 0;
    for (int k = 0; k <= h.k_max; ++k) {
        for (std::size_t i = 0; i < X.count(k); ++i) {
            ChainValue lhs = boundary(Y, h.chains[k][i]);
            if (k > 0)
                for (const Face& f : X.faces(k, i))
                    lhs.add(h.chains[k - 1][f.index], f.sign);
            ChainValue rhs;
            rhs.degree = k;
            rhs.add(cf.images[k][i], 1);
            rhs.add(cg.images[k][i], -1);
            lhs.degree = k;
            if (!(lhs == rhs))
                ++defects;
        }
    }
    return defects;
}

std::vector<long long> homotopy_operator(const SimplicialComplex& X, const PrismHomotopy& h, int k,
                                         const std::vector<long long>& theta)
{
    if (k < 1 || k - 1 > h.k_max)
        throw InputError("homotopy operator degree outside the prism");
    std::vector<long long> out(X.count(k - 1), 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (const auto& [s, coef] : h.chains[k - 1][i].coeffs)
            out[i] += coef * theta.at(s);
    return out;
}

Eigen::MatrixXd induced_cohomology_matrix(const SimplicialComplex& X, const SimplicialComplex& Y,
                                          const ChainMap& c, int k)
{
    const Eigen::MatrixXd hx = harmonic_basis(X, k);
    const Eigen::MatrixXd hy = harmonic_basis(Y, k);
    return hx.transpose() * pullback_matrix(X, Y, c, k) * hy;
}

PullbackNormReport pullback_norm_report(const YoungFunction& phi, const SimplicialComplex& X,
                                        const SimplicialComplex& Y, const ChainMap& c, int k, int trials,
                                        std::uint64_t seed, double tol)
{
    if (k < 0 || k > c.k_max)
        throw InputError("pullback degree outside the chain map");
    PullbackNormReport r;
    r.degree = k;
    const double n = static_cast<double>(c.sup_bound[k]);
    const double l = static_cast<double>(c.length_bound[k]);
    const double d = static_cast<double>(c.multiplicity[k]);
    r.constant = n * l * std::max(1.0, d);
    const std::size_t ny = Y.count(k);
    if (ny == 0)
        return r;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<std::size_t> pick(0, ny - 1);
    std::bernoulli_distribution coin(0.5);
    const double slack = 1.0 + 16.0 * tol;
    for (int t = 0; t < trials; ++t) {
        Cochain theta{k, std::vector<double>(ny, 0.0)};
        if (t % 3 == 1)
            theta.values[pick(rng)] = 1.0;
        else
            for (double& v : theta.values)
                v = t % 3 == 0 ? gauss(rng) : (coin(rng) ? 1.0 : -1.0);
        const Cochain pulled = pullback(X, c, theta);
        const double a = cochain_norm(phi, pulled, tol);
        const double b = cochain_norm(phi, theta, tol);
        ++r.trials;
        if (b == 0.0)
            continue;
        r.worst_ratio = std::max(r.worst_ratio, a / b);
        if (a > r.constant * b * slack)
            ++r.violations;
        if (d > 0 && a > n * l * cochain_norm(phi.scaled(d), theta, tol) * slack)
            ++r.violations;
    }
    return r;
}

RelativeShift pulled_back_threshold(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& c,
                                    const BoundaryPointModel& xi_x, const BoundaryPointModel& xi_y, double t_y)
{
    const auto bx = busemann_values(X, xi_x);
    const auto mask_y = relative_mask(Y, xi_y, t_y);
    RelativeShift s;
    s.t_y = t_y;
    s.t_x = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= c.k_max; ++k) {
        for (std::size_t i = 0; i < X.count(k); ++i) {
            bool inside = true;
            for (const auto& [tau, coef] : c.images[k][i].coeffs)
                inside = inside && mask_y.contains(k, tau);
            if (inside)
                continue;
            double low = std::numeric_limits<double>::infinity();
            for (int v : X.simplex(k, i))
                low = std::min(low, bx[v]);
            s.t_x = std::max(s.t_x, low);
        }
    }
    s.shift = s.t_x - t_y;
    return s;
}

bool IsomorphismReport::ok(double tol) const
{
    auto small = [&](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double e) { return e <= tol; });
    };
    return small(identity_error_x) && small(identity_error_y) && chain_defects == 0 && prism_defects == 0 &&
           homotopy_defects == 0;
}

namespace {

/// Random integer cochains checked against c* theta - theta = delta H theta + H delta theta.
std::size_t cochain_homotopy_defects(const SimplicialComplex& X, const ChainMap& composite, const PrismHomotopy& h,
                                     std::mt19937_64& rng, int samples)
{
    std::uniform_int_distribution<long long> ints(-50, 50);
    std::size_t defects = 0;
    for (int k = 0; k <= h.k_max; ++k) {
        for (int s = 0; s < samples; ++s) {
            std::vector<long long> theta(X.count(k));
            for (auto& v : theta)
                v = ints(rng);
            const auto pulled = pullback_exact(X, composite, k, theta);
            std::vector<long long> rhs(X.count(k), 0);
            if (k > 0) {
                const auto ht = homotopy_operator(X, h, k, theta);
                rhs = coboundary_values<long long>(X, k - 1, ht);
            }
            if (k < X.dim()) {
                const auto dt = coboundary_values<long long>(X, k, theta);
                const auto hdt = homotopy_operator(X, h, k + 1, dt);
                for (std::size_t i = 0; i < rhs.size(); ++i)
                    rhs[i] += hdt[i];
            }
            for (std::size_t i = 0; i < rhs.size(); ++i) {
                if (pulled[i] - theta[i] != rhs[i]) {
                    ++defects;
                    break;
                }
            }
        }
    }
    return defects;
}

double identity_error(const Eigen::MatrixXd& m)
{
    if (m.size() == 0)
        return 0.0;
    return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

} // namespace

IsomorphismReport check_qi_isomorphism(const SimplicialComplex& X, const SimplicialComplex& Y,
                                       const QuasiIsometry& F, int k_max, std::uint64_t seed,
                                       const FillOptions& options)
{
    if (k_max > std::min(X.dim(), Y.dim()))
        throw InputError("degree exceeds the complexes");
    const std::vector<int> inverse = F.quasi_inverse ? *F.quasi_inverse : nearest_preimage(X, Y, F.map);
    IsomorphismReport r;
    r.forward_constants = measure_qi(X, Y, F.map);
    r.backward_constants = measure_qi(Y, X, inverse);

    const ChainMap cf = build_chain_map(X, Y, F.map, k_max, options);
    const ChainMap cg = build_chain_map(Y, X, inverse, k_max, options);
    r.chain_defects = chain_map_defects(X, Y, cf) + chain_map_defects(Y, X, cg);

    // c_G c_F : X -> X is homotopic to the identity, and likewise on Y
    const ChainMap gf = compose(X, X, cf, cg);
    const ChainMap fg = compose(Y, Y, cg, cf);
    const ChainMap idx = identity_chain_map(X, k_max);
    const ChainMap idy = identity_chain_map(Y, k_max);
    const PrismHomotopy hx = prism_homotopy(X, X, gf, idx, options);
    const PrismHomotopy hy = prism_homotopy(Y, Y, fg, idy, options);
    r.prism_defects = prism_defects(X, X, gf, idx, hx) + prism_defects(Y, Y, fg, idy, hy);

    std::mt19937_64 rng(seed);
    r.homotopy_defects = cochain_homotopy_defects(X, gf, hx, rng, 20) + cochain_homotopy_defects(Y, fg, hy, rng, 20);

    for (int k = 0; k <= k_max; ++k) {
        r.forward.push_back(induced_cohomology_matrix(X, Y, cf, k));
        r.backward.push_back(induced_cohomology_matrix(Y, X, cg, k));
        r.identity_error_x.push_back(identity_error(r.forward.back() * r.backward.back()));
        r.identity_error_y.push_back(identity_error(r.backward.back() * r.forward.back()));
    }
    return r;
}

} // namespace orlicz
