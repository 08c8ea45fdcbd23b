#include "orlicz/forms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "orlicz/errors.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/measure.hpp"

namespace orlicz {

namespace {

using IndexTable = std::array<std::array<std::vector<std::vector<int>>, Grid::kMaxDim + 2>, Grid::kMaxDim + 1>;

IndexTable build_index_table()
{
    IndexTable table;
    for (int n = 0; n <= Grid::kMaxDim; ++n) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> I;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i))
                    I.push_back(i);
            table[n][I.size()].push_back(I);
        }
        for (auto& level : table[n])
            std::sort(level.begin(), level.end());
    }
    return table;
}

const IndexTable& index_table()
{
    static const IndexTable table = build_index_table();
    return table;
}

void check_compatible(const DiscreteForm& a, const DiscreteForm& b)
{
    if (a.degree != b.degree || !a.grid.same_layout(b.grid))
        throw InputError("forms of different degree or on different grids");
}

double det_small(const double* m, int k, int stride)
{
    switch (k) {
    case 0:
        return 1.0;
    case 1:
        return m[0];
    case 2:
        return m[0] * m[stride + 1] - m[1] * m[stride];
    case 3:
        return m[0] * (m[stride + 1] * m[2 * stride + 2] - m[stride + 2] * m[2 * stride + 1])
             - m[1] * (m[stride] * m[2 * stride + 2] - m[stride + 2] * m[2 * stride])
             + m[2] * (m[stride] * m[2 * stride + 1] - m[stride + 1] * m[2 * stride]);
    default:
        throw InputError("determinant size above 3");
    }
}

/// omega(v_1..v_k) with V an n x k matrix of column vectors.
double evaluate_on_frame(const double* comps, int k, int n, const Eigen::MatrixXd& V)
{
    const auto& idx = multi_indices(n, k);
    double sum = 0.0;
    double sub[9];
    for (std::size_t c = 0; c < idx.size(); ++c) {
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s)
                sub[r * k + s] = V(idx[c][r], s);
        sum += comps[c] * det_small(sub, k, k);
    }
    return sum;
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& A)
{
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    return qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
}

bool inside_box(const Grid& g, std::span<const double> x)
{
    for (int a = 0; a < g.dim(); ++a)
        if (!(x[a] >= g.lo(a) - 1e-12 && x[a] <= g.hi(a) + 1e-12))
            return false;
    return true;
}

} // namespace

const std::vector<std::vector<int>>& multi_indices(int n, int k)
{
    static const std::vector<std::vector<int>> empty;
    if (n < 0 || n > Grid::kMaxDim || k < 0 || k > n)
        return empty;
    return index_table()[n][k];
}

int multi_index_position(int n, const std::vector<int>& I)
{
    const auto& idx = multi_indices(n, static_cast<int>(I.size()));
    auto it = std::lower_bound(idx.begin(), idx.end(), I);
    if (it == idx.end() || *it != I)
        return -1;
    return static_cast<int>(it - idx.begin());
}

DiscreteForm DiscreteForm::zero(const Grid& grid, int degree)
{
    if (degree < 0)
        throw InputError("negative form degree");
    DiscreteForm f;
    f.grid = grid;
    f.degree = degree;
    f.comps.assign(multi_indices(grid.dim(), degree).size(), std::vector<double>(grid.size(), 0.0));
    return f;
}

DiscreteForm DiscreteForm::sample(const Grid& grid, int degree, const FormFunction& fn)
{
    if (degree > grid.dim())
        throw InputError("form degree exceeds the dimension");
    DiscreteForm f = zero(grid, degree);
    const int C = f.components();
    double x[Grid::kMaxDim];
    double out[8];
    for (std::size_t p = 0; p < grid.size(); ++p) {
        grid.point(p, x);
        fn(x, out);
        for (int c = 0; c < C; ++c) {
            if (!std::isfinite(out[c]))
                throw InputError("form sample is not finite");
            f.comps[c][p] = out[c];
        }
    }
    return f;
}

void DiscreteForm::eval(const double* x, double* out) const
{
    Grid::Stencil s;
    grid.stencil(x, s);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        double v = 0.0;
        for (int j = 0; j < s.count; ++j)
            v += s.weight[j] * comps[c][s.index[j]];
        out[c] = v;
    }
}

void DiscreteForm::at(std::size_t p, double* out) const
{
    for (std::size_t c = 0; c < comps.size(); ++c)
        out[c] = comps[c][p];
}

DiscreteForm& DiscreteForm::operator+=(const DiscreteForm& o)
{
    check_compatible(*this, o);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t p = 0; p < comps[c].size(); ++p)
            comps[c][p] += o.comps[c][p];
    return *this;
}

DiscreteForm& DiscreteForm::operator-=(const DiscreteForm& o)
{
    check_compatible(*this, o);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t p = 0; p < comps[c].size(); ++p)
            comps[c][p] -= o.comps[c][p];
    return *this;
}

DiscreteForm& DiscreteForm::operator*=(double s)
{
    for (auto& comp : comps)
        for (double& v : comp)
            v *= s;
    return *this;
}

DiscreteForm operator+(DiscreteForm a, const DiscreteForm& b) { return a += b; }
DiscreteForm operator-(DiscreteForm a, const DiscreteForm& b) { return a -= b; }

double sup_norm(const DiscreteForm& f, std::span<const char> mask)
{
    double m = 0.0;
    for (const auto& comp : f.comps)
        for (std::size_t p = 0; p < comp.size(); ++p)
            if (mask.empty() || mask[p])
                m = std::max(m, std::abs(comp[p]));
    return m;
}

DiscreteForm exterior_derivative(const DiscreteForm& omega, int order)
{
    const int n = omega.dim();
    const int k = omega.degree;
    if (k >= n) {
        DiscreteForm z;
        z.grid = omega.grid;
        z.degree = k + 1;
        return z;
    }
    DiscreteForm out = DiscreteForm::zero(omega.grid, k + 1);
    const auto& targets = multi_indices(n, k + 1);
    for (std::size_t c = 0; c < targets.size(); ++c) {
        const auto& J = targets[c];
        for (int m = 0; m <= k; ++m) {
            std::vector<int> rest = J;
            rest.erase(rest.begin() + m);
            const int src = multi_index_position(n, rest);
            const auto deriv = omega.grid.derivative(omega.comps[src], J[m], order);
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            for (std::size_t p = 0; p < deriv.size(); ++p)
                out.comps[c][p] += sign * deriv[p];
        }
    }
    return out;
}

DiscreteForm contraction(const DiscreteForm& omega, const std::vector<std::vector<double>>& field)
{
    const int n = omega.dim();
    const int k = omega.degree;
    if (static_cast<int>(field.size()) != n)
        throw InputError("vector field needs one component per axis");
    if (k == 0)
        throw InputError("contraction of a 0-form");
    DiscreteForm out = DiscreteForm::zero(omega.grid, k - 1);
    const auto& sources = multi_indices(n, k);
    for (std::size_t c = 0; c < sources.size(); ++c) {
        const auto& I = sources[c];
        for (int j = 0; j < k; ++j) {
            std::vector<int> rest = I;
            rest.erase(rest.begin() + j);
            const int dst = multi_index_position(n, rest);
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            const auto& V = field[I[j]];
            for (std::size_t p = 0; p < omega.grid.size(); ++p)
                out.comps[dst][p] += sign * V[p] * omega.comps[c][p];
        }
    }
    return out;
}

ChartedDomain ChartedDomain::box(std::vector<double> lo, std::vector<double> hi, int points)
{
    ChartedDomain d;
    d.model = Model::EuclideanBox;
    const std::size_t n = lo.size();
    d.grid = Grid(std::move(lo), std::move(hi), std::vector<int>(n, points));
    d.active.assign(d.grid.size(), 1);
    return d;
}

ChartedDomain ChartedDomain::unit_ball(int n, int points)
{
    ChartedDomain d;
    d.model = Model::UnitBall;
    d.grid = Grid(std::vector<double>(n, -1.0), std::vector<double>(n, 1.0), std::vector<int>(n, points));
    d.active.assign(d.grid.size(), 0);
    double x[Grid::kMaxDim];
    for (std::size_t p = 0; p < d.grid.size(); ++p) {
        d.grid.point(p, x);
        double r2 = 0.0;
        for (int a = 0; a < n; ++a)
            r2 += x[a] * x[a];
        d.active[p] = r2 <= 1.0 + 1e-12;
    }
    return d;
}

ChartedDomain ChartedDomain::flat_torus(std::vector<double> periods, int points)
{
    ChartedDomain d;
    d.model = Model::FlatTorus;
    const std::size_t n = periods.size();
    d.grid = Grid(std::vector<double>(n, 0.0), std::move(periods), std::vector<int>(n, points),
                  std::vector<bool>(n, true));
    d.active.assign(d.grid.size(), 1);
    return d;
}

ChartedDomain ChartedDomain::half_plane(double x0, double x1, double y0, double y1, int points)
{
    if (!(y0 > 0.0))
        throw InputError("half-plane chart needs y > 0");
    ChartedDomain d;
    d.model = Model::HalfPlane;
    d.grid = Grid({x0, y0}, {x1, y1}, {points, points});
    d.active.assign(d.grid.size(), 1);
    d.metric = [](const double* x) {
        return Eigen::MatrixXd(Eigen::MatrixXd::Identity(2, 2) / (x[1] * x[1]));
    };
    return d;
}

Eigen::MatrixXd ChartedDomain::metric_at(const double* x) const
{
    if (!metric)
        return Eigen::MatrixXd::Identity(grid.dim(), grid.dim());
    return metric(x);
}

std::vector<double> ChartedDomain::volume_weights() const
{
    auto w = grid.quadrature_weights();
    double x[Grid::kMaxDim];
    for (std::size_t p = 0; p < w.size(); ++p) {
        if (!active.empty() && !active[p]) {
            w[p] = 0.0;
            continue;
        }
        if (metric) {
            grid.point(p, x);
            const double det = metric(x).determinant();
            if (!(det > 0.0))
                throw InputError("metric is not positive definite at a sample");
            w[p] *= std::sqrt(det);
        }
    }
    return w;
}

double pointwise_norm(const double* comps, int degree, int n, const Eigen::MatrixXd& g, int frames,
                      std::uint64_t seed)
{
    if (degree == 0)
        return std::abs(comps[0]);
    if (degree > n)
        return 0.0;
    if (degree == 1) {
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i)
            w[i] = comps[i];
        return std::sqrt(std::max(0.0, w.dot(g.ldlt().solve(w))));
    }
    if (degree == n)
        return std::abs(comps[0]) / std::sqrt(g.determinant());

    // g = L L^T; v = L^{-T} u maps Euclidean orthonormal u to g-orthonormal v.
    const Eigen::LLT<Eigen::MatrixXd> llt(g);
    const Eigen::MatrixXd Linv_t = llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
    auto value = [&](const Eigen::MatrixXd& U) { return std::abs(evaluate_on_frame(comps, degree, n, Linv_t * U)); };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    auto random_matrix = [&] {
        Eigen::MatrixXd A(n, degree);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < degree; ++j)
                A(i, j) = gauss(rng);
        return A;
    };
    Eigen::MatrixXd best = orthonormal_columns(random_matrix());
    double best_value = value(best);
    for (int f = 1; f < frames; ++f) {
        Eigen::MatrixXd U = orthonormal_columns(random_matrix());
        const double v = value(U);
        if (v > best_value) {
            best_value = v;
            best = U;
        }
    }
    double step = 0.1;
    int failures = 0;
    while (step > 1e-10) {
        Eigen::MatrixXd U = orthonormal_columns(best + step * random_matrix());
        const double v = value(U);
        if (v > best_value) {
            best_value = v;
            best = U;
            failures = 0;
        } else if (++failures >= 20) {
            step *= 0.5;
            failures = 0;
        }
    }
    return best_value;
}

std::vector<double> pointwise_norms(const DiscreteForm& omega, const ChartedDomain& domain)
{
    if (!omega.grid.same_layout(domain.grid))
        throw InputError("form and domain use different grids");
    const int n = omega.dim();
    const int k = omega.degree;
    // Middle degrees sample fewer frames per point; local refinement recovers the optimum.
    const int frames = (k == 0 || k == 1 || k == n) ? 1 : 256;
    std::vector<double> out(omega.grid.size(), 0.0);
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t p = 0; p < N; ++p) {
        if (!domain.active.empty() && !domain.active[p])
            continue;
        double x[Grid::kMaxDim];
        double c[8];
        omega.grid.point(static_cast<std::size_t>(p), x);
        omega.at(static_cast<std::size_t>(p), c);
        out[p] = pointwise_norm(c, k, n, domain.metric_at(x), frames, static_cast<std::uint64_t>(p) + 1);
    }
    return out;
}

double form_norm(const YoungFunction& phi, const DiscreteForm& omega, const ChartedDomain& domain, double tol)
{
    const auto norms = pointwise_norms(omega, domain);
    const auto weights = domain.volume_weights();
    std::vector<double> values;
    std::vector<double> w;
    for (std::size_t p = 0; p < norms.size(); ++p)
        if (weights[p] > 0.0) {
            values.push_back(norms[p]);
            w.push_back(weights[p]);
        }
    return luxemburg_norm(phi, values, MeasureSpace::weighted(w), tol).value;
}

DiscreteForm cone_homotopy(const DiscreteForm& omega, std::span<const double> x, int t_nodes)
{
    const Grid& grid = omega.grid;
    const int n = grid.dim();
    const int k = omega.degree;
    if (k < 1)
        throw InputError("cone homotopy needs degree >= 1");
    if (static_cast<int>(x.size()) != n)
        throw InputError("cone point has the wrong dimension");
    for (int a = 0; a < n; ++a)
        if (grid.periodic(a))
            throw InputError("cone homotopy needs a closed (convex) grid");
    if (!inside_box(grid, x))
        throw InputError("cone point lies outside the domain");

    const Rule1D rule = gauss_legendre(t_nodes, 0.0, 1.0);
    const auto& sources = multi_indices(n, k);
    std::vector<std::vector<std::pair<int, int>>> drop(sources.size()); // (target component, dropped axis) per j
    for (std::size_t c = 0; c < sources.size(); ++c)
        for (int j = 0; j < k; ++j) {
            std::vector<int> rest = sources[c];
            rest.erase(rest.begin() + j);
            drop[c].push_back({multi_index_position(n, rest), sources[c][j]});
        }

    DiscreteForm out = DiscreteForm::zero(grid, k - 1);
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < N; ++p) {
        double y[Grid::kMaxDim], z[Grid::kMaxDim];
        double vals[8], acc[8] = {};
        grid.point(static_cast<std::size_t>(p), y);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = rule.nodes[q];
            for (int a = 0; a < n; ++a)
                z[a] = x[a] + t * (y[a] - x[a]);
            omega.eval(z, vals);
            const double w = rule.weights[q] * std::pow(t, k - 1);
            for (std::size_t c = 0; c < sources.size(); ++c)
                acc[c] += w * vals[c];
        }
        for (std::size_t c = 0; c < sources.size(); ++c)
            for (int j = 0; j < k; ++j) {
                const auto [dst, axis] = drop[c][j];
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                out.comps[dst][p] += sign * (y[axis] - x[axis]) * acc[c];
            }
    }
    return out;
}

DiscreteForm cone_homotopy(const DiscreteForm& omega, const ChartedDomain& domain, std::span<const double> x,
                           int t_nodes)
{
    if (domain.model == Model::UnitBall) {
        double r2 = 0.0;
        for (double v : x)
            r2 += v * v;
        if (r2 > 1.0 + 1e-12)
            throw InputError("cone point lies outside the unit ball");
    }
    return cone_homotopy(omega, x, t_nodes);
}

AveragingBody AveragingBody::unit_ball(int n)
{
    return {Shape::Ball, std::vector<double>(n, 0.0), {1.0}};
}

AveragingBody AveragingBody::box(const std::vector<double>& lo, const std::vector<double>& hi)
{
    AveragingBody b;
    b.shape = Shape::Box;
    for (std::size_t a = 0; a < lo.size(); ++a) {
        b.center.push_back(0.5 * (lo[a] + hi[a]));
        b.radii.push_back(0.5 * (hi[a] - lo[a]));
    }
    return b;
}

PointRule half_body_rule(const AveragingBody& body, const PoincareOptions& options)
{
    if (body.radii.empty())
        throw InputError("averaging body without radii");
    if (body.shape == AveragingBody::Shape::Ball)
        return ball_rule(body.center, 0.5 * body.radii[0], options.radial, options.angular);
    std::vector<double> lo, hi;
    for (std::size_t a = 0; a < body.center.size(); ++a) {
        lo.push_back(body.center[a] - 0.5 * body.radii[a]);
        hi.push_back(body.center[a] + 0.5 * body.radii[a]);
    }
    return tensor_rule(lo, hi, options.per_axis);
}

DiscreteForm poincare_homotopy(const DiscreteForm& omega, const AveragingBody& body, const PoincareOptions& options)
{
    const Grid& grid = omega.grid;
    const int n = grid.dim();
    const int k = omega.degree;
    if (k < 1)
        throw InputError("poincare_homotopy needs degree >= 1; use poincare_mean for functions");
    for (int a = 0; a < n; ++a)
        if (grid.periodic(a))
            throw InputError("Poincare homotopy needs a closed (convex) grid");
    const PointRule centers = half_body_rule(body, options);
    for (std::size_t q = 0; q < centers.size(); ++q)
        if (!inside_box(grid, {centers.point(q), static_cast<std::size_t>(n)}))
            throw InputError("half body leaves the sampled domain");
    const double total = centers.total_weight();
    const Rule1D rule = gauss_legendre(options.t_nodes, 0.0, 1.0);
    std::vector<double> tw(rule.nodes.size());
    for (std::size_t q = 0; q < tw.size(); ++q)
        tw[q] = rule.weights[q] * std::pow(rule.nodes[q], k - 1);

    const auto& sources = multi_indices(n, k);
    std::vector<std::vector<std::pair<int, int>>> drop(sources.size());
    for (std::size_t c = 0; c < sources.size(); ++c)
        for (int j = 0; j < k; ++j) {
            std::vector<int> rest = sources[c];
            rest.erase(rest.begin() + j);
            drop[c].push_back({multi_index_position(n, rest), sources[c][j]});
        }

    DiscreteForm out = DiscreteForm::zero(grid, k - 1);
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < N; ++p) {
        double y[Grid::kMaxDim], z[Grid::kMaxDim];
        double vals[8];
        double res[8] = {};
        grid.point(static_cast<std::size_t>(p), y);
        for (std::size_t s = 0; s < centers.size(); ++s) {
            const double* x = centers.point(s);
            double acc[8] = {};
            for (std::size_t q = 0; q < tw.size(); ++q) {
                const double t = rule.nodes[q];
                for (int a = 0; a < n; ++a)
                    z[a] = x[a] + t * (y[a] - x[a]);
                omega.eval(z, vals);
                for (std::size_t c = 0; c < sources.size(); ++c)
                    acc[c] += tw[q] * vals[c];
            }
            const double w = centers.weights[s] / total;
            for (std::size_t c = 0; c < sources.size(); ++c)
                for (int j = 0; j < k; ++j) {
                    const auto [dst, axis] = drop[c][j];
                    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                    res[dst] += w * sign * (y[axis] - x[axis]) * acc[c];
                }
        }
        for (int c = 0; c < out.components(); ++c)
            out.comps[c][p] = res[c];
    }
    return out;
}

double poincare_mean(const DiscreteForm& f, const AveragingBody& body, const PoincareOptions& options)
{
    if (f.degree != 0)
        throw InputError("poincare_mean needs a function");
    const PointRule centers = half_body_rule(body, options);
    double sum = 0.0;
    for (std::size_t s = 0; s < centers.size(); ++s)
        sum += centers.weights[s] * f.grid.interpolate(f.comps[0], centers.point(s));
    return sum / centers.total_weight();
}

double homotopy_residual(const DiscreteForm& omega, const AveragingBody& body, std::span<const char> mask,
                         const PoincareOptions& options, int fd_order)
{
    const int n = omega.dim();
    if (omega.degree == 0) {
        DiscreteForm r = poincare_homotopy(exterior_derivative(omega, fd_order), body, options);
        const double mean = poincare_mean(omega, body, options);
        for (std::size_t p = 0; p < r.comps[0].size(); ++p)
            r.comps[0][p] += mean - omega.comps[0][p];
        return sup_norm(r, mask);
    }
    DiscreteForm r = exterior_derivative(poincare_homotopy(omega, body, options), fd_order);
    if (omega.degree < n)
        r += poincare_homotopy(exterior_derivative(omega, fd_order), body, options);
    r -= omega;
    return sup_norm(r, mask);
}

namespace {

void jacobian_at(const ChartMap& f, const double* x, int n, double* jac)
{
    if (f.jacobian) {
        f.jacobian(x, jac);
        return;
    }
    const double h = 1e-6;
    double xp[Grid::kMaxDim], xm[Grid::kMaxDim], fp[Grid::kMaxDim], fm[Grid::kMaxDim];
    for (int b = 0; b < n; ++b) {
        std::copy(x, x + n, xp);
        std::copy(x, x + n, xm);
        xp[b] += h;
        xm[b] -= h;
        f.map(xp, fp);
        f.map(xm, fm);
        for (int a = 0; a < n; ++a)
            jac[a * n + b] = (fp[a] - fm[a]) / (2.0 * h);
    }
}

struct PulledSample {
    double pulled[8];
    double target[8];
    double abs_det = 0.0;
    double lipschitz = 1.0;
};

PulledSample pull_at(const ChartMap& f, const FormFunction& omega, int k, int n, const double* x)
{
    PulledSample s;
    double fx[Grid::kMaxDim], jac[Grid::kMaxDim * Grid::kMaxDim];
    f.map(x, fx);
    jacobian_at(f, x, n, jac);
    Eigen::MatrixXd J(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            J(a, b) = jac[a * n + b];
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    const double smin = sv[n - 1];
    if (!(smin > 1e-12 * std::max(1.0, sv[0])))
        throw InputError("chart map has a singular differential at a sample");
    s.abs_det = std::abs(J.determinant());
    s.lipschitz = std::max(sv[0], 1.0 / smin);

    omega(fx, s.target);
    const auto& idx = multi_indices(n, k);
    double sub[9];
    for (std::size_t ci = 0; ci < idx.size(); ++ci) {
        double v = 0.0;
        for (std::size_t cj = 0; cj < idx.size(); ++cj) {
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c)
                    sub[r * k + c] = J(idx[cj][r], idx[ci][c]);
            v += s.target[cj] * det_small(sub, k, k);
        }
        s.pulled[ci] = v;
    }
    return s;
}

} // namespace

DiscreteForm pullback_form(const ChartMap& f, const FormFunction& omega, int degree, const Grid& source)
{
    const int n = source.dim();
    if (degree < 0 || degree > n)
        throw InputError("form degree out of range");
    DiscreteForm out = DiscreteForm::zero(source, degree);
    double x[Grid::kMaxDim];
    for (std::size_t p = 0; p < source.size(); ++p) {
        source.point(p, x);
        const PulledSample s = pull_at(f, omega, degree, n, x);
        for (int c = 0; c < out.components(); ++c)
            out.comps[c][p] = s.pulled[c];
    }
    return out;
}

ChartPullbackReport chart_pullback(const YoungFunction& phi, const ChartMap& f, const FormFunction& omega,
                                   int degree, const ChartedDomain& M, double tol)
{
    const int n = M.grid.dim();
    if (degree < 0 || degree > n)
        throw InputError("form degree out of range");
    if (M.metric)
        throw InputError("chart_pullback expects Euclidean charts on both sides");
    ChartPullbackReport r;
    r.pulled = DiscreteForm::zero(M.grid, degree);
    const auto base = M.volume_weights();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    std::vector<double> pulled_norm, target_norm, w_source, w_target;
    double x[Grid::kMaxDim];
    for (std::size_t p = 0; p < M.grid.size(); ++p) {
        M.grid.point(p, x);
        const PulledSample s = pull_at(f, omega, degree, n, x);
        for (int c = 0; c < r.pulled.components(); ++c)
            r.pulled.comps[c][p] = s.pulled[c];
        if (!(base[p] > 0.0))
            continue;
        r.lipschitz = std::max(r.lipschitz, s.lipschitz);
        pulled_norm.push_back(pointwise_norm(s.pulled, degree, n, I, 256, p + 1));
        target_norm.push_back(pointwise_norm(s.target, degree, n, I, 256, p + 1));
        w_source.push_back(base[p]);
        w_target.push_back(base[p] * s.abs_det);
    }
    r.norm_pulled = luxemburg_norm(phi, pulled_norm, MeasureSpace::weighted(w_source), tol).value;
    r.norm_target = luxemburg_norm(phi, target_norm, MeasureSpace::weighted(w_target), tol).value;
    if (r.norm_target == 0.0) {
        r.ratio = 0.0;
        r.constant = std::pow(r.lipschitz, degree);
        r.holds = r.norm_pulled == 0.0;
        return r;
    }
    // ||omega||_{L^n phi} is the phi-norm against L^n times the measure.
    const double Ln = std::pow(r.lipschitz, n);
    std::vector<double> w_scaled = w_target;
    for (double& v : w_scaled)
        v *= Ln;
    const double scaled = luxemburg_norm(phi, target_norm, MeasureSpace::weighted(w_scaled), tol).value;
    r.ratio = r.norm_pulled / r.norm_target;
    r.constant = std::pow(r.lipschitz, degree) * scaled / r.norm_target;
    r.holds = r.ratio <= r.constant * (1.0 + 10.0 * tol) + 1e-12;
    return r;
}

} // namespace orlicz
