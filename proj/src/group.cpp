#include "orlicz/group.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "orlicz/errors.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/measure.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

namespace {

/// expm1(v) / v with the removable singularity filled in.
double expm1_ratio(double v) { return std::abs(v) < 1e-12 ? 1.0 + 0.5 * v : std::expm1(v) / v; }

} // namespace

GroupModel GroupModel::abelian(int n)
{
    if (n < 1 || n > Grid::kMaxDim)
        throw InputError("abelian model needs dimension 1..3");
    GroupModel G;
    G.kind_ = GroupKind::Abelian;
    G.n_ = n;
    return G;
}

GroupModel GroupModel::affine_half_plane()
{
    GroupModel G;
    G.kind_ = GroupKind::AffineHalfPlane;
    G.n_ = 2;
    return G;
}

std::vector<double> GroupModel::identity() const
{
    std::vector<double> e(n_, 0.0);
    if (kind_ == GroupKind::AffineHalfPlane)
        e[1] = 1.0;
    return e;
}

void GroupModel::multiply(const double* g, const double* h, double* out) const
{
    if (kind_ == GroupKind::Abelian) {
        for (int i = 0; i < n_; ++i)
            out[i] = g[i] + h[i];
        return;
    }
    const double a = g[0] + g[1] * h[0];
    const double b = g[1] * h[1];
    out[0] = a;
    out[1] = b;
}

void GroupModel::inverse(const double* g, double* out) const
{
    if (kind_ == GroupKind::Abelian) {
        for (int i = 0; i < n_; ++i)
            out[i] = -g[i];
        return;
    }
    if (!(g[1] > 0.0))
        throw ModelError("affine element needs b > 0");
    const double b = g[1];
    out[0] = -g[0] / b;
    out[1] = 1.0 / b;
}

void GroupModel::exp(const double* Z, double* out) const
{
    if (kind_ == GroupKind::Abelian) {
        for (int i = 0; i < n_; ++i)
            out[i] = Z[i];
        return;
    }
    out[0] = Z[0] * expm1_ratio(Z[1]);
    out[1] = std::exp(Z[1]);
}

void GroupModel::log(const double* z, double* Z) const
{
    if (kind_ == GroupKind::Abelian) {
        for (int i = 0; i < n_; ++i)
            Z[i] = z[i];
        return;
    }
    if (!(z[1] > 0.0) || !std::isfinite(z[0]) || !std::isfinite(z[1]))
        throw ModelError("no logarithm off the half-plane");
    const double v = std::log(z[1]);
    Z[0] = z[0] / expm1_ratio(v);
    Z[1] = v;
}

Eigen::MatrixXd GroupModel::metric(const double* x) const
{
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n_, n_);
    if (kind_ == GroupKind::AffineHalfPlane)
        g /= x[1] * x[1];
    return g;
}

double GroupModel::volume_density(const double* x) const
{
    return kind_ == GroupKind::Abelian ? 1.0 : 1.0 / (x[1] * x[1]);
}

double GroupModel::haar_density_exp(const double* Z) const
{
    if (kind_ == GroupKind::Abelian)
        return 1.0;
    // |det D exp| = e^v (e^v - 1) / v, volume density e^{-2v}.
    return expm1_ratio(Z[1]) * std::exp(-Z[1]);
}

Eigen::MatrixXd GroupModel::right_differential(const double* z) const
{
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n_, n_);
    if (kind_ == GroupKind::AffineHalfPlane) {
        D(0, 1) = z[0];
        D(1, 1) = z[1];
    }
    return D;
}

double GroupModel::right_translation_norm(const double* z) const
{
    const auto e = identity();
    const Eigen::MatrixXd Le = metric(e.data()).llt().matrixL();
    const Eigen::MatrixXd Lz = metric(z).llt().matrixL();
    const Eigen::MatrixXd A = Lz.transpose() * right_differential(z) * Le.transpose().inverse();
    return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
}

void GroupModel::left_invariant_field(const double* Z, const double* x, double* out) const
{
    const double s = kind_ == GroupKind::Abelian ? 1.0 : x[1];
    for (int i = 0; i < n_; ++i)
        out[i] = s * Z[i];
}

ChartedDomain GroupModel::domain(const Grid& grid) const
{
    if (grid.dim() != n_)
        throw InputError("grid dimension differs from the group");
    ChartedDomain d;
    d.grid = grid;
    d.active.assign(grid.size(), 1);
    if (kind_ == GroupKind::Abelian) {
        d.model = Model::AbelianGroup;
        return d;
    }
    if (!(grid.lo(1) > 0.0) || grid.periodic(0) || grid.periodic(1))
        throw InputError("half-plane grid must be closed and lie in y > 0");
    d.model = Model::HalfPlane;
    d.metric = [G = *this](const double* x) { return G.metric(x); };
    return d;
}

// ---------------------------------------------------------------- kernel

namespace {

double profile(const KernelSpec& spec, const double* Z, int n)
{
    double v = 1.0;
    for (int i = 0; i < n; ++i) {
        const double t = Z[i] / spec.radius;
        if (std::abs(t) >= 1.0)
            return 0.0;
        v *= std::exp(-spec.sharpness / (1.0 - t * t));
    }
    return v;
}

/// Visits the tensor points of a 1D node list in n dimensions.
template <class F>
void tensor_for_each(int n, std::size_t m, F&& f)
{
    std::size_t total = 1;
    for (int i = 0; i < n; ++i)
        total *= m;
    std::size_t idx[Grid::kMaxDim];
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rem = c;
        for (int i = 0; i < n; ++i) {
            idx[i] = rem % m;
            rem /= m;
        }
        f(idx);
    }
}

} // namespace

Kernel Kernel::build(const GroupModel& G, const KernelSpec& spec)
{
    if (!(spec.radius > 0.0) || !(spec.sharpness > 0.0) || spec.nodes < 2)
        throw InputError("kernel needs positive radius and sharpness and at least 2 nodes");
    Kernel K;
    K.group_ = G;
    K.spec_ = spec;
    const int n = G.dim();
    const double r = spec.radius;
    const Rule1D rule = gauss_legendre(spec.nodes, -r, r);

    double total = 0.0;
    tensor_for_each(n, rule.nodes.size(), [&](const std::size_t* idx) {
        Node node;
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            node.Z[i] = rule.nodes[idx[i]];
            w *= rule.weights[idx[i]];
        }
        G.exp(node.Z.data(), node.z.data());
        node.weight = w * G.haar_density_exp(node.Z.data()) * profile(spec, node.Z.data(), n);
        total += node.weight;
        if (node.weight > 0.0)
            K.nodes_.push_back(node);
    });
    K.scale_ = 1.0 / total;
    for (auto& node : K.nodes_)
        node.weight *= K.scale_;

    // exp maps the box |u|, |v| <= r onto |a| <= e^r - 1, e^-r <= b <= e^r.
    K.support_lo_.assign(n, -r);
    K.support_hi_.assign(n, r);
    if (G.kind() == GroupKind::AffineHalfPlane) {
        K.support_lo_ = {-std::expm1(r), std::exp(-r)};
        K.support_hi_ = {std::expm1(r), std::exp(r)};
    }

    // Measured over a fine lattice of the support box together with the nodes.
    const int fine = 101;
    const auto e = G.identity();
    const double vol_e = G.volume_density(e.data());
    K.translation_bound_ = 0.0;
    K.jacobian_min_ = std::numeric_limits<double>::infinity();
    K.jacobian_max_ = 0.0;
    auto visit = [&](const double* Z) {
        double z[Grid::kMaxDim];
        G.exp(Z, z);
        K.translation_bound_ = std::max(K.translation_bound_, G.right_translation_norm(z));
        const double jac = std::abs(G.right_differential(z).determinant()) * G.volume_density(z) / vol_e;
        K.jacobian_min_ = std::min(K.jacobian_min_, jac);
        K.jacobian_max_ = std::max(K.jacobian_max_, jac);
    };
    tensor_for_each(n, fine, [&](const std::size_t* idx) {
        double Z[Grid::kMaxDim];
        for (int i = 0; i < n; ++i)
            Z[i] = -r + 2.0 * r * static_cast<double>(idx[i]) / (fine - 1);
        visit(Z);
    });
    for (const auto& node : K.nodes_)
        visit(node.Z.data());
    return K;
}

double Kernel::value_exp(const double* Z) const { return scale_ * profile(spec_, Z, group_.dim()); }

double Kernel::value(const double* z) const
{
    double Z[Grid::kMaxDim];
    try {
        group_.log(z, Z);
    } catch (const ModelError&) {
        return 0.0;
    }
    return value_exp(Z);
}

double Kernel::mass() const
{
    double m = 0.0;
    for (const auto& node : nodes_)
        m += node.weight;
    return m;
}

// ---------------------------------------------------------------- regions

namespace {

void check_group_grid(const Kernel& kappa, const Grid& grid)
{
    if (grid.dim() != kappa.group().dim())
        throw InputError("form and group have different dimensions");
}

/// True when x.z stays in the sampled box for every z in the support bounding box.
bool enlarged_inside(const Kernel& kappa, const Grid& grid, const double* x)
{
    const GroupModel& G = kappa.group();
    const int n = G.dim();
    const auto& lo = kappa.support_lo();
    const auto& hi = kappa.support_hi();
    // x.z is affine in z for fixed x, so corners of the support box bound it.
    for (int c = 0; c < (1 << n); ++c) {
        double z[Grid::kMaxDim], y[Grid::kMaxDim];
        for (int i = 0; i < n; ++i)
            z[i] = (c >> i) & 1 ? hi[i] : lo[i];
        G.multiply(x, z, y);
        for (int a = 0; a < n; ++a) {
            if (grid.periodic(a))
                continue;
            const double slack = 1e-12 * grid.spacing(a);
            if (y[a] < grid.lo(a) - slack || y[a] > grid.hi(a) + slack)
                return false;
        }
    }
    return true;
}

std::size_t count(const std::vector<char>& mask) { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }

/// minors[I][J] = det D[J rows, I cols] for increasing k-subsets, so (D^* w)_I = sum_J minors[I][J] w_J.
std::vector<double> pullback_minors(const Eigen::MatrixXd& D, int k)
{
    const int n = static_cast<int>(D.rows());
    const auto& idx = multi_indices(n, k);
    const std::size_t C = idx.size();
    std::vector<double> m(C * C, 1.0);
    if (k == 0)
        return m;
    Eigen::MatrixXd sub(k, k);
    for (std::size_t I = 0; I < C; ++I)
        for (std::size_t J = 0; J < C; ++J) {
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s)
                    sub(r, s) = D(idx[J][r], idx[I][s]);
            m[I * C + J] = sub.determinant();
        }
    return m;
}

void check_batch(const std::vector<DiscreteForm>& forms, const Kernel& kappa)
{
    if (forms.empty())
        throw InputError("no forms given");
    for (const auto& f : forms) {
        check_group_grid(kappa, f.grid);
        if (!f.grid.same_layout(forms.front().grid) || f.degree != forms.front().degree)
            throw InputError("batched forms need one grid and one degree");
    }
}

std::vector<ConvolutionResult> convolve_on(const std::vector<DiscreteForm>& forms, const Kernel& kappa,
                                           const std::vector<char>& valid)
{
    const Grid& grid = forms.front().grid;
    const GroupModel& G = kappa.group();
    const int k = forms.front().degree;
    const int C = forms.front().components();
    const bool identity_pullback = G.kind() == GroupKind::Abelian;
    const auto& nodes = kappa.nodes();
    std::vector<std::vector<double>> minors(nodes.size());
    for (std::size_t q = 0; q < nodes.size(); ++q)
        minors[q] = pullback_minors(G.right_differential(nodes[q].z.data()), k);

    const std::size_t F = forms.size();
    std::vector<ConvolutionResult> out(F);
    for (auto& r : out) {
        r.form = DiscreteForm::zero(grid, k);
        r.valid = valid;
        r.valid_count = count(valid);
    }
    const std::ptrdiff_t P = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel
    {
        Grid::Stencil s;
        std::vector<double> acc(F * C), v(C);
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t p = 0; p < P; ++p) {
            if (!valid[p])
                continue;
            double x[Grid::kMaxDim], y[Grid::kMaxDim];
            grid.point(static_cast<std::size_t>(p), x);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                G.multiply(x, nodes[q].z.data(), y);
                grid.stencil(y, s);
                const double w = nodes[q].weight;
                for (std::size_t f = 0; f < F; ++f) {
                    for (int c = 0; c < C; ++c) {
                        const double* data = forms[f].comps[c].data();
                        double sum = 0.0;
                        for (int j = 0; j < s.count; ++j)
                            sum += s.weight[j] * data[s.index[j]];
                        v[c] = sum;
                    }
                    double* a = &acc[f * C];
                    if (identity_pullback) {
                        for (int c = 0; c < C; ++c)
                            a[c] += w * v[c];
                    } else {
                        const double* M = minors[q].data();
                        for (int I = 0; I < C; ++I) {
                            double sum = 0.0;
                            for (int J = 0; J < C; ++J)
                                sum += M[I * C + J] * v[J];
                            a[I] += w * sum;
                        }
                    }
                }
            }
            for (std::size_t f = 0; f < F; ++f)
                for (int c = 0; c < C; ++c)
                    out[f].form.comps[c][p] = acc[f * C + c];
        }
    }
    return out;
}

} // namespace

std::vector<char> convolution_region(const Kernel& kappa, const Grid& grid)
{
    check_group_grid(kappa, grid);
    std::vector<char> mask(grid.size(), 0);
    double x[Grid::kMaxDim];
    for (std::size_t p = 0; p < grid.size(); ++p) {
        grid.point(p, x);
        mask[p] = enlarged_inside(kappa, grid, x);
    }
    return mask;
}

std::vector<char> erode(const Grid& grid, std::span<const char> mask, int width)
{
    std::vector<char> out(mask.begin(), mask.end());
    int m[Grid::kMaxDim];
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (!mask[p])
            continue;
        grid.multi_index(p, m);
        bool keep = true;
        for (int a = 0; a < grid.dim() && keep; ++a)
            for (int o = -width; o <= width && keep; ++o) {
                int mm[Grid::kMaxDim];
                std::copy(m, m + grid.dim(), mm);
                mm[a] += o;
                if (grid.periodic(a))
                    mm[a] = ((mm[a] % grid.points(a)) + grid.points(a)) % grid.points(a);
                else if (mm[a] < 0 || mm[a] >= grid.points(a))
                    continue; // one-sided stencils at closed ends stay inside
                keep = mask[grid.flat_index(mm)] != 0;
            }
        out[p] = keep;
    }
    return out;
}

std::vector<ConvolutionResult> convolve_many(const std::vector<DiscreteForm>& forms, const Kernel& kappa)
{
    check_batch(forms, kappa);
    auto valid = convolution_region(kappa, forms.front().grid);
    if (count(valid) == 0)
        throw RegionError("kernel support is too wide for the sampled region");
    return convolve_on(forms, kappa, valid);
}

ConvolutionResult convolve(const DiscreteForm& omega, const Kernel& kappa)
{
    return std::move(convolve_many({omega}, kappa).front());
}

ConvolutionResult convolve(const DiscreteForm& omega, const Kernel& kappa, std::span<const double> region_lo,
                           std::span<const double> region_hi)
{
    check_group_grid(kappa, omega.grid);
    const Grid& grid = omega.grid;
    const int n = grid.dim();
    if (static_cast<int>(region_lo.size()) != n || static_cast<int>(region_hi.size()) != n)
        throw InputError("region corners need one coordinate per axis");
    // Region corners times support corners bound the enlargement (x.z is bilinear).
    for (int c = 0; c < (1 << n); ++c) {
        double x[Grid::kMaxDim];
        for (int i = 0; i < n; ++i)
            x[i] = (c >> i) & 1 ? region_hi[i] : region_lo[i];
        if (!enlarged_inside(kappa, grid, x))
            throw RegionError("region enlarged by the kernel support leaves the samples");
    }
    std::vector<char> valid(grid.size(), 0);
    double x[Grid::kMaxDim];
    for (std::size_t p = 0; p < grid.size(); ++p) {
        grid.point(p, x);
        bool in = true;
        for (int a = 0; a < n; ++a)
            in = in && x[a] >= region_lo[a] - 1e-12 && x[a] <= region_hi[a] + 1e-12;
        valid[p] = in;
    }
    if (count(valid) == 0)
        throw RegionError("requested region contains no samples");
    return std::move(convolve_on({omega}, kappa, valid).front());
}

// ---------------------------------------------------------------- flow homotopy

std::vector<ConvolutionResult> flow_homotopy_many(const std::vector<DiscreteForm>& forms, const Kernel& kappa,
                                                  const HomotopyOptions& options)
{
    check_batch(forms, kappa);
    const int k = forms.front().degree;
    if (k < 1)
        throw InputError("flow homotopy needs degree >= 1");
    if (options.t_nodes < 1)
        throw InputError("flow homotopy needs at least one t node");
    const Grid& grid = forms.front().grid;
    const GroupModel& G = kappa.group();
    const int n = grid.dim();
    const auto valid = convolution_region(kappa, grid);
    if (count(valid) == 0)
        throw RegionError("kernel support is too wide for the sampled region");

    const auto& src = multi_indices(n, k);
    const int C = static_cast<int>(src.size());
    const int Cout = static_cast<int>(multi_indices(n, k - 1).size());
    std::vector<std::vector<std::pair<int, int>>> contract(C); // (target, sign * axis+1)
    for (int c = 0; c < C; ++c)
        for (int j = 0; j < k; ++j) {
            std::vector<int> rest = src[c];
            rest.erase(rest.begin() + j);
            const int sign = j % 2 == 0 ? 1 : -1;
            contract[c].push_back({multi_index_position(n, rest), sign * (src[c][j] + 1)});
        }

    // Sample nodes (Z, t): the element exp(tZ), its pullback minors and the weight.
    const Rule1D trule = gauss_legendre(options.t_nodes, 0.0, 1.0);
    struct PathNode {
        std::array<double, 3> Z{};
        std::array<double, 3> zt{};
        double weight;
        std::vector<double> minors;
    };
    std::vector<PathNode> path;
    for (const auto& node : kappa.nodes()) {
        for (std::size_t t = 0; t < trule.nodes.size(); ++t) {
            PathNode pn;
            pn.Z = node.Z;
            double tZ[Grid::kMaxDim];
            for (int i = 0; i < n; ++i)
                tZ[i] = trule.nodes[t] * node.Z[i];
            G.exp(tZ, pn.zt.data());
            pn.weight = -node.weight * trule.weights[t];
            pn.minors = pullback_minors(G.right_differential(pn.zt.data()), k - 1);
            path.push_back(std::move(pn));
        }
    }
    const bool identity_pullback = G.kind() == GroupKind::Abelian;

    const std::size_t F = forms.size();
    std::vector<ConvolutionResult> out(F);
    for (auto& r : out) {
        r.form = DiscreteForm::zero(grid, k - 1);
        r.valid = valid;
        r.valid_count = count(valid);
    }
    const std::ptrdiff_t P = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel
    {
        Grid::Stencil s;
        std::vector<double> acc(F * Cout), v(C), c1(Cout);
#pragma omp for schedule(dynamic, 16)
        for (std::ptrdiff_t p = 0; p < P; ++p) {
            if (!valid[p])
                continue;
            double x[Grid::kMaxDim], y[Grid::kMaxDim], field[Grid::kMaxDim];
            grid.point(static_cast<std::size_t>(p), x);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (const auto& pn : path) {
                G.multiply(x, pn.zt.data(), y);
                G.left_invariant_field(pn.Z.data(), y, field);
                grid.stencil(y, s);
                for (std::size_t f = 0; f < F; ++f) {
                    for (int c = 0; c < C; ++c) {
                        const double* data = forms[f].comps[c].data();
                        double sum = 0.0;
                        for (int j = 0; j < s.count; ++j)
                            sum += s.weight[j] * data[s.index[j]];
                        v[c] = sum;
                    }
                    std::fill(c1.begin(), c1.end(), 0.0);
                    for (int c = 0; c < C; ++c)
                        for (const auto& [dst, sa] : contract[c])
                            c1[dst] += (sa > 0 ? 1.0 : -1.0) * field[std::abs(sa) - 1] * v[c];
                    double* a = &acc[f * Cout];
                    if (identity_pullback) {
                        for (int I = 0; I < Cout; ++I)
                            a[I] += pn.weight * c1[I];
                    } else {
                        const double* M = pn.minors.data();
                        for (int I = 0; I < Cout; ++I) {
                            double sum = 0.0;
                            for (int J = 0; J < Cout; ++J)
                                sum += M[I * Cout + J] * c1[J];
                            a[I] += pn.weight * sum;
                        }
                    }
                }
            }
            for (std::size_t f = 0; f < F; ++f)
                for (int c = 0; c < Cout; ++c)
                    out[f].form.comps[c][p] = acc[f * Cout + c];
        }
    }
    return out;
}

ConvolutionResult flow_homotopy(const DiscreteForm& omega, const Kernel& kappa, const HomotopyOptions& options)
{
    return std::move(flow_homotopy_many({omega}, kappa, options).front());
}

// ---------------------------------------------------------------- checks

namespace {

double masked_sup_difference(const DiscreteForm& a, const DiscreteForm& b, const std::vector<char>& mask)
{
    double m = 0.0;
    for (std::size_t c = 0; c < a.comps.size(); ++c)
        for (std::size_t p = 0; p < mask.size(); ++p)
            if (mask[p])
                m = std::max(m, std::abs(a.comps[c][p] - b.comps[c][p]));
    return m;
}

double masked_norm(const YoungFunction& phi, const std::vector<double>& pointwise, const std::vector<double>& weights,
                   const std::vector<char>& mask)
{
    std::vector<double> values, w;
    for (std::size_t p = 0; p < mask.size(); ++p)
        if (mask[p] && weights[p] > 0.0) {
            values.push_back(pointwise[p]);
            w.push_back(weights[p]);
        }
    if (values.empty())
        return 0.0;
    return luxemburg_norm(phi, values, MeasureSpace::weighted(w)).value;
}

double norm_on(const YoungFunction& phi, const DiscreteForm& omega, ChartedDomain domain, const std::vector<char>& mask)
{
    domain.active = mask;
    return form_norm(phi, omega, domain);
}

} // namespace

CommutationReport derivative_commutation_check(const DiscreteForm& omega, const Kernel& kappa, int fd_order)
{
    const DiscreteForm domega = exterior_derivative(omega, fd_order);
    CommutationReport r;
    if (domega.components() == 0)
        return r; // top degree: both sides vanish
    const auto lhs_in = convolve(omega, kappa);
    const DiscreteForm lhs = exterior_derivative(lhs_in.form, fd_order);
    const auto rhs = convolve(domega, kappa);
    const auto mask = erode(omega.grid, lhs_in.valid, fd_order / 2);
    r.samples = count(mask);
    r.residual = masked_sup_difference(lhs, rhs.form, mask);
    r.magnitude = sup_norm(rhs.form, mask);
    return r;
}

double piecewise_norm(const YoungFunction& phi, const DiscreteForm& omega, const ChartedDomain& domain, int tiles,
                      int fd_order)
{
    if (tiles < 1)
        throw InputError("piecewise norm needs at least one tile per axis");
    const Grid& grid = omega.grid;
    const int n = grid.dim();
    const auto weights = domain.volume_weights();
    const auto norms = pointwise_norms(omega, domain);
    const DiscreteForm domega = exterior_derivative(omega, fd_order);
    std::vector<double> dnorms(grid.size(), 0.0);
    if (domega.components() > 0)
        dnorms = pointwise_norms(domega, domain);

    std::size_t total = 1;
    for (int a = 0; a < n; ++a)
        total *= static_cast<std::size_t>(tiles);
    std::vector<std::vector<char>> tile_masks(total, std::vector<char>(grid.size(), 0));
    std::vector<char> used(total, 0);
    int m[Grid::kMaxDim];
    for (std::size_t p = 0; p < grid.size(); ++p) {
        if (!domain.active.empty() && !domain.active[p])
            continue;
        grid.multi_index(p, m);
        std::size_t t = 0, stride = 1;
        for (int a = 0; a < n; ++a) {
            t += stride * static_cast<std::size_t>(m[a] * tiles / grid.points(a));
            stride *= static_cast<std::size_t>(tiles);
        }
        tile_masks[t][p] = 1;
        used[t] = 1;
    }
    std::vector<double> theta, dtheta;
    for (std::size_t t = 0; t < total; ++t) {
        if (!used[t])
            continue;
        theta.push_back(masked_norm(phi, norms, weights, tile_masks[t]));
        dtheta.push_back(masked_norm(phi, dnorms, weights, tile_masks[t]));
    }
    const auto counting = MeasureSpace::counting(theta.size());
    return luxemburg_norm(phi, theta, counting).value + luxemburg_norm(phi, dtheta, counting).value;
}

CartanReport cartan_identity_check(const DiscreteForm& omega, const Kernel& kappa, const CartanOptions& options)
{
    const int k = omega.degree;
    const int order = options.fd_order;
    CartanReport r;
    const auto conv = convolve(omega, kappa);
    DiscreteForm lhs = conv.form;
    lhs -= omega; // omega * kappa - omega, expected to equal -(h d + d h)(omega)
    std::vector<char> mask = conv.valid;

    const DiscreteForm domega = exterior_derivative(omega, order);
    DiscreteForm hd = DiscreteForm::zero(omega.grid, k);
    if (domega.components() > 0) {
        hd = flow_homotopy(domega, kappa, options.homotopy).form;
        lhs += hd;
    }
    if (k >= 1) {
        const auto h = flow_homotopy(omega, kappa, options.homotopy);
        const DiscreteForm dh = exterior_derivative(h.form, order);
        mask = erode(omega.grid, conv.valid, order / 2);
        r.sup_d_h = sup_norm(dh, mask);
        lhs += dh;
        if (options.phi) {
            const ChartedDomain dom = kappa.group().domain(omega.grid);
            r.norm_h = norm_on(*options.phi, h.form, dom, mask);
        }
    }
    r.samples = count(mask);
    r.sup_h_d = sup_norm(hd, mask);
    r.residual = sup_norm(lhs, mask);
    r.sup_omega = sup_norm(omega, mask);
    r.sup_conv = sup_norm(conv.form, mask);
    if (options.phi) {
        const YoungFunction& phi = *options.phi;
        ChartedDomain dom = kappa.group().domain(omega.grid);
        r.norm_omega = form_norm(phi, omega, dom);
        if (r.norm_omega > 0.0) {
            r.h_ratio = r.norm_h / r.norm_omega;
            r.conv_ratio = norm_on(phi, conv.form, dom, mask) / r.norm_omega;
        }
        const double base = piecewise_norm(phi, omega, dom, options.tiles, order);
        dom.active = mask;
        if (base > 0.0)
            r.piecewise_ratio = piecewise_norm(phi, conv.form, dom, options.tiles, order) / base;
    }
    return r;
}

PointwiseBoundReport pointwise_bound_check(const DiscreteForm& omega, const Kernel& kappa, double slack)
{
    check_group_grid(kappa, omega.grid);
    const Grid& grid = omega.grid;
    const GroupModel& G = kappa.group();
    const int n = grid.dim();
    const int k = omega.degree;
    const auto valid = convolution_region(kappa, grid);
    const auto conv = convolve(omega, kappa);
    const auto& nodes = kappa.nodes();

    PointwiseBoundReport r;
    r.constant = std::pow(kappa.translation_bound(), k);
    const std::ptrdiff_t P = static_cast<std::ptrdiff_t>(grid.size());
    double max_ratio = 0.0;
    std::size_t violations = 0, samples = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : max_ratio) reduction(+ : violations, samples)
    for (std::ptrdiff_t p = 0; p < P; ++p) {
        if (!valid[p])
            continue;
        double x[Grid::kMaxDim], y[Grid::kMaxDim], v[8], lhs_c[8];
        grid.point(static_cast<std::size_t>(p), x);
        double rhs = 0.0;
        for (const auto& node : nodes) {
            G.multiply(x, node.z.data(), y);
            omega.eval(y, v);
            rhs += node.weight * pointwise_norm(v, k, n, G.metric(y));
        }
        conv.form.at(static_cast<std::size_t>(p), lhs_c);
        const double lhs = pointwise_norm(lhs_c, k, n, G.metric(x));
        ++samples;
        if (lhs > r.constant * rhs * (1.0 + slack) + slack)
            ++violations;
        if (rhs > 0.0)
            max_ratio = std::max(max_ratio, lhs / rhs);
    }
    r.max_ratio = max_ratio;
    r.violations = violations;
    r.samples = samples;
    return r;
}

OperatorRatios operator_ratios(const YoungFunction& phi, const Kernel& kappa, const Grid& grid, int degree, int samples,
                               std::uint64_t seed, const HomotopyOptions& options, int tiles)
{
    check_group_grid(kappa, grid);
    const int n = grid.dim();
    if (degree < 0 || degree > n || samples < 1)
        throw InputError("operator ratios need 0 <= degree <= n and a positive sample count");
    const int C = static_cast<int>(multi_indices(n, degree).size());

    // Basis: one component times a product of {1, cos(pi s), sin(pi s)} per axis, s in [0, 1].
    std::vector<DiscreteForm> basis;
    std::size_t modes = 1;
    for (int a = 0; a < n; ++a)
        modes *= 3;
    for (int c = 0; c < C; ++c)
        for (std::size_t mode = 0; mode < modes; ++mode)
            basis.push_back(DiscreteForm::sample(grid, degree, [&](const double* x, double* out) {
                double v = 1.0;
                std::size_t rem = mode;
                for (int a = 0; a < n; ++a) {
                    const double s = std::acos(-1.0) * (x[a] - grid.lo(a)) / (grid.hi(a) - grid.lo(a));
                    const int which = static_cast<int>(rem % 3);
                    rem /= 3;
                    v *= which == 0 ? 1.0 : (which == 1 ? std::cos(s) : std::sin(s));
                }
                for (int cc = 0; cc < C; ++cc)
                    out[cc] = cc == c ? v : 0.0;
            }));
    const auto conv = convolve_many(basis, kappa);
    std::vector<ConvolutionResult> homot;
    if (degree >= 1)
        homot = flow_homotopy_many(basis, kappa, options);
    const auto mask = erode(grid, conv.front().valid, 2);

    ChartedDomain full = kappa.group().domain(grid);
    ChartedDomain region = full;
    region.active = mask;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    OperatorRatios r;
    auto combine = [&](const std::vector<double>& coef, auto&& pick, int deg) {
        DiscreteForm f = DiscreteForm::zero(grid, deg);
        for (std::size_t b = 0; b < coef.size(); ++b) {
            DiscreteForm term = pick(b);
            term *= coef[b];
            f += term;
        }
        return f;
    };
    for (int sidx = 0; sidx < samples; ++sidx) {
        std::vector<double> coef(basis.size());
        for (double& c : coef)
            c = normal(rng);
        const DiscreteForm w = combine(coef, [&](std::size_t b) { return basis[b]; }, degree);
        const DiscreteForm wk = combine(coef, [&](std::size_t b) { return conv[b].form; }, degree);
        const double base = form_norm(phi, w, full);
        r.conv.push_back(form_norm(phi, wk, region) / base);
        if (degree >= 1) {
            const DiscreteForm hw = combine(coef, [&](std::size_t b) { return homot[b].form; }, degree - 1);
            r.homotopy.push_back(form_norm(phi, hw, region) / base);
        }
        r.piecewise.push_back(piecewise_norm(phi, wk, region, tiles) / piecewise_norm(phi, w, full, tiles));
    }
    auto finish = [&](const std::vector<double>& v, double& mx) {
        for (double x : v) {
            mx = std::max(mx, x);
            r.finite = r.finite && std::isfinite(x);
        }
    };
    finish(r.conv, r.conv_max);
    finish(r.homotopy, r.homotopy_max);
    finish(r.piecewise, r.piecewise_max);
    return r;
}

RelativeReport relative_preservation(const DiscreteForm& omega, const Kernel& kappa, double threshold,
                                     const HomotopyOptions& options)
{
    check_group_grid(kappa, omega.grid);
    const Grid& grid = omega.grid;
    const int last = grid.dim() - 1;
    const double h = grid.spacing(last);
    RelativeReport r;
    r.threshold = threshold;
    // Cubic stencils reach 2h below the evaluation point; right translations and flows
    // lower the last coordinate at most by the support bound.
    if (kappa.group().kind() == GroupKind::AffineHalfPlane)
        r.shrunk = (threshold + 2.0 * h) / kappa.support_lo()[last];
    else
        r.shrunk = threshold + 2.0 * h - kappa.support_lo()[last];

    const auto conv = convolve(omega, kappa);
    std::vector<char> mask = conv.valid;
    double x[Grid::kMaxDim];
    for (std::size_t p = 0; p < grid.size(); ++p) {
        grid.point(p, x);
        mask[p] = mask[p] && x[last] >= r.shrunk;
    }
    r.samples = count(mask);
    r.max_conv = sup_norm(conv.form, mask);
    if (omega.degree >= 1)
        r.max_homotopy = sup_norm(flow_homotopy(omega, kappa, options).form, mask);
    r.preserved = r.samples > 0 && r.max_conv == 0.0 && r.max_homotopy == 0.0;
    return r;
}

} // namespace orlicz
