#include "scenarios.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "io.hpp"
#include "orlicz/bourdon.hpp"
#include "orlicz/cech.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/forms.hpp"
#include "orlicz/group.hpp"
#include "orlicz/luxemburg.hpp"
#include "orlicz/qi.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/simplicial.hpp"

namespace orlicz::cli {

void Report::check(const std::string& name, bool ok) { data["invariants"][name] = ok; }

bool Report::pass() const
{
    if (!data.contains("invariants"))
        return true;
    for (const auto& [name, ok] : data.at("invariants").items())
        if (!ok.get<bool>())
            return false;
    return true;
}

std::string Report::csv() const
{
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < csv_header.size(); ++i)
        out << (i ? "," : "") << csv_header[i];
    out << "\n";
    for (const auto& row : csv_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "");
            if (row[i].is_string())
                out << row[i].get<std::string>();
            else
                out << row[i].dump();
        }
        out << "\n";
    }
    return out.str();
}

namespace {

std::uint64_t require_seed(const json& c)
{
    if (!c.contains("seed"))
        throw InputError("this scenario is randomized; pass --seed");
    return c.at("seed").get<std::uint64_t>();
}

double positive(const json& c, const char* key, double fallback)
{
    const double v = c.value(key, fallback);
    if (!(v > 0.0))
        throw InputError(std::string(key) + " must be positive");
    return v;
}

YoungFunction phi_from(const json& c, const YoungFunction& fallback)
{
    if (c.contains("phi"))
        return io::young_from_json(c.at("phi"));
    if (c.contains("p"))
        return c.contains("kappa") ? YoungFunction::log_damped(c.at("p"), c.at("kappa"))
                                   : YoungFunction::power(c.at("p"));
    return fallback;
}

/// Random cubic polynomial in two variables with its gradient.
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

// ---------------------------------------------------------------- norm

Report norm_scenario(const json& c)
{
    Report r;
    const YoungFunction phi = phi_from(c, YoungFunction::power(2.0));
    const auto f = c.at("f").get<std::vector<double>>();
    const MeasureSpace space = io::measure_from_json(c, f.size());
    const double tol = c.value("tol", kDefaultNormTol);
    const NormResult n = luxemburg_norm(phi, f, space, tol);
    r.data["values"] = {{"norm", n.value}, {"modular_at_value", n.modular_at_value}, {"iterations", n.iterations},
                        {"phi", phi.describe()}};
    r.check("finite", !n.divergent && std::isfinite(n.value));
    r.check("modular_at_most_one", n.modular_at_value <= 1.0 + 1e-12);
    if (phi.kind() == YoungFunction::Kind::Power && phi.scale() == 1.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            s += space.weight(i) * std::pow(std::abs(f[i]), phi.exponent());
        const double closed = std::pow(s, 1.0 / phi.exponent());
        r.data["residuals"]["closed_form"] = std::abs(n.value - closed);
        r.check("matches_closed_form", std::abs(n.value - closed) <= 10.0 * tol * std::max(1.0, closed));
    }
    return r;
}

// ---------------------------------------------------------------- cohomology

Report cohomology_scenario(const json& c)
{
    Report r;
    const SimplicialComplex X = io::complex_from_json(c.value("complex", json{{"generator", "torus7"}}));
    std::vector<int> dims;
    long alternating = 0;
    r.csv_header = {"k", "simplices", "dim_H"};
    for (int k = 0; k <= X.dim(); ++k) {
        dims.push_back(cohomology_dim(X, k));
        alternating += (k % 2 == 0 ? 1 : -1) * dims.back();
        r.csv_rows.push_back({k, X.count(k), dims.back()});
    }
    bool squared_zero = true;
    for (int k = 0; k + 2 <= X.dim(); ++k)
        squared_zero = squared_zero && (X.coboundary_matrix(k + 1) * X.coboundary_matrix(k)).cwiseAbs().maxCoeff() == 0.0;
    std::vector<std::size_t> counts;
    for (int k = 0; k <= X.dim(); ++k)
        counts.push_back(X.count(k));
    r.data["values"] = {{"dims", dims}, {"counts", counts}, {"euler_characteristic", X.euler_characteristic()},
                        {"n1", X.n1()}};
    if (c.contains("degree")) {
        const int k = c.at("degree");
        if (k < 0 || k > X.dim())
            throw InputError("degree outside the complex");
        r.data["values"]["dim"] = dims[k];
    }
    r.check("delta_squared_zero", squared_zero);
    r.check("euler_poincare", alternating == X.euler_characteristic());
    return r;
}

// ---------------------------------------------------------------- reduced

Report reduced_scenario(const json& c)
{
    Report r;
    const YoungFunction phi = phi_from(c, YoungFunction::power(2.0));
    const SimplicialComplex X = io::complex_from_json(c.value("complex", json{{"generator", "torus_grid"}, {"m", 4}, {"n", 4}}));
    const int k = c.value("degree", 1);
    if (k < 1 || k > X.dim())
        throw InputError("reduced cohomology needs 1 <= degree <= dim");
    Cochain theta;
    if (c.contains("theta")) {
        theta = io::cochain_from_json(c.at("theta"), k);
    } else {
        std::mt19937_64 rng(require_seed(c));
        std::normal_distribution<double> n01;
        theta = Cochain::zero(X, k);
        for (double& v : theta.values)
            v = n01(rng);
        theta = project_to_cocycles(X, theta);
    }
    if (theta.values.size() != X.count(theta.degree))
        throw InputError("theta does not match the complex");
    const double tol = c.value("tol", 1e-8);
    const ReducedResult red = reduced_representative(phi, X, theta, tol);

    // theta - representative must equal delta eta.
    const Cochain eta{theta.degree - 1, red.eta};
    const Cochain deta = coboundary(X, eta);
    double class_gap = 0.0;
    for (std::size_t i = 0; i < theta.values.size(); ++i)
        class_gap = std::max(class_gap, std::abs(theta.values[i] - red.representative.values[i] - deta.values[i]));
    double theta_defect = 0.0, rep_defect = 0.0;
    if (theta.degree < X.dim()) {
        for (double v : coboundary(X, theta).values)
            theta_defect = std::max(theta_defect, std::abs(v));
        for (double v : coboundary(X, red.representative).values)
            rep_defect = std::max(rep_defect, std::abs(v));
    }
    r.data["values"] = {{"residual", red.residual},
                        {"initial_residual", red.initial_residual},
                        {"iterations", red.iterations},
                        {"dim_H", cohomology_dim(X, theta.degree)},
                        {"representative", red.representative.values}};
    r.data["residuals"] = {{"class_gap", class_gap}, {"representative_cocycle_defect", rep_defect}};
    r.check("no_worse_than_least_squares", red.residual <= red.initial_residual * (1 + 1e-9) + 1e-12);
    r.check("same_class", class_gap <= 1e-9 * std::max(1.0, red.initial_residual));
    r.check("cocycle_preserved", rep_defect <= theta_defect + 1e-9);
    return r;
}

// ---------------------------------------------------------------- qi-check

std::vector<int> circle_map(int from, int to)
{
    std::vector<int> m(from);
    for (int i = 0; i < from; ++i)
        m[i] = static_cast<int>(std::lround(static_cast<double>(to) * i / from)) % to;
    return m;
}

Report qi_scenario(const json& c)
{
    Report r;
    const json xs = c.value("X", json{{"generator", "cycle"}, {"n", 6}});
    const json ys = c.value("Y", json{{"generator", "cycle"}, {"n", 10}});
    const SimplicialComplex X = io::complex_from_json(xs);
    const SimplicialComplex Y = io::complex_from_json(ys);
    QuasiIsometry F;
    if (c.contains("qi")) {
        F = io::qi_from_json(c.at("qi"));
    } else {
        if (xs.value("generator", "") != "cycle" || ys.value("generator", "") != "cycle")
            throw InputError("give the vertex map with \"qi\" for complexes other than two cycles");
        const int nx = static_cast<int>(X.vertex_count()), ny = static_cast<int>(Y.vertex_count());
        F = {circle_map(nx, ny), circle_map(ny, nx)};
    }
    const int k_max = c.value("k_max", 1);
    const double tol = c.value("tol", 1e-9);
    const auto rep = check_qi_isomorphism(X, Y, F, k_max, c.value("seed", std::uint64_t{1}));
    json forward = json::array(), backward = json::array();
    for (const auto& m : rep.forward)
        forward.push_back(io::matrix_to_json(m));
    for (const auto& m : rep.backward)
        backward.push_back(io::matrix_to_json(m));
    r.data["values"] = {{"forward", forward}, {"backward", backward}};
    r.data["residuals"] = {{"identity_error_x", rep.identity_error_x},
                           {"identity_error_y", rep.identity_error_y},
                           {"chain_defects", rep.chain_defects},
                           {"prism_defects", rep.prism_defects},
                           {"homotopy_defects", rep.homotopy_defects}};
    r.data["constants"] = {{"forward", {{"lambda", rep.forward_constants.lambda},
                                        {"epsilon", rep.forward_constants.epsilon},
                                        {"density", rep.forward_constants.density}}},
                           {"backward", {{"lambda", rep.backward_constants.lambda},
                                         {"epsilon", rep.backward_constants.epsilon},
                                         {"density", rep.backward_constants.density}}}};
    r.check("chain_maps_exact", rep.chain_defects == 0);
    r.check("prisms_exact", rep.prism_defects == 0);
    r.check("homotopy_exact", rep.homotopy_defects == 0);
    r.check("cohomology_isomorphism", rep.ok(tol));
    return r;
}

// ---------------------------------------------------------------- poincare

/// Residual of one user-supplied form on the unit disk.
Report poincare_form_scenario(const json& c)
{
    Report r;
    const json spec = c.at("form").is_string() ? io::load_json_file(c.at("form")) : c.at("form");
    const int points = c.value("points", spec.value("points", 64));
    const double tol = positive(c, "tol", 1e-2);
    PoincareOptions opts;
    opts.t_nodes = c.value("t_nodes", 32);
    const auto dom = ChartedDomain::unit_ball(2, points);
    const DiscreteForm omega = io::form_from_json(spec, dom);
    const double res = homotopy_residual(omega, AveragingBody::unit_ball(2), dom.active, opts);
    r.data["values"] = {{"points", points}, {"t_nodes", opts.t_nodes}, {"degree", omega.degree}};
    r.data["residuals"] = {{"homotopy", res}};
    r.check("homotopy_degree_" + std::to_string(omega.degree), res <= tol);
    return r;
}

Report poincare_scenario(const json& c)
{
    if (c.contains("form"))
        return poincare_form_scenario(c);
    Report r;
    std::mt19937_64 rng(require_seed(c));
    const int points = c.value("points", 64);
    const int trials = c.value("trials", 1);
    const double tol = positive(c, "tol", 1e-2);
    const double cone_tol = positive(c, "cone_tol", 1e-3);
    PoincareOptions opts;
    opts.t_nodes = c.value("t_nodes", 32);
    const auto dom = ChartedDomain::unit_ball(2, points);
    const auto body = AveragingBody::unit_ball(2);

    double worst[3] = {0.0, 0.0, 0.0};
    double cone = 0.0;
    r.csv_header = {"trial", "degree", "residual"};
    for (int t = 0; t < trials; ++t) {
        const Cubic a(rng), b(rng);
        const auto f = DiscreteForm::sample(dom.grid, 0, [&](const double* p, double* o) { o[0] = a(p[0], p[1]); });
        const auto one = DiscreteForm::sample(dom.grid, 1, [&](const double* p, double* o) {
            o[0] = a(p[0], p[1]);
            o[1] = b(p[0], p[1]);
        });
        const auto two = DiscreteForm::sample(dom.grid, 2, [&](const double* p, double* o) { o[0] = b(p[0], p[1]); });
        const DiscreteForm* forms[3] = {&f, &one, &two};
        for (int k = 0; k <= 2; ++k) {
            const double res = homotopy_residual(*forms[k], body, dom.active, opts);
            worst[k] = std::max(worst[k], res);
            r.csv_rows.push_back({t, k, res});
        }

        // chi_x(df)(y) = f(y) - f(x)
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        const std::vector<double> x0 = {u(rng), u(rng)};
        const auto df = DiscreteForm::sample(dom.grid, 1, [&](const double* p, double* o) {
            o[0] = a.dx(p[0], p[1]);
            o[1] = a.dy(p[0], p[1]);
        });
        const auto chi = cone_homotopy(df, dom, x0, opts.t_nodes);
        double y[2];
        for (std::size_t p = 0; p < dom.grid.size(); ++p) {
            if (!dom.active[p])
                continue;
            dom.grid.point(p, y);
            cone = std::max(cone, std::abs(chi.comps[0][p] - (a(y[0], y[1]) - a(x0[0], x0[1]))));
        }
    }
    r.data["residuals"] = {{"degree_0", worst[0]}, {"degree_1", worst[1]}, {"degree_2", worst[2]}, {"cone", cone}};
    r.data["values"] = {{"points", points}, {"t_nodes", opts.t_nodes}};
    for (int k = 0; k <= 2; ++k)
        r.check("homotopy_degree_" + std::to_string(k), worst[k] <= tol);
    r.check("cone_of_exact_form", cone <= cone_tol);
    return r;
}

// ---------------------------------------------------------------- zigzag

Report zigzag_scenario(const json& c)
{
    Report r;
    if (c.value("model", std::string("torus")) != "torus")
        throw InputError("zigzag supports the flat torus model only");
    const int m = c.value("lattice", 64);
    const Grid lattice({0.0, 0.0}, {1.0, 1.0}, {m, m}, {true, true});
    const auto boxes = io::cover_from_json(c.value("cover", json::object()), lattice);
    const CoverNerve cn = CoverNerve::build(lattice, boxes);
    const YoungFunction phi = phi_from(c, YoungFunction::power(2.0));
    const double tol = positive(c, "tol", 1e-2);
    const auto& X = cn.nerve();

    std::vector<int> dims;
    std::vector<std::size_t> counts;
    for (int k = 0; k <= X.dim(); ++k) {
        dims.push_back(cohomology_dim(X, k));
        counts.push_back(X.count(k));
    }
    const Eigen::MatrixXd H = harmonic_basis(X, 1);
    r.check("dim_H1_is_2", H.cols() == 2);

    // Nerve loops along the two axes through box 0 (box index i0 + per_axis i1).
    const int per = c.value("cover", json::object()).value("per_axis", 4);
    std::vector<int> loop_x, loop_y;
    for (int i = 0; i < per; ++i) {
        loop_x.push_back(i);
        loop_y.push_back(i * per);
    }
    const bool uniform = !c.value("cover", json::object()).contains("boxes");

    Eigen::MatrixXd periods(2, H.cols());
    double closed = 0.0, cocycle = 0.0, roundtrip = 0.0, period_gap = 0.0;
    r.csv_header = {"direction", "basis", "stage", "k", "l", "lphi"};
    for (Eigen::Index b = 0; b < H.cols(); ++b) {
        Cochain theta{1, std::vector<double>(H.col(b).data(), H.col(b).data() + H.rows())};
        const auto form = zigzag_to_form(phi, cn, theta);
        closed = std::max(closed, form.closedness_defect);
        const auto per_ab = torus_periods(form.form);
        periods(0, b) = per_ab[0];
        periods(1, b) = per_ab[1];
        if (uniform) {
            period_gap = std::max(period_gap, std::abs(per_ab[0] - loop_pairing(X, theta, loop_x)));
            period_gap = std::max(period_gap, std::abs(per_ab[1] - loop_pairing(X, theta, loop_y)));
        }
        const auto back = zigzag_to_simplicial(phi, cn, form.form);
        cocycle = std::max(cocycle, back.cocycle_defect);
        Cochain diff = project_to_cocycles(X, back.cocycle);
        for (std::size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= theta.values[i];
        roundtrip = std::max(roundtrip, reduced_representative(phi, X, diff).residual);
        for (std::size_t s = 0; s < form.stages.size(); ++s)
            r.csv_rows.push_back({"to_form", b, s, form.stages[s].k, form.stages[s].l, form.stages[s].lphi});
        for (std::size_t s = 0; s < back.stages.size(); ++s)
            r.csv_rows.push_back({"to_simplicial", b, s, back.stages[s].k, back.stages[s].l, back.stages[s].lphi});
    }
    Eigen::MatrixXd normalized = periods;
    for (Eigen::Index b = 0; b < normalized.cols(); ++b)
        normalized.col(b).normalize();
    const double det = normalized.rows() == normalized.cols() ? normalized.determinant() : 0.0;

    r.data["values"] = {{"nerve_counts", counts}, {"dims", dims}, {"dim_H1", H.cols()},
                        {"period_matrix", io::matrix_to_json(periods)}, {"normalized_det", det}};
    r.data["residuals"] = {{"form_closedness", closed}, {"cocycle_defect", cocycle},
                           {"roundtrip_reduced", roundtrip}};
    if (uniform)
        r.data["residuals"]["period_vs_pairing"] = period_gap;
    r.data["constants"] = {{"multiplicity", cn.multiplicity()}, {"chart_lipschitz", cn.chart_lipschitz(0)}};
    r.check("forms_closed", closed <= tol);
    r.check("cocycles_closed", cocycle <= tol);
    r.check("periods_nonsingular", std::abs(det) > 0.5);
    r.check("roundtrip", roundtrip <= tol);
    return r;
}

// ---------------------------------------------------------------- group scenarios

struct GroupSetup {
    GroupModel G;
    std::vector<double> lo, hi;
};

GroupSetup group_setup(const json& c)
{
    const std::string model = c.value("model", std::string("flat"));
    GroupSetup s{GroupModel::abelian(2), {-1.0, -1.0}, {1.0, 1.0}};
    if (model == "half-plane") {
        s = {GroupModel::affine_half_plane(), {-1.5, 0.5}, {1.5, 2.0}};
    } else if (model != "flat") {
        throw InputError("model must be flat or half-plane");
    }
    s.lo = c.value("lo", s.lo);
    s.hi = c.value("hi", s.hi);
    return s;
}

Grid group_grid(const GroupSetup& s, int points) { return Grid(s.lo, s.hi, {points, points}); }

/// Mass of kappa by a fine tensor rule over the support box in group coordinates.
double kernel_mass_oracle(const Kernel& K)
{
    const GroupModel& G = K.group();
    const Rule1D ra = gauss_legendre(400, K.support_lo()[0], K.support_hi()[0]);
    const Rule1D rb = gauss_legendre(400, K.support_lo()[1], K.support_hi()[1]);
    double total = 0.0;
    for (std::size_t i = 0; i < ra.nodes.size(); ++i)
        for (std::size_t j = 0; j < rb.nodes.size(); ++j) {
            const double z[2] = {ra.nodes[i], rb.nodes[j]};
            total += ra.weights[i] * rb.weights[j] * K.value(z) * G.volume_density(z);
        }
    return total;
}

/// Largest |(dL_g)^T g(gx) dL_g - g(x)| over random pairs, dL_g by central differences.
double left_invariance_defect(const GroupModel& G, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double Zg[2] = {u(rng), u(rng)}, Zx[2] = {u(rng), u(rng)};
        double g[2], x[2], gx[2];
        G.exp(Zg, g);
        G.exp(Zx, x);
        G.multiply(g, x, gx);
        Eigen::MatrixXd J(2, 2);
        const double step = 1e-6;
        for (int col = 0; col < 2; ++col) {
            double xp[2] = {x[0], x[1]}, xm[2] = {x[0], x[1]}, fp[2], fm[2];
            xp[col] += step;
            xm[col] -= step;
            G.multiply(g, xp, fp);
            G.multiply(g, xm, fm);
            for (int row = 0; row < 2; ++row)
                J(row, col) = (fp[row] - fm[row]) / (2 * step);
        }
        worst = std::max(worst, (J.transpose() * G.metric(gx) * J - G.metric(x)).cwiseAbs().maxCoeff());
    }
    return worst;
}

void polynomial_one_form(const double* x, double* o)
{
    const double X = x[0], Y = x[1];
    o[0] = X * X * Y * Y * Y + 0.5 * X * X * X * X * Y - Y * Y * Y * Y * Y;
    o[1] = 0.0;
}

Report convolve_scenario(const json& c)
{
    Report r;
    std::mt19937_64 rng(require_seed(c));
    const GroupSetup s = group_setup(c);
    const Kernel K = Kernel::build(s.G, io::kernel_from_json(c.value("kernel", json::object())));
    const int points = c.value("points", 64);
    const double tol = positive(c, "tol", 1e-2);
    const YoungFunction phi = phi_from(c, YoungFunction::log_damped(2.0, 2.0));

    const double oracle = kernel_mass_oracle(K);
    const double left = left_invariance_defect(s.G, rng);
    r.data["constants"] = {{"M", K.translation_bound()},
                           {"jacobian_min", K.jacobian_min()},
                           {"jacobian_max", K.jacobian_max()},
                           {"kernel_nodes", K.nodes().size()}};
    r.data["values"]["kernel"] = io::kernel_to_json(K.spec());
    r.data["residuals"] = {{"kernel_mass", std::abs(K.mass() - 1.0)},
                           {"kernel_mass_oracle", std::abs(oracle - 1.0)},
                           {"left_invariance", left}};
    r.check("kernel_normalized", std::abs(oracle - 1.0) <= 1e-8 && std::abs(K.mass() - 1.0) <= 1e-12);
    r.check("left_translations_isometric", left <= 1e-8);

    // Pointwise bound on random smooth forms of every degree.
    const Grid grid = group_grid(s, points);
    std::normal_distribution<double> n01;
    std::size_t violations = 0, samples = 0;
    json bound = json::array();
    for (int k = 0; k <= 2; ++k) {
        double a[6];
        for (double& v : a)
            v = n01(rng);
        const auto omega = DiscreteForm::sample(grid, k, [&](const double* x, double* o) {
            o[0] = a[0] * std::sin(2 * x[0] + a[1]) * x[1] + a[2];
            if (k == 1)
                o[1] = a[3] * std::cos(a[4] * x[0] * x[1]) + a[5];
        });
        const auto rep = pointwise_bound_check(omega, K);
        violations += rep.violations;
        samples += rep.samples;
        bound.push_back({{"degree", k}, {"max_ratio", rep.max_ratio}, {"constant", rep.constant}});
    }
    r.data["values"]["pointwise_bound"] = bound;
    r.data["values"]["valid_samples"] = convolve(DiscreteForm::zero(grid, 0), K).valid_count;
    r.check("pointwise_bound", violations == 0 && samples > 0);

    // d(omega * kappa) = (d omega) * kappa under refinement.
    std::vector<int> levels = c.value("levels", std::vector<int>{32, 64, 128});
    std::vector<double> res;
    for (int m : levels)
        res.push_back(derivative_commutation_check(DiscreteForm::sample(group_grid(s, m), 1, polynomial_one_form), K)
                          .residual);
    double slope = 0.0;
    if (res.size() >= 2) {
        const double ratio = static_cast<double>(levels.back() - 1) / (levels[levels.size() - 2] - 1);
        slope = std::log(res[res.size() - 2] / res.back()) / std::log(ratio);
    }
    r.data["residuals"]["commutation"] = res;
    r.data["values"]["commutation_levels"] = levels;
    r.data["values"]["commutation_slope"] = slope;
    const auto constant = DiscreteForm::sample(grid, 1, [](const double*, double* o) {
        o[0] = 1.5;
        o[1] = -0.5;
    });
    const double constant_res = derivative_commutation_check(constant, K).residual;
    r.data["residuals"]["commutation_constant"] = constant_res;
    r.check("commutation", !res.empty() && res.back() <= tol);
    r.check("commutation_slope", res.size() >= 2 && slope >= 1.9);
    r.check("commutation_constant", constant_res <= 1e-8);

    // Operator-norm ratios over random trigonometric forms.
    const int ratio_samples = c.value("samples", 100);
    const auto ratios = operator_ratios(phi, K, group_grid(s, c.value("ratio_points", 32)), 1, ratio_samples,
                                        rng(), HomotopyOptions{c.value("t_nodes", 4)});
    r.data["constants"]["conv_ratio_max"] = ratios.conv_max;
    r.data["constants"]["homotopy_ratio_max"] = ratios.homotopy_max;
    r.data["constants"]["piecewise_ratio_max"] = ratios.piecewise_max;
    r.csv_header = {"sample", "conv_ratio", "homotopy_ratio", "piecewise_ratio"};
    for (std::size_t i = 0; i < ratios.conv.size(); ++i)
        r.csv_rows.push_back({i, ratios.conv[i], ratios.homotopy[i], ratios.piecewise[i]});
    r.check("operator_ratios_finite", ratios.finite && ratios.conv.size() == static_cast<std::size_t>(ratio_samples));
    return r;
}

double bump(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

Report cartan_scenario(const json& c)
{
    Report r;
    const GroupSetup s = group_setup(c);
    const bool flat = s.G.kind() == GroupKind::Abelian;
    const Kernel K = Kernel::build(s.G, io::kernel_from_json(c.value("kernel", json::object())));
    const int points = c.value("points", 128);
    const double tol = positive(c, "tol", flat ? 1e-2 : 2e-2);
    const YoungFunction phi = phi_from(c, YoungFunction::log_damped(2.0, 2.0));
    CartanOptions opts;
    opts.homotopy.t_nodes = c.value("t_nodes", 4);
    opts.fd_order = c.value("fd_order", 4);
    opts.tiles = c.value("tiles", 4);
    opts.phi = &phi;

    const Grid grid = group_grid(s, points);
    DiscreteForm omega;
    std::string form_name;
    if (flat) {
        form_name = "d(sin(2x) cos(y) + x^2 y)";
        omega = DiscreteForm::sample(grid, 1, [](const double* x, double* o) {
            o[0] = 2 * std::cos(2 * x[0]) * std::cos(x[1]) + 2 * x[0] * x[1];
            o[1] = -std::sin(2 * x[0]) * std::sin(x[1]) + x[0] * x[0];
        });
    } else {
        // Smooth bump of radius 0.6 about (0, 1.2) times a non-closed 1-form.
        form_name = "compactly supported bump 1-form";
        omega = DiscreteForm::sample(grid, 1, [](const double* x, double* o) {
            const double dx = x[0] / 0.6, dy = (x[1] - 1.2) / 0.6;
            const double b = 3.0 * bump(dx * dx + dy * dy);
            o[0] = b * (1.0 + x[1]);
            o[1] = b * std::sin(x[0]);
        });
    }
    const auto rep = cartan_identity_check(omega, K, opts);
    r.data["values"] = {{"form", form_name}, {"points", points}, {"samples", rep.samples}};
    r.data["residuals"] = {{"cartan", rep.residual}};
    r.data["values"]["terms"] = {{"sup_h_d", rep.sup_h_d}, {"sup_d_h", rep.sup_d_h}, {"sup_omega", rep.sup_omega},
                                 {"sup_conv", rep.sup_conv}};
    r.data["constants"] = {{"norm_omega", rep.norm_omega}, {"norm_h", rep.norm_h}, {"h_ratio", rep.h_ratio},
                           {"conv_ratio", rep.conv_ratio}, {"piecewise_ratio", rep.piecewise_ratio},
                           {"M", K.translation_bound()}};
    r.check("cartan_identity", rep.residual <= tol);
    r.check("ratios_finite", std::isfinite(rep.h_ratio) && std::isfinite(rep.conv_ratio) &&
                                 std::isfinite(rep.piecewise_ratio));

    const auto constant = DiscreteForm::sample(group_grid(s, 32), 1, [](const double*, double* o) {
        o[0] = 0.7;
        o[1] = -1.1;
    });
    if (flat) {
        const double cres = cartan_identity_check(constant, K).residual;
        r.data["residuals"]["constant_form"] = cres;
        r.check("constant_form", cres <= 1e-8);
    } else {
        const double threshold = c.value("horoball", 1.0);
        const auto horo = DiscreteForm::sample(group_grid(s, c.value("horoball_points", 96)), 1,
                                               [&](const double* x, double* o) {
                                                   const double v = x[1] < threshold ? std::pow(threshold - x[1], 4) : 0.0;
                                                   o[0] = v * std::cos(x[0]);
                                                   o[1] = v;
                                               });
        const auto rel = relative_preservation(horo, K, threshold, opts.homotopy);
        r.data["values"]["horoball"] = {{"threshold", rel.threshold}, {"shrunk", rel.shrunk},
                                        {"samples", rel.samples}, {"max_conv", rel.max_conv},
                                        {"max_homotopy", rel.max_homotopy}};
        r.check("relative_preservation", rel.preserved);
    }
    return r;
}

// ---------------------------------------------------------------- bourdon

Report bourdon_scenario(const json& c)
{
    Report r;
    BourdonOptions opts;
    opts.pieces = c.value("pieces", opts.pieces);
    opts.cauchy_start = c.value("cauchy_start", opts.cauchy_start);
    opts.cauchy_tol = c.value("cauchy_tol", opts.cauchy_tol);
    opts.tail_tol = c.value("tail_tol", opts.tail_tol);
    const auto b = bourdon_example(c.value("p", 2.0), c.value("kappa", 2.0), c.value("N", 100L), c.value("eps", 0.05), opts);
    r.data["values"] = {{"phi_one", b.phi_one},
                        {"truncated_modular", b.truncated_modular},
                        {"harmonic", b.harmonic},
                        {"worst_piece_ratio", b.worst_piece_ratio},
                        {"first_piece_norms", b.first_piece_norms},
                        {"partial_sum", b.partial_sum},
                        {"max_increment_after", b.max_increment_after},
                        {"partial_increment", b.partial_increment},
                        {"integral_increment", b.integral_increment},
                        {"tail_bound", b.tail_bound},
                        {"mollified_worst_ratio", b.mollified_worst_ratio}};
    r.data["residuals"] = {{"tail_relative_error", b.tail_relative_error}};
    r.check("divergent_global", b.divergent_global);
    r.check("exceeds_from_threshold", b.exceeds_from_threshold);
    r.check("log_growth", b.log_growth);
    r.check("finite_piecewise", b.finite_piecewise);
    r.check("cauchy", b.cauchy);
    r.check("tail_consistent", b.tail_consistent);
    r.check("mollified", b.mollified_ok);
    r.csv_header = {"N", "modular"};
    for (const auto& [n, m] : b.modular_series)
        r.csv_rows.push_back({n, m});
    return r;
}

using Runner = std::function<Report(const json&)>;

const std::map<std::string, Runner>& registry()
{
    static const std::map<std::string, Runner> table = {
        {"norm", norm_scenario},         {"cohomology", cohomology_scenario}, {"reduced", reduced_scenario},
        {"qi-check", qi_scenario},       {"poincare", poincare_scenario},     {"zigzag", zigzag_scenario},
        {"convolve", convolve_scenario}, {"cartan", cartan_scenario},         {"bourdon", bourdon_scenario},
    };
    return table;
}

} // namespace

const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, run] : registry())
            v.push_back(name);
        return v;
    }();
    return names;
}

Report run_scenario(const std::string& name, const json& config)
{
    const auto it = registry().find(name);
    if (it == registry().end())
        throw InputError("unknown scenario " + name);
    if (config.contains("tol") && !(config.at("tol").get<double>() > 0.0))
        throw InputError("tolerances must be positive");
    const auto start = std::chrono::steady_clock::now();
    Report r = it->second(config);
    r.data["scenario"] = name;
    r.data["config"] = config;
    r.data["pass"] = r.pass();
    r.data["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

} // namespace orlicz::cli
