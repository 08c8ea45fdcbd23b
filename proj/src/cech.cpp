#include "orlicz/cech.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "orlicz/errors.hpp"
#include "orlicz/luxemburg.hpp"

namespace orlicz {

namespace {

int wrap(int i, int m) { return ((i % m) + m) % m; }

double period(const Grid& g, int a) { return g.hi(a) - g.lo(a); }

/// Lattice points inside the closed interval [A, B] on one axis; nullopt when too few.
std::pair<int, int> lattice_range(const Grid& g, int a, double A, double B)
{
    const double h = g.spacing(a);
    int s = static_cast<int>(std::ceil((A - g.lo(a)) / h - 1e-9));
    int e = static_cast<int>(std::floor((B - g.lo(a)) / h + 1e-9));
    if (!g.periodic(a)) {
        s = std::max(s, 0);
        e = std::min(e, g.points(a) - 1);
    }
    return {s, e - s + 1};
}

LatticeBox make_piece(const Grid& g, const std::vector<double>& lo, const std::vector<double>& hi)
{
    LatticeBox b;
    b.lo = lo;
    b.hi = hi;
    for (int a = 0; a < g.dim(); ++a) {
        const auto [s, len] = lattice_range(g, a, lo[a], hi[a]);
        if (len < 4)
            throw ResolutionError("cover piece holds fewer than 4 lattice points along an axis");
        if (g.periodic(a) && len > g.points(a))
            throw ConstructionError("cover box is wider than the period");
        b.start.push_back(s);
        b.length.push_back(len);
    }
    return b;
}

/// Open intersection of a piece with a cover box, unique up to periods.
std::optional<std::pair<std::vector<double>, std::vector<double>>> intersect(const Grid& g, const LatticeBox& P,
                                                                             const CoverBox& V)
{
    std::vector<double> lo(g.dim()), hi(g.dim());
    for (int a = 0; a < g.dim(); ++a) {
        int found = 0;
        for (int m = -2; m <= 2; ++m) {
            if (!g.periodic(a) && m != 0)
                continue;
            const double shift = g.periodic(a) ? m * period(g, a) : 0.0;
            const double A = std::max(P.lo[a], V.lo[a] + shift);
            const double B = std::min(P.hi[a], V.hi[a] + shift);
            if (B - A > 1e-12) {
                ++found;
                lo[a] = A;
                hi[a] = B;
            }
        }
        if (found == 0)
            return std::nullopt;
        if (found > 1)
            throw ConstructionError("cover intersection is disconnected");
    }
    return std::make_pair(lo, hi);
}

double bump(double s) { return std::abs(s) < 1.0 ? std::pow(1.0 - s * s, 3) : 0.0; }

Grid piece_grid_of(const Grid& g, const LatticeBox& b)
{
    std::vector<double> lo, hi;
    for (int a = 0; a < g.dim(); ++a) {
        lo.push_back(g.lo(a) + b.start[a] * g.spacing(a));
        hi.push_back(g.lo(a) + (b.start[a] + b.length[a] - 1) * g.spacing(a));
    }
    return Grid(lo, hi, b.length);
}

AveragingBody body_of(const Grid& piece)
{
    std::vector<double> lo, hi;
    for (int a = 0; a < piece.dim(); ++a) {
        lo.push_back(piece.lo(a));
        hi.push_back(piece.hi(a));
    }
    return AveragingBody::box(lo, hi);
}

double sign_of(int i) { return (i % 2 == 0) ? 1.0 : -1.0; }

/// (-1)^{k(k+1)/2}: makes nerve pairings equal de Rham periods in degree 1.
double staircase_sign(int k) { return sign_of(k * (k + 1) / 2); }

void check_element(const CoverNerve& cn, const BicomplexElement& e)
{
    if (e.pieces.size() != cn.nerve().count(e.l))
        throw InputError("bicomplex element does not match the nerve");
}

} // namespace

std::vector<CoverBox> uniform_cover(const Grid& lattice, int per_axis, double overlap)
{
    if (per_axis < 1 || !(overlap >= 0.0))
        throw InputError("uniform cover needs per_axis >= 1 and overlap >= 0");
    const int n = lattice.dim();
    int total = 1;
    for (int a = 0; a < n; ++a)
        total *= per_axis;
    std::vector<CoverBox> boxes;
    for (int c = 0; c < total; ++c) {
        CoverBox b;
        int rem = c;
        for (int a = 0; a < n; ++a) {
            const int i = rem % per_axis;
            rem /= per_axis;
            const double w = (lattice.hi(a) - lattice.lo(a)) / per_axis;
            b.lo.push_back(lattice.lo(a) + (i - overlap) * w);
            b.hi.push_back(lattice.lo(a) + (i + 1 + overlap) * w);
        }
        boxes.push_back(std::move(b));
    }
    return boxes;
}

CoverNerve CoverNerve::build(const Grid& lattice, std::vector<CoverBox> boxes, int max_level)
{
    const int n = lattice.dim();
    if (boxes.empty())
        throw InputError("empty cover");
    for (const auto& b : boxes)
        if (static_cast<int>(b.lo.size()) != n || static_cast<int>(b.hi.size()) != n)
            throw InputError("cover box dimension differs from the lattice");

    CoverNerve cn;
    cn.lattice_ = lattice;
    cn.boxes_ = std::move(boxes);
    const std::size_t m = cn.boxes_.size();

    std::vector<std::map<Simplex, LatticeBox>> found(1);
    for (std::size_t U = 0; U < m; ++U)
        found[0][{static_cast<int>(U)}] = make_piece(lattice, cn.boxes_[U].lo, cn.boxes_[U].hi);
    for (int l = 0; l < max_level; ++l) {
        std::map<Simplex, LatticeBox> next;
        for (const auto& [s, piece] : found[l])
            for (int v = s.back() + 1; v < static_cast<int>(m); ++v) {
                const auto cut = intersect(lattice, piece, cn.boxes_[v]);
                if (!cut)
                    continue;
                Simplex t = s;
                t.push_back(v);
                next[t] = make_piece(lattice, cut->first, cut->second);
            }
        if (next.empty())
            break;
        found.push_back(std::move(next));
    }

    std::vector<std::vector<Simplex>> levels;
    for (const auto& level : found) {
        levels.emplace_back();
        for (const auto& entry : level)
            levels.back().push_back(entry.first);
    }
    cn.nerve_ = SimplicialComplex::from_levels(levels);

    const int L = cn.nerve_.dim();
    cn.pieces_.resize(L + 1);
    cn.grids_.resize(L + 1);
    cn.global_.resize(L + 1);
    cn.face_maps_.resize(L + 1);
    cn.face_index_.resize(L + 1);
    for (int l = 0; l <= L; ++l) {
        for (const auto& s : cn.nerve_.simplices(l)) {
            const LatticeBox& b = found[l].at(s);
            cn.pieces_[l].push_back(b);
            cn.grids_[l].push_back(piece_grid_of(lattice, b));
            const Grid& pg = cn.grids_[l].back();
            std::vector<std::size_t> global(pg.size());
            int local[Grid::kMaxDim], multi[Grid::kMaxDim];
            for (std::size_t p = 0; p < pg.size(); ++p) {
                pg.multi_index(p, local);
                for (int a = 0; a < n; ++a) {
                    const int i = b.start[a] + local[a];
                    multi[a] = lattice.periodic(a) ? wrap(i, lattice.points(a)) : i;
                }
                global[p] = lattice.flat_index(multi);
            }
            cn.global_[l].push_back(std::move(global));

            std::vector<std::vector<std::size_t>> maps;
            std::vector<std::size_t> faces;
            if (l > 0) {
                for (int j = 0; j <= l; ++j) {
                    Simplex f = s;
                    f.erase(f.begin() + j);
                    const std::size_t fi = *cn.nerve_.find(f);
                    const LatticeBox& fb = found[l - 1].at(f);
                    const Grid& fg = cn.grids_[l - 1][fi];
                    int offset[Grid::kMaxDim];
                    for (int a = 0; a < n; ++a) {
                        int o = b.start[a] - fb.start[a];
                        if (lattice.periodic(a))
                            o = wrap(o, lattice.points(a));
                        if (o < 0 || o + b.length[a] > fb.length[a])
                            throw ConstructionError("cover intersection is not contained in its face");
                        offset[a] = o;
                    }
                    std::vector<std::size_t> map(pg.size());
                    for (std::size_t p = 0; p < pg.size(); ++p) {
                        pg.multi_index(p, local);
                        for (int a = 0; a < n; ++a)
                            multi[a] = local[a] + offset[a];
                        map[p] = fg.flat_index(multi);
                    }
                    maps.push_back(std::move(map));
                    faces.push_back(fi);
                }
            }
            cn.face_maps_[l].push_back(std::move(maps));
            cn.face_index_[l].push_back(std::move(faces));
        }
    }

    // Partition of unity from product bumps, normalized pointwise.
    cn.partition_.assign(m, std::vector<double>(lattice.size(), 0.0));
    std::vector<double> total(lattice.size(), 0.0);
    std::vector<int> count(lattice.size(), 0);
    double x[Grid::kMaxDim];
    for (std::size_t p = 0; p < lattice.size(); ++p) {
        lattice.point(p, x);
        for (std::size_t U = 0; U < m; ++U) {
            double v = 1.0;
            for (int a = 0; a < n && v > 0.0; ++a) {
                const double c = 0.5 * (cn.boxes_[U].lo[a] + cn.boxes_[U].hi[a]);
                const double r = 0.5 * (cn.boxes_[U].hi[a] - cn.boxes_[U].lo[a]);
                double y = x[a];
                if (lattice.periodic(a)) {
                    const double T = period(lattice, a);
                    y -= T * std::round((y - c) / T);
                }
                v *= bump((y - c) / r);
            }
            cn.partition_[U][p] = v;
            total[p] += v;
            count[p] += v > 0.0;
        }
        if (!(total[p] > 0.0))
            throw ResolutionError("a lattice sample is not covered by any open box");
        cn.multiplicity_ = std::max(cn.multiplicity_, count[p]);
    }
    for (std::size_t U = 0; U < m; ++U)
        for (std::size_t p = 0; p < lattice.size(); ++p)
            cn.partition_[U][p] /= total[p];
    return cn;
}

double CoverNerve::chart_lipschitz(std::size_t U) const
{
    double smin = INFINITY, smax = 0.0;
    for (int a = 0; a < lattice_.dim(); ++a) {
        const double s = boxes_[U].hi[a] - boxes_[U].lo[a];
        smin = std::min(smin, s);
        smax = std::max(smax, s);
    }
    // x -> 2 (x - c) / s per axis
    return std::max(2.0 / smin, smax / 2.0);
}

BicomplexElement zero_element(const CoverNerve& cn, int k, int l)
{
    BicomplexElement e;
    e.k = k;
    e.l = l;
    const std::size_t count = cn.nerve().count(l);
    for (std::size_t i = 0; i < count; ++i)
        e.pieces.push_back(DiscreteForm::zero(cn.piece_grid(l, i), k));
    return e;
}

BicomplexElement sample_element(const CoverNerve& cn, int k, int l,
                                const std::function<void(std::size_t, const double*, double*)>& fn)
{
    BicomplexElement e;
    e.k = k;
    e.l = l;
    const std::size_t count = cn.nerve().count(l);
    for (std::size_t i = 0; i < count; ++i)
        e.pieces.push_back(
            DiscreteForm::sample(cn.piece_grid(l, i), k, [&](const double* x, double* out) { fn(i, x, out); }));
    return e;
}

BicomplexElement restrict_global(const CoverNerve& cn, const DiscreteForm& global)
{
    if (!global.grid.same_layout(cn.lattice()))
        throw InputError("global form is not sampled on the cover lattice");
    BicomplexElement e = zero_element(cn, global.degree, 0);
    for (std::size_t i = 0; i < e.pieces.size(); ++i) {
        const auto& idx = cn.global_indices(0, i);
        for (int c = 0; c < global.components(); ++c)
            for (std::size_t p = 0; p < idx.size(); ++p)
                e.pieces[i].comps[c][p] = global.comps[c][idx[p]];
    }
    return e;
}

BicomplexElement embed_cochain(const CoverNerve& cn, const Cochain& theta)
{
    if (theta.values.size() != cn.nerve().count(theta.degree))
        throw InputError("cochain does not match the nerve");
    BicomplexElement e = zero_element(cn, 0, theta.degree);
    for (std::size_t i = 0; i < e.pieces.size(); ++i)
        std::fill(e.pieces[i].comps[0].begin(), e.pieces[i].comps[0].end(), theta.values[i]);
    return e;
}

BicomplexElement d_prime(const CoverNerve& cn, const BicomplexElement& e, int fd_order)
{
    check_element(cn, e);
    BicomplexElement out;
    out.k = e.k + 1;
    out.l = e.l;
    for (const auto& piece : e.pieces) {
        out.pieces.push_back(exterior_derivative(piece, fd_order));
        out.pieces.back() *= sign_of(e.l);
    }
    return out;
}

BicomplexElement d_double_prime(const CoverNerve& cn, const BicomplexElement& e)
{
    check_element(cn, e);
    BicomplexElement out = zero_element(cn, e.k, e.l + 1);
    for (std::size_t t = 0; t < out.pieces.size(); ++t) {
        auto& target = out.pieces[t];
        for (int j = 0; j <= e.l + 1; ++j) {
            const auto& src = e.pieces[cn.face(e.l + 1, t, j)];
            const auto& map = cn.face_map(e.l + 1, t, j);
            const double s = sign_of(j);
            for (int c = 0; c < target.components(); ++c)
                for (std::size_t p = 0; p < map.size(); ++p)
                    target.comps[c][p] += s * src.comps[c][map[p]];
        }
    }
    return out;
}

BicomplexElement local_retraction(const CoverNerve& cn, const BicomplexElement& e, const PoincareOptions& options)
{
    check_element(cn, e);
    if (e.k < 1)
        throw InputError("local retraction needs k >= 1; use piece_means in degree 0");
    BicomplexElement out;
    out.k = e.k - 1;
    out.l = e.l;
    for (const auto& piece : e.pieces) {
        out.pieces.push_back(poincare_homotopy(piece, body_of(piece.grid), options));
        out.pieces.back() *= sign_of(e.l);
    }
    return out;
}

Cochain piece_means(const CoverNerve& cn, const BicomplexElement& e, const PoincareOptions& options)
{
    check_element(cn, e);
    if (e.k != 0)
        throw InputError("piece means need degree 0 pieces");
    Cochain theta;
    theta.degree = e.l;
    for (const auto& piece : e.pieces)
        theta.values.push_back(poincare_mean(piece, body_of(piece.grid), options));
    return theta;
}

BicomplexElement cech_contraction(const CoverNerve& cn, const BicomplexElement& e)
{
    check_element(cn, e);
    if (e.l < 1)
        throw InputError("Cech contraction needs l >= 1; use glue at l = 0");
    BicomplexElement out = zero_element(cn, e.k, e.l - 1);
    const auto& X = cn.nerve();
    if (e.pieces.empty())
        return out;
    for (std::size_t t = 0; t < e.pieces.size(); ++t) {
        const Simplex& tau = X.simplex(e.l, t);
        // tau = U v V with U at position j; the face without U is V.
        for (int j = 0; j <= e.l; ++j) {
            const std::size_t U = static_cast<std::size_t>(tau[j]);
            const std::size_t V = cn.face(e.l, t, j);
            const auto& map = cn.face_map(e.l, t, j);
            const auto& global = cn.global_indices(e.l, t);
            const auto& eta = cn.partition(U);
            const double s = sign_of(j);
            for (int c = 0; c < e.pieces[t].components(); ++c)
                for (std::size_t p = 0; p < map.size(); ++p)
                    out.pieces[V].comps[c][map[p]] += s * eta[global[p]] * e.pieces[t].comps[c][p];
        }
    }
    return out;
}

DiscreteForm glue(const CoverNerve& cn, const BicomplexElement& e)
{
    check_element(cn, e);
    if (e.l != 0)
        throw InputError("glue needs an element of level 0");
    DiscreteForm out = DiscreteForm::zero(cn.lattice(), e.k);
    for (std::size_t U = 0; U < e.pieces.size(); ++U) {
        const auto& global = cn.global_indices(0, U);
        const auto& eta = cn.partition(U);
        for (int c = 0; c < out.components(); ++c)
            for (std::size_t p = 0; p < global.size(); ++p)
                out.comps[c][global[p]] += eta[global[p]] * e.pieces[U].comps[c][p];
    }
    return out;
}

double sup_norm(const BicomplexElement& e)
{
    double m = 0.0;
    for (const auto& piece : e.pieces)
        m = std::max(m, sup_norm(piece));
    return m;
}

BicomplexElement difference(const BicomplexElement& a, const BicomplexElement& b)
{
    if (a.k != b.k || a.l != b.l || a.pieces.size() != b.pieces.size())
        throw InputError("bicomplex elements of different bidegree");
    BicomplexElement out = a;
    for (std::size_t i = 0; i < out.pieces.size(); ++i)
        out.pieces[i] -= b.pieces[i];
    return out;
}

namespace {

void add_into(BicomplexElement& a, const BicomplexElement& b)
{
    if (b.pieces.empty())
        return;
    for (std::size_t i = 0; i < a.pieces.size(); ++i)
        a.pieces[i] += b.pieces[i];
}

} // namespace

double anticommutator_residual(const CoverNerve& cn, const BicomplexElement& e, int fd_order)
{
    BicomplexElement r = d_prime(cn, d_double_prime(cn, e), fd_order);
    add_into(r, d_double_prime(cn, d_prime(cn, e, fd_order)));
    return sup_norm(r);
}

double d2_double_prime_residual(const CoverNerve& cn, const BicomplexElement& e)
{
    return sup_norm(d_double_prime(cn, d_double_prime(cn, e)));
}

double retraction_residual(const CoverNerve& cn, const BicomplexElement& e, const PoincareOptions& options,
                           int fd_order)
{
    const int n = cn.lattice().dim();
    BicomplexElement r;
    if (e.k == 0) {
        r = local_retraction(cn, d_prime(cn, e, fd_order), options);
        add_into(r, embed_cochain(cn, piece_means(cn, e, options)));
    } else {
        r = d_prime(cn, local_retraction(cn, e, options), fd_order);
        if (e.k < n)
            add_into(r, local_retraction(cn, d_prime(cn, e, fd_order), options));
    }
    return sup_norm(difference(r, e));
}

double contraction_residual(const CoverNerve& cn, const BicomplexElement& e)
{
    BicomplexElement r;
    const BicomplexElement up = d_double_prime(cn, e);
    r = up.pieces.empty() ? zero_element(cn, e.k, e.l) : cech_contraction(cn, up);
    if (e.l == 0)
        add_into(r, restrict_global(cn, glue(cn, e)));
    else
        add_into(r, d_double_prime(cn, cech_contraction(cn, e)));
    return sup_norm(difference(r, e));
}

ElementNorms element_norms(const YoungFunction& phi, const CoverNerve& cn, const BicomplexElement& e)
{
    check_element(cn, e);
    ElementNorms out;
    out.k = e.k;
    out.l = e.l;
    for (const auto& piece : e.pieces) {
        ChartedDomain dom;
        dom.grid = piece.grid;
        dom.active.assign(piece.grid.size(), 1);
        out.piece_norms.push_back(form_norm(phi, piece, dom));
        const DiscreteForm d = exterior_derivative(piece);
        out.piece_d_norms.push_back(d.components() == 0 ? 0.0 : form_norm(phi, d, dom));
    }
    if (!out.piece_norms.empty())
        out.lphi = counting_norm(phi, out.piece_norms) + counting_norm(phi, out.piece_d_norms);
    return out;
}

ZigzagSimplicialResult zigzag_to_simplicial(const YoungFunction& phi, const CoverNerve& cn, const DiscreteForm& omega,
                                            const ZigzagOptions& options)
{
    const int k = omega.degree;
    if (k > cn.nerve().dim())
        throw InputError("form degree exceeds the nerve dimension");
    if (k < omega.dim()) {
        const double scale = std::max(1.0, sup_norm(omega));
        if (sup_norm(exterior_derivative(omega, options.fd_order)) > options.closed_tol * scale)
            throw PreconditionError("zigzag_to_simplicial needs a closed form");
    }
    ZigzagSimplicialResult r;
    BicomplexElement e = restrict_global(cn, omega);
    r.stages.push_back(element_norms(phi, cn, e));
    for (int s = 0; s < k; ++s) {
        e = d_double_prime(cn, local_retraction(cn, e, options.poincare));
        r.stages.push_back(element_norms(phi, cn, e));
    }
    r.cocycle = piece_means(cn, e, options.poincare);
    for (std::size_t i = 0; i < e.pieces.size(); ++i)
        for (double v : e.pieces[i].comps[0])
            r.constancy_defect = std::max(r.constancy_defect, std::abs(v - r.cocycle.values[i]));
    for (double& v : r.cocycle.values)
        v *= staircase_sign(k);
    for (double v : coboundary(cn.nerve(), r.cocycle).values)
        r.cocycle_defect = std::max(r.cocycle_defect, std::abs(v));
    return r;
}

ZigzagFormResult zigzag_to_form(const YoungFunction& phi, const CoverNerve& cn, const Cochain& theta,
                                const ZigzagOptions& options)
{
    const int k = theta.degree;
    if (k > cn.lattice().dim())
        throw InputError("cochain degree exceeds the domain dimension");
    double scale = 1.0;
    for (double v : theta.values)
        scale = std::max(scale, std::abs(v));
    for (double v : coboundary(cn.nerve(), theta).values)
        if (std::abs(v) > 1e-9 * scale)
            throw PreconditionError("zigzag_to_form needs a cocycle");

    ZigzagFormResult r;
    Cochain signed_theta = theta;
    for (double& v : signed_theta.values)
        v *= staircase_sign(k);
    BicomplexElement c = embed_cochain(cn, signed_theta);
    r.stages.push_back(element_norms(phi, cn, c));
    for (int s = 0; s < k; ++s) {
        c = d_prime(cn, cech_contraction(cn, c), options.fd_order);
        r.stages.push_back(element_norms(phi, cn, c));
    }
    const BicomplexElement up = d_double_prime(cn, c);
    r.gluing_defect = sup_norm(up);
    r.form = glue(cn, c);
    if (k < cn.lattice().dim())
        r.closedness_defect = sup_norm(exterior_derivative(r.form, options.fd_order));
    return r;
}

Cochain project_to_cocycles(const SimplicialComplex& X, const Cochain& theta)
{
    const int k = theta.degree;
    if (theta.values.size() != X.count(k))
        throw InputError("cochain does not match the complex");
    if (X.count(k + 1) == 0)
        return theta;
    const Eigen::MatrixXd D = X.coboundary_matrix(k);
    const Eigen::Map<const Eigen::VectorXd> t(theta.values.data(), static_cast<Eigen::Index>(theta.values.size()));
    const Eigen::VectorXd row_part = D.completeOrthogonalDecomposition().solve(D * t);
    Cochain out = theta;
    for (Eigen::Index i = 0; i < row_part.size(); ++i)
        out.values[i] -= row_part[i];
    return out;
}

double loop_pairing(const SimplicialComplex& X, const Cochain& theta, const std::vector<int>& loop)
{
    if (theta.degree != 1)
        throw InputError("loop pairing needs a 1-cochain");
    double sum = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const int a = loop[i], b = loop[(i + 1) % loop.size()];
        const auto idx = X.find({std::min(a, b), std::max(a, b)});
        if (!idx)
            throw InputError("loop uses a missing edge");
        sum += (a < b ? 1.0 : -1.0) * theta.values[*idx];
    }
    return sum;
}

std::vector<double> torus_periods(const DiscreteForm& omega)
{
    const Grid& g = omega.grid;
    if (g.dim() != 2 || omega.degree != 1 || !g.periodic(0) || !g.periodic(1))
        throw InputError("torus periods need a 1-form on a periodic 2D lattice");
    std::vector<double> periods(2, 0.0);
    for (int a = 0; a < 2; ++a) {
        double total = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p) {
            total += omega.comps[a][p] * g.spacing(a);
        }
        periods[a] = total / g.points(1 - a);
    }
    return periods;
}

} // namespace orlicz
