#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "orlicz/grid.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Increasing k-subsets of {0..n-1} in lexicographic order; component order of k-forms.
const std::vector<std::vector<int>>& multi_indices(int n, int k);
/// Position of an increasing multi-index in multi_indices(n, size), or -1.
int multi_index_position(int n, const std::vector<int>& I);

/// Components of a k-form at a point, written into out[0 .. C(n,k)).
using FormFunction = std::function<void(const double* x, double* out)>;

/// k-form sampled on a grid: comps[c][p] is the coefficient of dx_I, I = multi_indices(n,k)[c].
struct DiscreteForm {
    Grid grid;
    int degree = 0;
    std::vector<std::vector<double>> comps;

    static DiscreteForm zero(const Grid& grid, int degree);
    static DiscreteForm sample(const Grid& grid, int degree, const FormFunction& f);

    int dim() const { return grid.dim(); }
    int components() const { return static_cast<int>(comps.size()); }
    /// Cubic interpolation of every component at x.
    void eval(const double* x, double* out) const;
    /// Samples at the grid point with flat index p.
    void at(std::size_t p, double* out) const;

    DiscreteForm& operator+=(const DiscreteForm& o);
    DiscreteForm& operator-=(const DiscreteForm& o);
    DiscreteForm& operator*=(double s);
};

DiscreteForm operator+(DiscreteForm a, const DiscreteForm& b);
DiscreteForm operator-(DiscreteForm a, const DiscreteForm& b);

/// max over components and over the selected samples (all when mask is empty).
double sup_norm(const DiscreteForm& f, std::span<const char> mask = {});

/// Coordinate formula (d omega)_J = sum_{i in J} (-1)^{pos(i)} d_i omega_{J \ i} with finite differences.
/// The top degree maps to the zero form of degree n + 1 (no components).
DiscreteForm exterior_derivative(const DiscreteForm& omega, int order = 2);

/// Interior product with a vector field sampled at the grid points.
DiscreteForm contraction(const DiscreteForm& omega, const std::vector<std::vector<double>>& field);

using MetricField = std::function<Eigen::MatrixXd(const double* x)>;

enum class Model { EuclideanBox, UnitBall, FlatTorus, AbelianGroup, HalfPlane };

/// Sampled chart: grid, active region, metric. An empty metric means Euclidean.
struct ChartedDomain {
    Model model = Model::EuclideanBox;
    Grid grid;
    std::vector<char> active;
    MetricField metric;

    static ChartedDomain box(std::vector<double> lo, std::vector<double> hi, int points);
    /// [-1, 1]^n grid with the closed unit ball active.
    static ChartedDomain unit_ball(int n, int points);
    static ChartedDomain flat_torus(std::vector<double> periods, int points);
    /// (x, y) in [x0, x1] x [y0, y1], y0 > 0, metric (dx^2 + dy^2) / y^2.
    static ChartedDomain half_plane(double x0, double x1, double y0, double y1, int points);

    Eigen::MatrixXd metric_at(const double* x) const;
    /// Quadrature weight times sqrt(det g); zero off the active region.
    std::vector<double> volume_weights() const;
};

/**
 * sup |omega_x(v_1..v_k)| over g-orthonormal v_i. Exact for k = 0, 1, n
 * (absolute value, dual norm, density); otherwise the best of random
 * orthonormal frames refined by local rotations.
 */
double pointwise_norm(const double* comps, int degree, int n, const Eigen::MatrixXd& g, int frames = 10000,
                      std::uint64_t seed = 1);
std::vector<double> pointwise_norms(const DiscreteForm& omega, const ChartedDomain& domain);
double form_norm(const YoungFunction& phi, const DiscreteForm& omega, const ChartedDomain& domain, double tol = 1e-10);

/**
 * chi_x(omega)(y) = sum_I sum_j (-1)^j (y - x)_{I_j} int_0^1 t^{k-1} omega_I(x + t(y - x)) dt dy_{I \ I_j},
 * with Gauss-Legendre in t and cubic interpolation of omega. The grid must
 * be closed (convex box) and contain x.
 */
DiscreteForm cone_homotopy(const DiscreteForm& omega, std::span<const double> x, int t_nodes = 32);
/// Same, checking that x lies in the active region of the domain.
DiscreteForm cone_homotopy(const DiscreteForm& omega, const ChartedDomain& domain, std::span<const double> x,
                           int t_nodes = 32);

/// Convex body whose half-scaled copy is averaged over.
struct AveragingBody {
    enum class Shape { Ball, Box } shape = Shape::Ball;
    std::vector<double> center;
    std::vector<double> radii; // one radius for a ball, half-widths for a box

    static AveragingBody unit_ball(int n);
    static AveragingBody box(const std::vector<double>& lo, const std::vector<double>& hi);
};

struct PoincareOptions {
    int t_nodes = 32;
    int radial = 8;   // ball: radial Gauss nodes
    int angular = 16; // ball: angular trapezoid nodes
    int per_axis = 6; // box: Gauss nodes per axis
};

/// Quadrature on the half-scaled body.
PointRule half_body_rule(const AveragingBody& body, const PoincareOptions& options);

/// h(omega) = mean over x in the half body of chi_x(omega); degree >= 1.
DiscreteForm poincare_homotopy(const DiscreteForm& omega, const AveragingBody& body,
                               const PoincareOptions& options = {});
/// Degree-0 convention: h(f) is the mean of f over the half body.
double poincare_mean(const DiscreteForm& f, const AveragingBody& body, const PoincareOptions& options = {});

/// Sup of dh(omega) + h(d omega) - omega (degree >= 1), or of h(df) + mean(f) - f (degree 0), over the mask.
double homotopy_residual(const DiscreteForm& omega, const AveragingBody& body, std::span<const char> mask,
                         const PoincareOptions& options = {}, int fd_order = 2);

/// Smooth map between charts together with its Jacobian (row-major n x n).
struct ChartMap {
    std::function<void(const double* x, double* fx)> map;
    std::function<void(const double* x, double* jac)> jacobian; // empty: central differences
};

/// Coordinate pullback of a form given on the target, sampled on the source grid.
DiscreteForm pullback_form(const ChartMap& f, const FormFunction& omega, int degree, const Grid& source);

struct ChartPullbackReport {
    DiscreteForm pulled;
    double norm_pulled = 0.0;
    double norm_target = 0.0; // ||omega|| over f(M), by change of variables
    double ratio = 0.0;
    double lipschitz = 1.0;
    double constant = 0.0; // L^k ||omega||_{L^n phi} / ||omega||_phi
    bool holds = true;
};

/**
 * Pulls omega back along f: M -> N and compares norms. With L the bi-Lipschitz
 * constant, |f* omega|_x <= L^k |omega|_{f(x)} and dV_M <= L^n dV_N, so
 * ||f* omega|| <= L^k ||omega||_{L^n phi}. Both sides live on the grid of M.
 */
ChartPullbackReport chart_pullback(const YoungFunction& phi, const ChartMap& f, const FormFunction& omega,
                                   int degree, const ChartedDomain& M, double tol = 1e-10);

} // namespace orlicz
