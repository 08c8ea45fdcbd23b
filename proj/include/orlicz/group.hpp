#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "orlicz/forms.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

enum class GroupKind { Abelian, AffineHalfPlane };

/**
 * Two concrete Lie groups in global coordinates.
 *
 * Abelian: R^n with addition and the Euclidean metric.
 * AffineHalfPlane: points (x, y) with y > 0 and (a, b).(x, y) = (a + b x, b y),
 * i.e. the matrices [[b, a], [0, 1]]. The metric (dx^2 + dy^2) / y^2 is left
 * invariant. Lie algebra coordinates (u, v) stand for [[v, u], [0, 0]], so
 * exp(u, v) = (u (e^v - 1) / v, e^v).
 */
class GroupModel {
public:
    static GroupModel abelian(int n);
    static GroupModel affine_half_plane();

    GroupKind kind() const { return kind_; }
    int dim() const { return n_; }

    std::vector<double> identity() const;
    void multiply(const double* g, const double* h, double* out) const;
    void inverse(const double* g, double* out) const;
    void exp(const double* Z, double* out) const;
    /// Throws ModelError off the group (y <= 0).
    void log(const double* z, double* Z) const;

    Eigen::MatrixXd metric(const double* x) const;
    /// sqrt(det g) in group coordinates.
    double volume_density(const double* x) const;
    /// Left-invariant volume pulled back by exp, per unit of dZ.
    double haar_density_exp(const double* Z) const;
    /// Coordinate Jacobian of R_z: x -> x.z; it does not depend on x in either model.
    Eigen::MatrixXd right_differential(const double* z) const;
    /// Operator norm of d_x R_z between the metrics at x and x.z; independent of x.
    double right_translation_norm(const double* z) const;
    /// Value at x of the left-invariant field equal to Z at the identity.
    void left_invariant_field(const double* Z, const double* x, double* out) const;

    /// Sampled chart of a grid in group coordinates with the group metric.
    ChartedDomain domain(const Grid& grid) const;

private:
    GroupKind kind_ = GroupKind::Abelian;
    int n_ = 1;
};

struct KernelSpec {
    double radius = 0.25;   // half-width of the support box in exponential coordinates
    double sharpness = 2.0; // profile exp(-s / (1 - t^2)) on each axis
    int nodes = 32;         // Gauss-Legendre nodes per axis
};

/**
 * kappa(exp Z) = c prod_i exp(-s / (1 - (Z_i / r)^2)), supported on the box
 * |Z_i| <= r. The constant c makes the tensor Gauss-Legendre rule in
 * exponential coordinates, weighted by the Haar density, integrate kappa to one.
 */
class Kernel {
public:
    struct Node {
        std::array<double, 3> Z{};
        std::array<double, 3> z{};
        double weight = 0.0; // rule weight * Haar density * kappa
    };

    static Kernel build(const GroupModel& G, const KernelSpec& spec = {});

    const GroupModel& group() const { return group_; }
    const KernelSpec& spec() const { return spec_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    /// kappa at the group element exp(Z).
    double value_exp(const double* Z) const;
    /// kappa at a group element; zero off the support.
    double value(const double* z) const;
    /// Sum of node weights; one up to rounding.
    double mass() const;
    /// Coordinate bounding box of supp(kappa) in the group.
    const std::vector<double>& support_lo() const { return support_lo_; }
    const std::vector<double>& support_hi() const { return support_hi_; }
    /// M = max over supp(kappa) of |d R_z|.
    double translation_bound() const { return translation_bound_; }
    /// Bounds of |det d R_z| over the support.
    double jacobian_min() const { return jacobian_min_; }
    double jacobian_max() const { return jacobian_max_; }

private:
    GroupModel group_;
    KernelSpec spec_;
    double scale_ = 1.0;
    std::vector<Node> nodes_;
    std::vector<double> support_lo_, support_hi_;
    double translation_bound_ = 1.0;
    double jacobian_min_ = 1.0;
    double jacobian_max_ = 1.0;
};

/// Samples x with x.supp(kappa) inside the sampled box (closed axes only constrain).
std::vector<char> convolution_region(const Kernel& kappa, const Grid& grid);
/// Points whose axis-aligned finite-difference stencils of the given half-width stay in the mask.
std::vector<char> erode(const Grid& grid, std::span<const char> mask, int width);

struct ConvolutionResult {
    DiscreteForm form;       // zero outside the valid region
    std::vector<char> valid; // the shrunken region
    std::size_t valid_count = 0;
};

/**
 * (omega * kappa)_x = int (R_z^* omega)_x kappa(z) dz on the shrunken region.
 * With a requested region (box in group coordinates) throws RegionError when
 * its enlargement by the support leaves the samples. Also throws RegionError
 * when the shrunken region is empty.
 */
ConvolutionResult convolve(const DiscreteForm& omega, const Kernel& kappa);
ConvolutionResult convolve(const DiscreteForm& omega, const Kernel& kappa, std::span<const double> region_lo,
                           std::span<const double> region_hi);
/// Same kernel and grid for every form; one interpolation stencil per node and sample.
std::vector<ConvolutionResult> convolve_many(const std::vector<DiscreteForm>& forms, const Kernel& kappa);

struct HomotopyOptions {
    int t_nodes = 4;
};

/**
 * h(omega)_x = - int ( int_0^1 (phi_t^Z)^* i_Z omega dt )_x kappa(exp Z) dZ
 * with phi_t^Z(x) = x.exp(tZ). Needs degree k >= 1 (InputError otherwise).
 */
ConvolutionResult flow_homotopy(const DiscreteForm& omega, const Kernel& kappa, const HomotopyOptions& options = {});
std::vector<ConvolutionResult> flow_homotopy_many(const std::vector<DiscreteForm>& forms, const Kernel& kappa,
                                                  const HomotopyOptions& options = {});

struct CommutationReport {
    double residual = 0.0;  // sup |d(omega * kappa) - (d omega) * kappa| on the eroded region
    double magnitude = 0.0; // sup |(d omega) * kappa| there
    std::size_t samples = 0;
};

CommutationReport derivative_commutation_check(const DiscreteForm& omega, const Kernel& kappa, int fd_order = 2);

struct CartanReport {
    double residual = 0.0; // sup |h(d omega) + d h(omega) - omega + omega * kappa|
    double sup_h_d = 0.0;
    double sup_d_h = 0.0;
    double sup_omega = 0.0;
    double sup_conv = 0.0;
    std::size_t samples = 0;
    // Orlicz measurements on the checked region; zero when no Young function is given.
    double norm_omega = 0.0;
    double norm_h = 0.0;
    double h_ratio = 0.0;         // ||h(omega)|| / ||omega||
    double conv_ratio = 0.0;      // ||omega * kappa|| / ||omega||
    double piecewise_ratio = 0.0; // piecewise norm of omega * kappa over that of omega
};

struct CartanOptions {
    HomotopyOptions homotopy{};
    int fd_order = 4;
    const YoungFunction* phi = nullptr;
    int tiles = 4; // tiles per axis for the piecewise norm
};

CartanReport cartan_identity_check(const DiscreteForm& omega, const Kernel& kappa, const CartanOptions& options = {});

struct PointwiseBoundReport {
    double constant = 1.0;  // C = M^k
    double max_ratio = 0.0; // max |omega * kappa|_x / (|omega| * kappa)(x) where the latter is positive
    std::size_t violations = 0;
    std::size_t samples = 0;
};

/// |omega * kappa|_x <= M^k (|omega| * kappa)(x) at every valid sample; |omega| is evaluated at each node.
PointwiseBoundReport pointwise_bound_check(const DiscreteForm& omega, const Kernel& kappa, double slack = 1e-12);

/**
 * Piecewise norm over a tiling of the mask into tiles^n grid boxes:
 * ||(||omega|_U||)_U||_{l^phi} + ||(||d omega|_U||)_U||_{l^phi}.
 */
double piecewise_norm(const YoungFunction& phi, const DiscreteForm& omega, const ChartedDomain& domain, int tiles,
                      int fd_order = 4);

struct OperatorRatios {
    std::vector<double> conv;   // ||omega * kappa|| / ||omega|| per random form
    std::vector<double> homotopy;
    std::vector<double> piecewise;
    double conv_max = 0.0;
    double homotopy_max = 0.0;
    double piecewise_max = 0.0;
    bool finite = true;
};

/// Ratios over random trigonometric forms of the given degree; linearity lets every
/// sample reuse the convolution and homotopy of a fixed basis.
OperatorRatios operator_ratios(const YoungFunction& phi, const Kernel& kappa, const Grid& grid, int degree, int samples,
                               std::uint64_t seed, const HomotopyOptions& options = {}, int tiles = 4);

struct RelativeReport {
    double threshold = 0.0;     // omega vanishes where y >= threshold
    double shrunk = 0.0;        // outputs must vanish where y >= shrunk
    double max_conv = 0.0;      // sup |omega * kappa| there
    double max_homotopy = 0.0;  // sup |h(omega)| there
    std::size_t samples = 0;
    bool preserved = false;
};

/**
 * Horoball {y >= c} of the affine half-plane (a half-space along the last axis for
 * the abelian model). The shrunken set also keeps the cubic stencils off the
 * region where omega may be nonzero.
 */
RelativeReport relative_preservation(const DiscreteForm& omega, const Kernel& kappa, double threshold,
                                     const HomotopyOptions& options = {});

} // namespace orlicz
