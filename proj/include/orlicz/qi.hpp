#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orlicz/simplicial.hpp"

namespace orlicz {

/// Integer combination of k-simplices of a fixed complex, keyed by index.
struct ChainValue {
    int degree = 0;
    std::map<std::size_t, long long> coeffs; // never holds zero coefficients

    void add(std::size_t simplex, long long c);
    void add(const ChainValue& other, long long factor = 1);
    long long sup_norm() const;
    std::size_t length() const { return coeffs.size(); }
    bool empty() const { return coeffs.empty(); }
    bool operator==(const ChainValue& o) const { return degree == o.degree && coeffs == o.coeffs; }
};

/// Simplicial boundary of a chain in Y.
ChainValue boundary(const SimplicialComplex& Y, const ChainValue& c);

struct QuasiIsometry {
    std::vector<int> map; // X vertex -> Y vertex
    std::optional<std::vector<int>> quasi_inverse;
};

struct QIConstants {
    double lambda = 1.0;
    double epsilon = 0.0;
    int density = 0; // max distance from a Y vertex to the image
};

/// lambda and epsilon measured over all vertex pairs of X.
QIConstants measure_qi(const SimplicialComplex& X, const SimplicialComplex& Y, const std::vector<int>& map);

/// For each y, the smallest x whose image is nearest to y.
std::vector<int> nearest_preimage(const SimplicialComplex& X, const SimplicialComplex& Y, const std::vector<int>& map);

/// Vertex-level sup distance between two maps X -> Y.
int map_distance(const SimplicialComplex& Y, const std::vector<int>& f, const std::vector<int>& g);

enum class PathRule { SmallestNeighbor, LargestNeighbor };

struct FillOptions {
    int radius_budget = 8;
    PathRule path_rule = PathRule::SmallestNeighbor;
};

/**
 * A chain c of degree z.degree + 1 in Y with boundary z. Two-point 0-cycles
 * are joined by a lexicographic BFS geodesic; everything else is solved
 * exactly over the rationals on the subcomplex spanned by the vertices
 * within distance r of supp z, for r = 0, 1, ... up to the budget.
 * Throws BudgetError when no integral filling is found.
 */
ChainValue fill_cycle(const SimplicialComplex& Y, const ChainValue& z, const FillOptions& options = {});

struct ChainMap {
    int k_max = 0;
    /// images[k][i]: chain in Y for the i-th k-simplex of X
    std::vector<std::vector<ChainValue>> images;
    std::vector<long long> sup_bound; // N_k
    std::vector<std::size_t> length_bound; // L_k
    std::vector<std::size_t> multiplicity; // D_k: max number of sigma whose image contains a given tau
    std::vector<int> hausdorff; // vertex-level Hausdorff bound between c_F(sigma) and F(v), v in sigma

    const ChainValue& operator()(int k, std::size_t i) const { return images[k][i]; }
};

ChainMap build_chain_map(const SimplicialComplex& X, const SimplicialComplex& Y, const std::vector<int>& map,
                         int k_max, const FillOptions& options = {});
ChainMap identity_chain_map(const SimplicialComplex& X, int k_max);
/// c_second o c_first : X -> Z.
ChainMap compose(const SimplicialComplex& X, const SimplicialComplex& Z, const ChainMap& first,
                 const ChainMap& second);
/// Recomputes N_k, L_k, D_k and the Hausdorff bound.
void record_constants(const SimplicialComplex& X, const SimplicialComplex& Y, ChainMap& c);

/// Largest violation count of boundary(c(sigma)) == c(boundary sigma); zero means exact.
std::size_t chain_map_defects(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& c);

/// theta o c_F: a cochain on X from one on Y.
Cochain pullback(const SimplicialComplex& X, const ChainMap& c, const Cochain& theta);
std::vector<long long> pullback_exact(const SimplicialComplex& X, const ChainMap& c, int k,
                                      const std::vector<long long>& theta);
/// Matrix of theta -> theta o c_F in degree k: count_X(k) x count_Y(k).
Eigen::MatrixXd pullback_matrix(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& c, int k);

struct PrismHomotopy {
    int k_max = 0;
    /// chains[k][i]: (k+1)-chain in Y for the i-th k-simplex of X
    std::vector<std::vector<ChainValue>> chains;
    std::vector<long long> sup_bound;
    std::vector<std::size_t> length_bound;
};

/// h with boundary h(v) = c_F(v) - c_G(v) and boundary h + h boundary = c_F - c_G.
PrismHomotopy prism_homotopy(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& cf,
                             const ChainMap& cg, const FillOptions& options = {});
std::size_t prism_defects(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& cf,
                          const ChainMap& cg, const PrismHomotopy& h);
/// (H theta)(sigma) = theta(h(sigma)); degree k theta gives degree k - 1.
std::vector<long long> homotopy_operator(const SimplicialComplex& X, const PrismHomotopy& h, int k,
                                         const std::vector<long long>& theta);

/// Matrix of F# : H^k(Y) -> H^k(X) in harmonic bases.
Eigen::MatrixXd induced_cohomology_matrix(const SimplicialComplex& X, const SimplicialComplex& Y,
                                          const ChainMap& c, int k);

struct PullbackNormReport {
    int degree = 0;
    int trials = 0;
    double worst_ratio = 0.0;
    double constant = 0.0; // N_k L_k max(1, D_k)
    int violations = 0;
};

/// ||F* theta||_phi <= N_k L_k ||theta||_{D phi} <= N_k L_k max(1, D) ||theta||_phi.
PullbackNormReport pullback_norm_report(const YoungFunction& phi, const SimplicialComplex& X,
                                        const SimplicialComplex& Y, const ChainMap& c, int k, int trials,
                                        std::uint64_t seed, double tol = 1e-10);

struct RelativeShift {
    double t_y = 0.0;
    double t_x = 0.0; // smallest threshold whose X-mask maps into the Y-mask
    double shift = 0.0;
};

/// Threshold t_x such that c_F sends every simplex of mask_X(t_x) into mask_Y(t_y).
RelativeShift pulled_back_threshold(const SimplicialComplex& X, const SimplicialComplex& Y, const ChainMap& c,
                                    const BoundaryPointModel& xi_x, const BoundaryPointModel& xi_y, double t_y);

struct IsomorphismReport {
    std::vector<Eigen::MatrixXd> forward;  // F#   : H^k(Y) -> H^k(X)
    std::vector<Eigen::MatrixXd> backward; // Fbar#: H^k(X) -> H^k(Y)
    std::vector<double> identity_error_x;  // |F# Fbar# - I|
    std::vector<double> identity_error_y;  // |Fbar# F# - I|
    std::size_t chain_defects = 0;
    std::size_t prism_defects = 0;
    /// integer cochains violating (Fbar F)* theta - theta = delta H theta + H delta theta, both sides
    std::size_t homotopy_defects = 0;
    QIConstants forward_constants;
    QIConstants backward_constants;
    bool ok(double tol) const;
};

IsomorphismReport check_qi_isomorphism(const SimplicialComplex& X, const SimplicialComplex& Y,
                                       const QuasiIsometry& F, int k_max, std::uint64_t seed = 1,
                                       const FillOptions& options = {});

} // namespace orlicz
