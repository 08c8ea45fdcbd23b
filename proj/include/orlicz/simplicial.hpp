#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "orlicz/errors.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Sorted vertex tuple; its dimension is size() - 1.
using Simplex = std::vector<int>;

struct Face {
    std::size_t index; // position in the (k-1)-simplex list
    int sign;          // (-1)^i for the omitted vertex i
};

/**
 * Finite oriented simplicial complex. Simplices are sorted vertex tuples,
 * listed per dimension in lexicographic order, so the orientation of each
 * simplex is the one induced by the vertex order.
 */
class SimplicialComplex {
public:
    SimplicialComplex() = default;

    /// Downward closure of the given simplices; vertices 0..n_vertices-1 are
    /// always present (isolated ones included).
    static SimplicialComplex from_maximal(const std::vector<Simplex>& simplices, int n_vertices = 0);
    /// Explicit simplex lists per dimension; throws ConstructionError when a
    /// face is missing or a tuple is malformed.
    static SimplicialComplex from_levels(std::vector<std::vector<Simplex>> levels);

    int dim() const { return static_cast<int>(levels_.size()) - 1; }
    std::size_t count(int k) const;
    std::size_t vertex_count() const { return count(0); }
    const std::vector<Simplex>& simplices(int k) const;
    const Simplex& simplex(int k, std::size_t i) const { return simplices(k)[i]; }
    std::optional<std::size_t> find(const Simplex& s) const;

    /// Faces of the i-th k-simplex, k >= 1, with incidence signs.
    const std::vector<Face>& faces(int k, std::size_t i) const { return faces_[k][i]; }
    /// Number of (k+1)-simplices having the given k-simplex as a face.
    int coface_count(int k, std::size_t i) const { return cofaces_[k][i]; }
    /// Largest coface count over k-simplices.
    int max_cofaces(int k) const;
    /// N(1): largest coface count over all degrees.
    int n1() const;
    /// Largest number of simplices whose vertices all lie in a combinatorial
    /// ball of radius r around a vertex.
    std::size_t local_count(int r) const;

    const std::vector<std::vector<int>>& adjacency() const { return adjacency_; }
    /// BFS distances on the 1-skeleton; -1 when unreachable.
    std::vector<int> vertex_distances(int source) const;
    std::vector<int> distances_to_set(std::span<const int> sources) const;

    /// Dense signed incidence matrix of delta_k: count(k+1) x count(k).
    Eigen::MatrixXd coboundary_matrix(int k) const;
    long euler_characteristic() const;

    void set_positions(std::vector<std::vector<double>> positions);
    const std::vector<std::vector<double>>& positions() const { return positions_; }

private:
    void index();

    std::vector<std::vector<Simplex>> levels_;
    std::vector<std::map<Simplex, std::size_t>> lookup_;
    std::vector<std::vector<std::vector<Face>>> faces_;
    std::vector<std::vector<int>> cofaces_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<std::vector<double>> positions_;
};

namespace complexes {

SimplicialComplex cycle(int n);
/// Path 0 - 1 - ... - (n-1); truncation of an infinite ray.
SimplicialComplex path(int n);
SimplicialComplex filled_triangle();
/// Minimal 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
SimplicialComplex torus7();
/// Periodic m x n grid, each square cut along its diagonal.
SimplicialComplex torus_grid(int m, int n);
/// Triangulated (m+1) x (n+1) square grid; a contractible disk.
SimplicialComplex disk_grid(int m, int n);
SimplicialComplex random_tree(int n, std::uint64_t seed);
/**
 * Random complex of dimension <= 3 whose simplices only join vertices within
 * a window of the given width along a cyclic order, which bounds the degree.
 */
SimplicialComplex random_bounded(int n_vertices, int window, std::uint64_t seed);

} // namespace complexes

/// Values on the k-simplices of a complex, aligned with simplices(k).
struct Cochain {
    int degree = 0;
    std::vector<double> values;

    static Cochain zero(const SimplicialComplex& X, int k);
    /// Values on arbitrarily ordered vertex tuples; the stored value on the
    /// sorted simplex carries the sign of the sorting permutation.
    static Cochain from_oriented(const SimplicialComplex& X, int k,
                                 const std::vector<std::pair<std::vector<int>, double>>& entries);
};

/// Sign of the permutation sorting the tuple; 0 when a vertex repeats.
int permutation_sign(std::vector<int>& tuple);

template <class T>
std::vector<T> coboundary_values(const SimplicialComplex& X, int k, std::span<const T> theta)
{
    if (k < 0 || k > X.dim())
        throw InputError("coboundary degree outside the complex");
    if (theta.size() != X.count(k))
        throw InputError("cochain size does not match the complex");
    if (k == X.dim())
        return {};
    std::vector<T> out(X.count(k + 1), T(0));
    for (std::size_t s = 0; s < out.size(); ++s) {
        T acc(0);
        for (const Face& f : X.faces(k + 1, s))
            acc += f.sign > 0 ? theta[f.index] : -theta[f.index];
        out[s] = acc;
    }
    return out;
}

Cochain coboundary(const SimplicialComplex& X, const Cochain& theta);

/// delta^T applied to a (k+1)-cochain; the simplicial boundary on chains.
std::vector<double> coboundary_transpose(const SimplicialComplex& X, int k, std::span<const double> values);

double cochain_norm(const YoungFunction& phi, const Cochain& theta, double tol = 1e-10);

struct ContinuityReport {
    int degree = 0;
    int trials = 0;
    int n1 = 0;                  // coface bound for this degree
    double worst_ratio = 0.0;    // max ||delta theta|| / ||theta||
    double constant = 0.0;       // max(k + 2, N(1))
    double worst_exact = 0.0;    // max ||delta theta|| / ((k+2) ||theta||_{(N(1)/(k+2)) phi})
    int violations = 0;
    bool delta_squared_zero = true;
    bool holds() const { return violations == 0 && delta_squared_zero; }
};

/**
 * Samples random k-cochains and compares ||delta theta||_phi with
 * (k + 2) ||theta||_{(N/(k+2)) phi} <= max(k + 2, N) ||theta||_phi, N the
 * coface bound. Convexity over the k + 2 faces of each simplex gives the
 * first inequality; the second is the K-equivalence of scaled norms.
 */
ContinuityReport delta_continuity_report(const YoungFunction& phi, const SimplicialComplex& X, int k, int trials,
                                         std::uint64_t seed, double tol = 1e-10);

/// dim ker delta_k - rank delta_{k-1}.
int cohomology_dim(const SimplicialComplex& X, int k);
int matrix_rank(const Eigen::MatrixXd& m);
/// Orthonormal basis of ker delta_k intersected with ker delta_{k-1}^T.
Eigen::MatrixXd harmonic_basis(const SimplicialComplex& X, int k);

struct ReducedResult {
    std::vector<double> eta;  // degree k-1
    Cochain representative;   // theta - delta eta
    double residual = 0.0;    // ||theta - delta eta||_phi
    double initial_residual = 0.0; // at the least-squares warm start
    int iterations = 0;
};

/**
 * Approximate argmin over eta of ||theta - delta eta||_phi by a level-controlled
 * Polyak subgradient method warm-started at the least-squares solution.
 */
ReducedResult reduced_representative(const YoungFunction& phi, const SimplicialComplex& X, const Cochain& theta,
                                     double tol = 1e-8, int max_iterations = 10000);

/// Ray toward a boundary point together with a horoparameter.
struct BoundaryPointModel {
    int base = 0;
    std::vector<int> ray; // starts at base, consecutive vertices adjacent
    double t = std::numeric_limits<double>::infinity();
};

/// b(x) = d(x, base) - 2 dist(x, ray); -inf on other components.
std::vector<double> busemann_values(const SimplicialComplex& X, const BoundaryPointModel& xi);

/// masked[k][i] is set when every vertex of the simplex has b > t.
struct RelativeMask {
    std::vector<std::vector<char>> masked;
    bool contains(int k, std::size_t i) const { return masked[k][i] != 0; }
    std::size_t size(int k) const;
};

RelativeMask relative_mask(const SimplicialComplex& X, const BoundaryPointModel& xi);
RelativeMask relative_mask(const SimplicialComplex& X, const BoundaryPointModel& xi, double t);
bool vanishes_on(const Cochain& theta, const RelativeMask& mask, double tol = 0.0);

} // namespace orlicz
