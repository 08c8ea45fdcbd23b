#pragma once

#include <cstddef>
#include <vector>

#include "orlicz/forms.hpp"
#include "orlicz/simplicial.hpp"

namespace orlicz {

/// Open box of the cover, in domain coordinates. On periodic axes it may extend past the period.
struct CoverBox {
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Lattice-aligned closed box: per axis an unwrapped start index and a point count.
struct LatticeBox {
    std::vector<int> start;
    std::vector<int> length;
    std::vector<double> lo; // real extent of the open intersection (unwrapped)
    std::vector<double> hi;
};

/// `per_axis`^n boxes tiling the lattice domain, each widened by `overlap` times its width on both sides.
std::vector<CoverBox> uniform_cover(const Grid& lattice, int per_axis, double overlap);

/**
 * Cover of a lattice domain by open boxes together with its nerve. Every
 * nonempty intersection is again a lattice box, so restrictions between
 * pieces are exact index maps. The partition of unity is the normalized
 * product bump (1 - s^2)^3 of each box.
 */
class CoverNerve {
public:
    /// Throws ResolutionError for boxes or intersections too thin to carry a grid and
    /// for uncovered samples; ConstructionError for disconnected intersections.
    static CoverNerve build(const Grid& lattice, std::vector<CoverBox> boxes, int max_level = 3);

    const Grid& lattice() const { return lattice_; }
    const SimplicialComplex& nerve() const { return nerve_; }
    std::size_t cover_size() const { return boxes_.size(); }
    int max_level() const { return nerve_.dim(); }
    const CoverBox& box(std::size_t U) const { return boxes_[U]; }

    const LatticeBox& piece(int level, std::size_t i) const { return pieces_[level][i]; }
    const Grid& piece_grid(int level, std::size_t i) const { return grids_[level][i]; }
    /// Global lattice index of every local point of a piece.
    const std::vector<std::size_t>& global_indices(int level, std::size_t i) const { return global_[level][i]; }
    /// For the j-th face of the i-th simplex: local index in the face piece of every local point.
    const std::vector<std::size_t>& face_map(int level, std::size_t i, int j) const { return face_maps_[level][i][j]; }
    /// Index of the j-th face (vertex j removed) of the i-th simplex of a level.
    std::size_t face(int level, std::size_t i, int j) const { return face_index_[level][i][j]; }

    /// eta_U on the global lattice.
    const std::vector<double>& partition(std::size_t U) const { return partition_[U]; }
    /// Bi-Lipschitz constant of the affine chart sending box U onto [-1, 1]^n.
    double chart_lipschitz(std::size_t U) const;
    /// Largest number of boxes containing a lattice point.
    int multiplicity() const { return multiplicity_; }

private:
    Grid lattice_;
    std::vector<CoverBox> boxes_;
    SimplicialComplex nerve_;
    std::vector<std::vector<LatticeBox>> pieces_;
    std::vector<std::vector<Grid>> grids_;
    std::vector<std::vector<std::vector<std::size_t>>> global_;
    std::vector<std::vector<std::vector<std::vector<std::size_t>>>> face_maps_;
    std::vector<std::vector<std::vector<std::size_t>>> face_index_;
    std::vector<std::vector<double>> partition_;
    int multiplicity_ = 0;
};

/// Element of C^{k,l}: a k-form on every piece of the l-skeleton of the nerve.
struct BicomplexElement {
    int k = 0;
    int l = 0;
    std::vector<DiscreteForm> pieces;
};

BicomplexElement zero_element(const CoverNerve& cn, int k, int l);
/// fn(simplex index, x, out) gives the form on that piece.
BicomplexElement sample_element(const CoverNerve& cn, int k, int l,
                                const std::function<void(std::size_t, const double*, double*)>& fn);
/// Restriction of a global form (on the lattice) to the pieces of level 0.
BicomplexElement restrict_global(const CoverNerve& cn, const DiscreteForm& global);
/// Piecewise constants at bidegree (0, l).
BicomplexElement embed_cochain(const CoverNerve& cn, const Cochain& theta);

/// (d'e)_W = (-1)^l d e_W.
BicomplexElement d_prime(const CoverNerve& cn, const BicomplexElement& e, int fd_order = 2);
/// (d''e)_W = sum_i (-1)^i e_{W \ U_i} restricted to W.
BicomplexElement d_double_prime(const CoverNerve& cn, const BicomplexElement& e);

/// (He)_W = (-1)^l h_W(e_W), with h_W the Poincare homotopy of the box piece (k >= 1).
BicomplexElement local_retraction(const CoverNerve& cn, const BicomplexElement& e,
                                  const PoincareOptions& options = {});
/// Degree-0 counterpart of H: the half-box mean of each piece, as a nerve cochain of degree l.
Cochain piece_means(const CoverNerve& cn, const BicomplexElement& e, const PoincareOptions& options = {});

/// (Pe)_V = sum_U eta_U e_{UV}, extended by zero (l >= 1).
BicomplexElement cech_contraction(const CoverNerve& cn, const BicomplexElement& e);
/// l = 0: the global form sum_U eta_U e_U on the lattice.
DiscreteForm glue(const CoverNerve& cn, const BicomplexElement& e);

double sup_norm(const BicomplexElement& e);
BicomplexElement difference(const BicomplexElement& a, const BicomplexElement& b);

/// sup |d'd''e + d''d'e|.
double anticommutator_residual(const CoverNerve& cn, const BicomplexElement& e, int fd_order = 2);
/// sup |d''d''e|.
double d2_double_prime_residual(const CoverNerve& cn, const BicomplexElement& e);
/// sup |H d'e + d'H e - e| (k >= 1); for k = 0, sup |H d'e + means(e) - e|.
double retraction_residual(const CoverNerve& cn, const BicomplexElement& e, const PoincareOptions& options = {},
                           int fd_order = 2);
/// sup |P d''e + d''P e - e|; at l = 0 the second term is the restriction of glue(e).
double contraction_residual(const CoverNerve& cn, const BicomplexElement& e);

struct ElementNorms {
    int k = 0;
    int l = 0;
    std::vector<double> piece_norms;   // ||e_W||_phi
    std::vector<double> piece_d_norms; // ||d e_W||_phi
    double lphi = 0.0;                 // ||piece norms||_{l^phi} + ||piece d-norms||_{l^phi}
};

ElementNorms element_norms(const YoungFunction& phi, const CoverNerve& cn, const BicomplexElement& e);

struct ZigzagOptions {
    PoincareOptions poincare{};
    int fd_order = 4;
    double closed_tol = 1e-2; // relative tolerance for the closedness precondition
};

struct ZigzagSimplicialResult {
    Cochain cocycle;
    double cocycle_defect = 0.0;   // sup |delta cocycle|
    double constancy_defect = 0.0; // sup over pieces of |e - mean| at the bottom stage
    std::vector<ElementNorms> stages;
};

/// Closed global k-form -> k-cochain on the nerve by the H, d'' staircase.
ZigzagSimplicialResult zigzag_to_simplicial(const YoungFunction& phi, const CoverNerve& cn, const DiscreteForm& omega,
                                            const ZigzagOptions& options = {});

struct ZigzagFormResult {
    DiscreteForm form;
    double closedness_defect = 0.0; // sup |d form|
    double gluing_defect = 0.0;     // sup |d'' c_0| before gluing
    std::vector<ElementNorms> stages;
};

/// k-cocycle on the nerve -> closed global k-form by the P, d' staircase.
ZigzagFormResult zigzag_to_form(const YoungFunction& phi, const CoverNerve& cn, const Cochain& theta,
                                const ZigzagOptions& options = {});

/// Orthogonal projection onto ker delta_k.
Cochain project_to_cocycles(const SimplicialComplex& X, const Cochain& theta);

/// sum over consecutive vertex pairs (closing the loop) of the oriented cochain value.
double loop_pairing(const SimplicialComplex& X, const Cochain& theta, const std::vector<int>& loop);

/// Periods of a 1-form on a periodic 2D lattice along the two coordinate loops, averaged over parallel loops.
std::vector<double> torus_periods(const DiscreteForm& omega);

} // namespace orlicz
