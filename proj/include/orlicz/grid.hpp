#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace orlicz {

/**
 * Uniform tensor grid. A closed axis has nodes lo + i h with h = (hi - lo)/(N - 1),
 * both ends included. A periodic axis has h = (hi - lo)/N and wraps.
 * Axis 0 varies fastest in the flat index.
 */
class Grid {
public:
    static constexpr int kMaxDim = 3;

    Grid() = default;
    Grid(std::vector<double> lo, std::vector<double> hi, std::vector<int> points, std::vector<bool> periodic = {});

    int dim() const { return static_cast<int>(lo_.size()); }
    std::size_t size() const { return size_; }
    int points(int axis) const { return n_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    bool periodic(int axis) const { return periodic_[axis]; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    std::size_t stride(int axis) const { return stride_[axis]; }

    double coord(int axis, int i) const { return lo_[axis] + i * h_[axis]; }
    void multi_index(std::size_t flat, int* out) const;
    std::size_t flat_index(const int* multi) const;
    void point(std::size_t flat, double* out) const;

    /// Trapezoid weights (uniform on periodic axes).
    std::vector<double> quadrature_weights() const;

    /// Finite-difference partial derivative along an axis, order 2 or 4;
    /// one-sided stencils of the same order near closed ends.
    std::vector<double> derivative(std::span<const double> f, int axis, int order = 2) const;

    struct Stencil {
        int count = 0;
        std::array<std::size_t, 64> index;
        std::array<double, 64> weight;
    };
    /// Tensor cubic Lagrange stencil at x; closed axes shift the stencil inward,
    /// so points slightly outside are extrapolated.
    void stencil(const double* x, Stencil& s) const;
    double interpolate(std::span<const double> f, const double* x) const;

    bool same_layout(const Grid& o) const;

private:
    std::vector<double> lo_, hi_, h_;
    std::vector<int> n_;
    std::vector<bool> periodic_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 0;
};

} // namespace orlicz
