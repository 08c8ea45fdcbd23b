#include "orlicz/grid.hpp"

#include <algorithm>
#include <cmath>

#include "orlicz/errors.hpp"

namespace orlicz {

Grid::Grid(std::vector<double> lo, std::vector<double> hi, std::vector<int> points, std::vector<bool> periodic)
    : lo_(std::move(lo)), hi_(std::move(hi)), n_(std::move(points)), periodic_(std::move(periodic))
{
    const std::size_t d = lo_.size();
    if (d == 0 || d > static_cast<std::size_t>(kMaxDim) || hi_.size() != d || n_.size() != d)
        throw InputError("grid needs 1 to 3 axes with matching bounds and sizes");
    if (periodic_.empty())
        periodic_.assign(d, false);
    if (periodic_.size() != d)
        throw InputError("periodic flags do not match the grid dimension");
    h_.resize(d);
    stride_.resize(d);
    size_ = 1;
    for (std::size_t a = 0; a < d; ++a) {
        if (!(hi_[a] > lo_[a]))
            throw InputError("grid axis needs lo < hi");
        if (n_[a] < 4)
            throw InputError("grid axis needs at least 4 points");
        h_[a] = (hi_[a] - lo_[a]) / (periodic_[a] ? n_[a] : n_[a] - 1);
        stride_[a] = size_;
        size_ *= static_cast<std::size_t>(n_[a]);
    }
}

void Grid::multi_index(std::size_t flat, int* out) const
{
    for (int a = 0; a < dim(); ++a) {
        out[a] = static_cast<int>(flat % static_cast<std::size_t>(n_[a]));
        flat /= static_cast<std::size_t>(n_[a]);
    }
}

std::size_t Grid::flat_index(const int* multi) const
{
    std::size_t f = 0;
    for (int a = 0; a < dim(); ++a)
        f += static_cast<std::size_t>(multi[a]) * stride_[a];
    return f;
}

void Grid::point(std::size_t flat, double* out) const
{
    int m[kMaxDim];
    multi_index(flat, m);
    for (int a = 0; a < dim(); ++a)
        out[a] = coord(a, m[a]);
}

std::vector<double> Grid::quadrature_weights() const
{
    std::vector<double> w(size_, 1.0);
    int m[kMaxDim];
    for (std::size_t p = 0; p < size_; ++p) {
        multi_index(p, m);
        for (int a = 0; a < dim(); ++a) {
            double f = h_[a];
            if (!periodic_[a] && (m[a] == 0 || m[a] == n_[a] - 1))
                f *= 0.5;
            w[p] *= f;
        }
    }
    return w;
}

std::vector<double> Grid::derivative(std::span<const double> f, int axis, int order) const
{
    if (f.size() != size_)
        throw InputError("field size does not match the grid");
    if (axis < 0 || axis >= dim())
        throw InputError("derivative axis outside the grid");
    if (order != 2 && order != 4)
        throw InputError("finite differences of order 2 or 4 only");
    const int n = n_[axis];
    if (order == 4 && n < 5)
        throw InputError("order-4 differences need 5 points per axis");
    const std::size_t s = stride_[axis];
    const double h = h_[axis];
    const bool per = periodic_[axis];
    std::vector<double> out(size_);
    int m[kMaxDim];
    for (std::size_t p = 0; p < size_; ++p) {
        multi_index(p, m);
        const int i = m[axis];
        const std::size_t base = p - static_cast<std::size_t>(i) * s;
        auto at = [&](int j) {
            if (per)
                j = ((j % n) + n) % n;
            return f[base + static_cast<std::size_t>(j) * s];
        };
        double d;
        if (order == 2) {
            if (per || (i > 0 && i < n - 1))
                d = (at(i + 1) - at(i - 1)) / (2 * h);
            else if (i == 0)
                d = (-3 * at(0) + 4 * at(1) - at(2)) / (2 * h);
            else
                d = (3 * at(n - 1) - 4 * at(n - 2) + at(n - 3)) / (2 * h);
        } else {
            if (per || (i > 1 && i < n - 2))
                d = (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * h);
            else if (i == 0)
                d = (-25 * at(0) + 48 * at(1) - 36 * at(2) + 16 * at(3) - 3 * at(4)) / (12 * h);
            else if (i == 1)
                d = (-3 * at(0) - 10 * at(1) + 18 * at(2) - 6 * at(3) + at(4)) / (12 * h);
            else if (i == n - 1)
                d = (25 * at(n - 1) - 48 * at(n - 2) + 36 * at(n - 3) - 16 * at(n - 4) + 3 * at(n - 5)) / (12 * h);
            else
                d = (3 * at(n - 1) + 10 * at(n - 2) - 18 * at(n - 3) + 6 * at(n - 4) - at(n - 5)) / (12 * h);
        }
        out[p] = d;
    }
    return out;
}

void Grid::stencil(const double* x, Stencil& s) const
{
    const int d = dim();
    int base[kMaxDim];
    double w1[kMaxDim][4];
    for (int a = 0; a < d; ++a) {
        const double u = (x[a] - lo_[a]) / h_[a];
        int i0 = static_cast<int>(std::floor(u)) - 1;
        if (!periodic_[a])
            i0 = std::clamp(i0, 0, n_[a] - 4);
        const double t = u - i0; // stencil nodes at 0, 1, 2, 3
        w1[a][0] = -(t - 1) * (t - 2) * (t - 3) / 6.0;
        w1[a][1] = t * (t - 2) * (t - 3) / 2.0;
        w1[a][2] = -t * (t - 1) * (t - 3) / 2.0;
        w1[a][3] = t * (t - 1) * (t - 2) / 6.0;
        base[a] = i0;
    }
    int total = 1;
    for (int a = 0; a < d; ++a)
        total *= 4;
    s.count = total;
    for (int c = 0; c < total; ++c) {
        int rem = c;
        std::size_t idx = 0;
        double w = 1.0;
        for (int a = 0; a < d; ++a) {
            const int o = rem & 3;
            rem >>= 2;
            int j = base[a] + o;
            if (periodic_[a])
                j = ((j % n_[a]) + n_[a]) % n_[a];
            idx += static_cast<std::size_t>(j) * stride_[a];
            w *= w1[a][o];
        }
        s.index[c] = idx;
        s.weight[c] = w;
    }
}

double Grid::interpolate(std::span<const double> f, const double* x) const
{
    Stencil s;
    stencil(x, s);
    double v = 0.0;
    for (int c = 0; c < s.count; ++c)
        v += s.weight[c] * f[s.index[c]];
    return v;
}

bool Grid::same_layout(const Grid& o) const
{
    return lo_ == o.lo_ && hi_ == o.hi_ && n_ == o.n_ && periodic_ == o.periodic_;
}

} // namespace orlicz
