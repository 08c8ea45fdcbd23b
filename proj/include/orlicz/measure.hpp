#pragma once

#include <cstdint>
#include <vector>

namespace orlicz {

struct Atom {
    std::int64_t id = 0;
    double weight = 1.0;
};

/// Finite weighted atom list; counting measure and quadrature cells alike.
class MeasureSpace {
public:
    MeasureSpace() = default;
    explicit MeasureSpace(std::vector<Atom> atoms);

    static MeasureSpace counting(std::size_t n);
    /// Atoms with ids 0..n-1 and the given weights.
    static MeasureSpace weighted(const std::vector<double>& weights);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double weight(std::size_t i) const { return atoms_[i].weight; }
    double total_mass() const { return total_mass_; }

private:
    std::vector<Atom> atoms_;
    double total_mass_ = 0.0;
};

} // namespace orlicz
