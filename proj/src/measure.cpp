#include "orlicz/measure.hpp"

#include <cmath>

#include "orlicz/errors.hpp"

namespace orlicz {

MeasureSpace::MeasureSpace(std::vector<Atom> atoms) : atoms_(std::move(atoms))
{
    // Kahan summation keeps total_mass within 1e-12 relative of the exact sum.
    double sum = 0.0;
    double carry = 0.0;
    for (const Atom& a : atoms_) {
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw InputError("measure atoms need strictly positive finite weights");
        const double y = a.weight - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    total_mass_ = sum;
}

MeasureSpace MeasureSpace::counting(std::size_t n)
{
    std::vector<Atom> atoms(n);
    for (std::size_t i = 0; i < n; ++i)
        atoms[i] = {static_cast<std::int64_t>(i), 1.0};
    return MeasureSpace(std::move(atoms));
}

MeasureSpace MeasureSpace::weighted(const std::vector<double>& weights)
{
    std::vector<Atom> atoms(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        atoms[i] = {static_cast<std::int64_t>(i), weights[i]};
    return MeasureSpace(std::move(atoms));
}

} // namespace orlicz
