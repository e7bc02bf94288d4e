#include "abspec/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abspec {

namespace {
constexpr double kIntegerTol = 1e-12;
}

FluxData canonicalize_flux(double nu)
{
    if (!std::isfinite(nu))
        throw std::invalid_argument("canonicalize_flux: flux must be finite");

    const double nearest = std::round(nu);
    double canonical = std::abs(nu - nearest);
    // round() ties go away from zero, which already yields canonical <= 1/2
    FluxData out;
    out.nu = nu;
    out.is_integer = canonical < kIntegerTol;
    out.canonical = out.is_integer ? 0.0 : canonical;
    return out;
}

std::vector<OrderEntry> order_sequence(double nu, int count)
{
    if (count < 1)
        throw std::invalid_argument("order_sequence: count must be >= 1");
    if (!std::isfinite(nu))
        throw std::invalid_argument("order_sequence: flux must be finite");

    const int k0 = static_cast<int>(std::lround(nu));
    std::vector<OrderEntry> candidates;
    candidates.reserve(2 * count + 5);
    for (int dk = -(count + 2); dk <= count + 2; ++dk) {
        const int k = k0 + dk;
        candidates.push_back({std::abs(k - nu), k});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const OrderEntry& a, const OrderEntry& b) {
                         if (a.order != b.order) return a.order < b.order;
                         if (std::abs(a.k) != std::abs(b.k))
                             return std::abs(a.k) < std::abs(b.k);
                         return a.k > b.k; // positive label first on exact ties
                     });
    candidates.resize(static_cast<size_t>(count));
    return candidates;
}

} // namespace abspec
