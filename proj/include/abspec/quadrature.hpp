#pragma once

#include <functional>

namespace abspec {

/// Adaptive Gauss-Kronrod integration of f over (a, b), relative tolerance
/// `rel_tol`. Thin wrapper so callers do not carry the boost include.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

} // namespace abspec
