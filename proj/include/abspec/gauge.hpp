#pragma once

#include <vector>

namespace abspec {

/// A flux value together with its gauge-canonical representative.
///
/// Spectra of the Aharonov-Bohm operator depend on the flux nu only through
/// the distance to the nearest integer, so every solver works with
/// `canonical` in [0, 1/2].
struct FluxData {
    double nu = 0.0;        ///< flux as supplied
    double canonical = 0.0; ///< inf_k |nu - k|, in [0, 1/2]
    bool is_integer = false;
};

/// One angular mode: the Frobenius order |k - nu| and its integer label k.
struct OrderEntry {
    double order;
    int k;
};

/// Reduce a flux to its canonical representative. Integer detection uses
/// absolute tolerance 1e-12; non-finite input is rejected.
FluxData canonicalize_flux(double nu);

/// The `count` smallest values of |k - nu| over k in Z, ascending.
/// Ties are ordered by |k|, then positive k first (so nu = 1/2 lists
/// k = 0, 1, -1, 2, ...).
std::vector<OrderEntry> order_sequence(double nu, int count);

} // namespace abspec
