#pragma once
// r -> infinity limit estimation on geometric radius schedules.

#include <vector>

namespace sojourn {

struct LimitFit {
    double limit = 0.0;   // extrapolated value
    double rate = 0.0;    // fitted decay exponent beta in value(r) = L + a r^-beta
    bool from_fit = false; // false: differences degenerate, limit = last value
};

/// Fit value(r) = L + a r^-beta through the last three samples of a
/// geometric schedule and return L. Falls back to the last sample when the
/// consecutive differences do not shrink geometrically.
LimitFit fit_geometric_limit(const std::vector<double>& radii, const std::vector<double>& values);

/// Least-squares slope of log(err) against log(r) over the last three
/// samples, reported as a positive decay rate. Errors at the rounding
/// floor give +infinity.
double fitted_error_rate(const std::vector<double>& radii, const std::vector<double>& errors);

/// r_k = first * factor^k, k = 0..count-1.
std::vector<double> geometric_radii(double first, double factor, int count);

} // namespace sojourn
