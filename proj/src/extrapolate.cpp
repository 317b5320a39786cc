#include "sojourn/extrapolate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sojourn {

LimitFit fit_geometric_limit(const std::vector<double>& radii, const std::vector<double>& values)
{
    if (radii.size() != values.size() || radii.size() < 3)
        throw std::invalid_argument("fit_geometric_limit: need three matched samples");

    const std::size_t n = values.size();
    const double d1 = values[n - 2] - values[n - 3];
    const double d2 = values[n - 1] - values[n - 2];
    const double q = radii[n - 1] / radii[n - 2];

    LimitFit fit;
    fit.limit = values[n - 1];
    fit.rate = std::numeric_limits<double>::quiet_NaN();

    const double scale = std::abs(values[n - 1]) + 1.0;
    if (std::abs(d2) < 1e-14 * scale || std::abs(d1) < 1e-14 * scale)
        return fit; // converged to rounding level, last value is the limit
    const double theta = d2 / d1;
    if (!(theta > 0.0) || !(theta < 1.0))
        return fit; // differences not shrinking geometrically
    fit.rate = -std::log(theta) / std::log(q);
    fit.limit = values[n - 1] + d2 * theta / (1.0 - theta);
    fit.from_fit = true;
    return fit;
}

double fitted_error_rate(const std::vector<double>& radii, const std::vector<double>& errors)
{
    if (radii.size() != errors.size() || radii.size() < 3)
        throw std::invalid_argument("fitted_error_rate: need three matched samples");
    const std::size_t n = errors.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = n - 3; i < n; ++i) {
        if (errors[i] <= 0.0)
            return std::numeric_limits<double>::infinity();
        const double lx = std::log(radii[i]);
        const double ly = std::log(errors[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    return -slope;
}

std::vector<double> geometric_radii(double first, double factor, int count)
{
    if (first <= 0.0 || factor <= 1.0 || count < 1)
        throw std::invalid_argument("geometric_radii: need first > 0, factor > 1, count >= 1");
    std::vector<double> r(count);
    r[0] = first;
    for (int k = 1; k < count; ++k)
        r[k] = r[k - 1] * factor;
    return r;
}

} // namespace sojourn
