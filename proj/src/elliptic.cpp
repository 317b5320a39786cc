#include "sojourn/elliptic.hpp"

#include <cmath>
#include <stdexcept>

namespace sojourn {

double carlson_rf(double x, double y, double z)
{
    if (x < 0.0 || y < 0.0 || z < 0.0 || (x + y) == 0.0 || (y + z) == 0.0 || (z + x) == 0.0)
        throw std::domain_error("carlson_rf: arguments must be nonnegative with at most one zero");

    const double errtol = 1.2e-3; // truncation ~ errtol^6, below double rounding
    double xt = x, yt = y, zt = z;
    double ave, dx, dy, dz;
    do {
        const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        const double lam = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        ave = (xt + yt + zt) / 3.0;
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
    } while (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) > errtol);

    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    const double c1 = 1.0 / 24.0, c2 = 0.1, c3 = 3.0 / 44.0, c4 = 1.0 / 14.0;
    return (1.0 + (c1 * e2 - c2 - c3 * e3) * e2 + c4 * e3) / std::sqrt(ave);
}

double elliptic_F(double phi, double k)
{
    if (!(k >= 0.0) || k >= 1.0)
        throw std::domain_error("elliptic_F: modulus must satisfy 0 <= k < 1");
    const double half_pi = std::asin(1.0);
    if (std::abs(phi) > half_pi * (1.0 + 1e-12))
        throw std::domain_error("elliptic_F: principal branch needs |phi| <= pi/2");
    if (phi == 0.0)
        return 0.0;
    const double s = std::sin(phi);
    const double c2 = std::max(0.0, 1.0 - s * s);
    return s * carlson_rf(c2, 1.0 - k * k * s * s, 1.0);
}

double elliptic_K(double k)
{
    if (!(k >= 0.0) || k >= 1.0)
        throw std::domain_error("elliptic_K: modulus must satisfy 0 <= k < 1");
    return carlson_rf(0.0, 1.0 - k * k, 1.0);
}

double elliptic_F_real(double phi, double k)
{
    const double pi = 2.0 * std::asin(1.0);
    const double n = std::round(phi / pi);
    const double rem = phi - n * pi;
    double value = (n == 0.0) ? 0.0 : 2.0 * n * elliptic_K(k);
    return value + elliptic_F(rem, k);
}

} // namespace sojourn
