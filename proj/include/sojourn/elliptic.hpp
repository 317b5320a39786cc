#pragma once
// Incomplete elliptic integral of the first kind via Carlson's symmetric
// form with the duplication algorithm.

namespace sojourn {

/// Carlson symmetric integral R_F(x,y,z); x,y,z >= 0 with at most one zero.
double carlson_rf(double x, double y, double z);

/// F(phi | k) = Int_0^phi dtheta / sqrt(1 - k^2 sin^2 theta) on the
/// principal branch |phi| <= pi/2, modulus 0 <= k < 1.
double elliptic_F(double phi, double k);

/// Complete integral K(k) = F(pi/2 | k).
double elliptic_K(double k);

/// F extended to all real phi by the quasi-periodicity
/// F(phi + n pi | k) = F(phi | k) + 2 n K(k).
double elliptic_F_real(double phi, double k);

} // namespace sojourn
