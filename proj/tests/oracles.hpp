#pragma once
// Brute-force reference computations for the test suites. Everything here
// is deliberately independent of the library's quadrature, differentiation
// and integration paths: plain composite rules, plain stencils, plain RK4.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

using Vec = Eigen::VectorXd;

/// Composite trapezoid over log-spaced nodes in [a, b], a > 0.
inline double trapezoid_log(const std::function<double(double)>& f, double a, double b,
                            int panels)
{
    const double la = std::log(a), lb = std::log(b);
    const double h = (lb - la) / panels;
    // substitute mu = e^s: integral of f(mu) dmu = integral of f(e^s) e^s ds
    double sum = 0.5 * (f(a) * a + f(b) * b);
    for (int i = 1; i < panels; ++i) {
        const double mu = std::exp(la + i * h);
        sum += f(mu) * mu;
    }
    return sum * h;
}

/// Plain composite trapezoid on uniform nodes.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int panels)
{
    const double h = (b - a) / panels;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < panels; ++i)
        sum += f(a + i * h);
    return sum * h;
}

/// Composite Simpson rule (panels must be even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels)
{
    const double h = (b - a) / panels;
    double sum = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

/// Second-order central differences with Richardson refinement; independent
/// of the library's fourth-order stencil.
inline Vec gradient(const std::function<double(const Vec&)>& g, const Vec& x)
{
    Vec out(x.size());
    for (int i = 0; i < x.size(); ++i) {
        const double h = 1e-4 * (1.0 + std::abs(x[i]));
        auto diff = [&](double step) {
            Vec xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            return (g(xp) - g(xm)) / (2.0 * step);
        };
        const double d1 = diff(h);
        const double d2 = diff(h / 2.0);
        out[i] = (4.0 * d2 - d1) / 3.0;
    }
    return out;
}

/// Canonical bracket of two scalar functions on (q, p) coordinates.
inline double canonical_bracket(const std::function<double(const Vec&)>& a,
                                const std::function<double(const Vec&)>& b, const Vec& m)
{
    const int n = int(m.size()) / 2;
    const Vec ga = gradient(a, m), gb = gradient(b, m);
    double s = 0.0;
    for (int j = 0; j < n; ++j)
        s += ga[j] * gb[n + j] - ga[n + j] * gb[j];
    return s;
}

/// Fixed-step classical RK4 for dx/dt = rhs(x).
inline Vec rk4(const std::function<Vec(const Vec&)>& rhs, Vec x, double t, double h)
{
    const int steps = std::max(1, int(std::ceil(std::abs(t) / h)));
    const double dt = t / steps;
    for (int i = 0; i < steps; ++i) {
        const Vec k1 = rhs(x);
        const Vec k2 = rhs(x + 0.5 * dt * k1);
        const Vec k3 = rhs(x + 0.5 * dt * k2);
        const Vec k4 = rhs(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

inline std::mt19937_64 rng(std::uint64_t seed = 20240901ull) { return std::mt19937_64(seed); }

inline Vec random_vec(std::mt19937_64& gen, int d, double lo = -2.0, double hi = 2.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(d);
    for (int i = 0; i < d; ++i)
        v[i] = u(gen);
    return v;
}

/// Uniform direction times a radius in [rmin, rmax], bounded away from 0.
inline Vec random_nonzero(std::mt19937_64& gen, int d, double rmin = 0.3, double rmax = 3.0)
{
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(rmin, rmax);
    Vec v(d);
    do {
        for (int i = 0; i < d; ++i)
            v[i] = n(gen);
    } while (v.norm() < 1e-8);
    return (u(gen) / v.norm()) * v;
}

} // namespace oracles
