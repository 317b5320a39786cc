#pragma once
// Adaptive Gauss-Kronrod quadrature and 1-D root location.

#include "sojourn/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace sojourn {

namespace gk15 {
// 15-point Kronrod abscissae with embedded 7-point Gauss rule.
inline constexpr double nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0};
inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};
} // namespace gk15

template <class T>
struct PanelEstimate {
    T value;
    double error;
};

namespace detail {
inline double panel_norm(double v) { return std::abs(v); }
inline double panel_norm(const Vec& v) { return v.lpNorm<Eigen::Infinity>(); }
} // namespace detail

/// One Kronrod panel over [a,b]. The error estimate follows the QUADPACK
/// sharpening of the plain Gauss/Kronrod gap.
template <class F, class T = std::invoke_result_t<F, double>>
PanelEstimate<T> kronrod_panel(F&& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    T fc = f(c);
    T resg = gk15::gauss_w[3] * fc;
    T resk = gk15::kronrod_w[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk15::nodes[j];
        T fsum = f(c - dx) + f(c + dx);
        resk += gk15::kronrod_w[j] * fsum;
        if (j % 2 == 1)
            resg += gk15::gauss_w[(j - 1) / 2] * fsum;
    }
    T value = h * resk;
    double err = std::abs(h) * detail::panel_norm(resk - resg);
    if (err > 0.0)
        err = std::min(err, std::pow(200.0 * err, 1.5));
    return {value, err};
}

struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_panels = 4000;
};

/// Integrate f over [a,b], bisecting the worst panel until the summed
/// error estimate meets the absolute tolerance.
template <class F, class T = std::invoke_result_t<F, double>>
T integrate(F&& f, double a, double b, const QuadratureOptions& opt = {})
{
    struct Panel {
        double a, b, error;
        T value;
    };
    if (a == b)
        return T(0.0 * kronrod_panel(f, a, a + 1.0).value); // zero of the right shape
    if (b < a)
        throw std::domain_error("integrate: inverted interval");

    std::vector<Panel> panels;
    auto push = [&](double lo, double hi) {
        auto r = kronrod_panel(f, lo, hi);
        panels.push_back(Panel{lo, hi, r.error, r.value});
    };
    push(a, b);
    double total_error = panels[0].error;

    while (total_error > opt.abs_tol && (int)panels.size() < opt.max_panels) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;
        Panel bad = panels[worst];
        if (bad.b - bad.a < 1e-15 * (1.0 + std::abs(bad.a)))
            break; // panel width at rounding floor
        panels.erase(panels.begin() + worst);
        total_error -= bad.error;
        const double mid = 0.5 * (bad.a + bad.b);
        push(bad.a, mid);
        total_error += panels.back().error;
        push(mid, bad.b);
        total_error += panels.back().error;
    }
    if (total_error > 10.0 * opt.abs_tol)
        throw NumericError("quadrature did not converge: estimated error " +
                           std::to_string(total_error) + " over [" + std::to_string(a) + "," +
                           std::to_string(b) + "] with " + std::to_string(panels.size()) +
                           " panels");

    T sum = panels[0].value;
    for (std::size_t i = 1; i < panels.size(); ++i)
        sum += panels[i].value;
    return sum;
}

/// Integrate over [pts[0], pts.back()] respecting interior breakpoints
/// (integrand kinks, plateau and support boundaries).
template <class F, class T = std::invoke_result_t<F, double>>
T integrate_segments(F&& f, const std::vector<double>& pts, const QuadratureOptions& opt = {})
{
    if (pts.size() < 2)
        throw std::domain_error("integrate_segments: need at least two breakpoints");
    QuadratureOptions seg = opt;
    seg.abs_tol = opt.abs_tol / double(pts.size() - 1);
    T sum = integrate(f, pts[0], pts[1], seg);
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
        sum += integrate(f, pts[i], pts[i + 1], seg);
    return sum;
}

/// Brent root location for a bracketed sign change g(lo)*g(hi) <= 0.
inline double find_crossing(const std::function<double(double)>& g, double lo, double hi,
                            double tol_x)
{
    double a = lo, b = hi;
    double fa = g(a), fb = g(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0))
        throw NumericError("find_crossing: endpoints do not bracket a sign change");

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol_x;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0)
            return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = g(b);
    }
    throw NumericError("find_crossing: no convergence");
}

} // namespace sojourn
