#include "sojourn/sojourn.hpp"

#include "sojourn/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace sojourn {

namespace {

struct OrbitData {
    Vec phi0;
    Vec vel;
    double a;  // |vel|^2
    double b;  // phi0 . vel
    double c0; // |phi0|^2
};

OrbitData orbit_data(const HamiltonianSystem& sys, const Vec& m)
{
    OrbitData d;
    d.phi0 = sys.position(m);
    d.vel = nabla_h(sys, m);
    d.a = d.vel.squaredNorm();
    d.b = d.phi0.dot(d.vel);
    d.c0 = d.phi0.squaredNorm();
    return d;
}

// Refine a predicted boundary crossing of psi (sign change near t_pred)
// through the true orbit. lo/hi fence the admissible bracket.
double refine_crossing(const std::function<double(double)>& psi, double t_pred, double lo,
                       double hi, double tol)
{
    const double span = 0.05 * std::max(t_pred, 1.0);
    double a = std::max(lo, t_pred - span);
    double b = std::min(hi, t_pred + span);
    double fa = psi(a), fb = psi(b);
    double widen = span;
    int guard = 0;
    while ((fa > 0) == (fb > 0)) {
        if (++guard > 48)
            throw NumericError("sojourn: could not bracket a boundary crossing near t = " +
                               std::to_string(t_pred));
        widen *= 1.7;
        a = std::max(lo, a - widen);
        b = std::min(hi, b + widen);
        fa = psi(a);
        fb = psi(b);
    }
    return find_crossing(psi, a, b, tol);
}

// Measure of {t >= 0 : |Phi(phi_{sigma t} m)| <= r} with endpoints located
// through the flow; predictions come from the linear-drift quadratic.
double inside_measure(const OrbitData& od, const std::function<double(double)>& psi, double r,
                      double sigma, double crossing_tol, double& t_last)
{
    const double sb = sigma * od.b;
    const double c = od.c0 - r * r;
    const double disc = od.b * od.b - od.a * c;
    if (disc <= 0.0) {
        // branch never enters the ball; spot-check at the closest approach
        const double t_v = -sb / od.a;
        if (t_v > 0.0 && psi(t_v) < 0.0)
            throw NumericError("sojourn: orbit entered the ball against the linear prediction");
        return 0.0;
    }
    const double root = std::sqrt(disc);
    const double t1 = (-sb - root) / od.a;
    const double t2 = (-sb + root) / od.a;
    if (t2 <= 0.0)
        return 0.0;
    const double mid = 0.5 * (t1 + t2);
    const double tol = crossing_tol * std::max(1.0, t2);
    const double t_out = refine_crossing(psi, t2, std::max(mid, 0.0),
                                         std::numeric_limits<double>::infinity(), tol);
    t_last = std::max(t_last, t_out);
    if (t1 <= 0.0)
        return t_out; // inside from the start
    const double t_in = refine_crossing(psi, t1, 0.0, std::max(mid, 0.0), tol);
    return t_out - t_in;
}

double diagnostic_zero_mode(const HamiltonianSystem& sys, const LocalisationFunction& f,
                            FlowCache& orbit, double r, const SojournOptions& opt, double& t_star)
{
    auto integrand = [&](double t) {
        return 0.5 * (f(sys.position(orbit.at(-t)) / r) - f(sys.position(orbit.at(t)) / r));
    };
    t_star = opt.critical_window;
    return integrate(integrand, 0.0, opt.critical_window, {opt.quad_tol});
}

} // namespace

SojournSample sojourn_difference(const HamiltonianSystem& sys, const LocalisationFunction& f,
                                 FlowCache& orbit, double r, const SojournOptions& opt)
{
    if (f.dim() != sys.d)
        throw std::domain_error("sojourn_difference: cutoff dimension does not match Phi");
    if (r <= 0.0)
        throw std::domain_error("sojourn_difference: radius must be positive");
    const Vec& m = orbit.base_point();
    const OrbitData od = orbit_data(sys, m);

    if (std::sqrt(od.a) < sys.critical_eps) {
        if (!opt.allow_critical)
            throw std::domain_error(sys.name + ": critical point, sojourn difference is a " +
                                    "0 = 0 identity there (enable the diagnostic mode to "
                                    "evaluate it)");
        SojournSample s;
        s.value = diagnostic_zero_mode(sys, f, orbit, r, opt, s.t_star);
        return s;
    }

    const double speed = std::sqrt(od.a);
    const double ax = std::sqrt(od.c0);

    if (f.kind() == LocalisationFunction::Kind::CharacteristicBall) {
        SojournSample s;
        double t_last = 0.0;
        auto psi_minus = [&](double t) {
            return sys.position(orbit.at(-t)).squaredNorm() - r * r;
        };
        auto psi_plus = [&](double t) {
            return sys.position(orbit.at(t)).squaredNorm() - r * r;
        };
        const double inside_minus = inside_measure(od, psi_minus, r, -1.0, opt.crossing_tol, t_last);
        const double inside_plus = inside_measure(od, psi_plus, r, +1.0, opt.crossing_tol, t_last);
        s.value = 0.5 * (inside_minus - inside_plus);
        s.t_star = t_last;
        return s;
    }

    // smooth cutoff: adaptive quadrature seeded at the plateau and
    // unit-scale kink times of both branches, then doubling extensions
    // until the analytic tail bound is met
    auto integrand = [&](double t) {
        return 0.5 * (f(sys.position(orbit.at(-t)) / r) - f(sys.position(orbit.at(t)) / r));
    };

    std::vector<double> pts{0.0};
    for (double level : {f.plateau_radius() * r, r}) {
        const double c = od.c0 - level * level;
        const double disc = od.b * od.b - od.a * c;
        if (disc <= 0.0)
            continue;
        const double root = std::sqrt(disc);
        for (double sb : {od.b, -od.b})
            for (double t : {(-sb - root) / od.a, (-sb + root) / od.a})
                if (t > 0.0)
                    pts.push_back(t);
    }
    pts.push_back(1.05 * (r + ax) / speed);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double value = integrate_segments(integrand, pts, {opt.quad_tol / 2.0});

    const double cg = f.gradient_decay_constant();
    const double rho = f.rho();
    auto tail_bound = [&](double T) {
        const double u = (T * speed - ax) / r;
        if (u <= 1.0)
            return std::numeric_limits<double>::infinity();
        return 2.0 * ax * cg / (speed * rho) * std::pow(u, -rho);
    };

    double T = pts.back();
    int guard = 0;
    while (ax > 0.0 && tail_bound(T) > opt.tail_tol) {
        if (++guard > 60)
            throw NumericError("sojourn: tail bound not reached by t = " + std::to_string(T));
        const double next = 2.0 * T;
        value += integrate(integrand, T, next, {opt.quad_tol / 4.0});
        T = next;
    }
    return {value, T};
}

SojournSample sojourn_difference(const HamiltonianSystem& sys, const LocalisationFunction& f,
                                 const Vec& m, double r, const SojournOptions& opt)
{
    FlowCache orbit(sys, m);
    return sojourn_difference(sys, f, orbit, r, opt);
}

SojournSample sojourn_difference_discrete(const HamiltonianSystem& sys,
                                          const LocalisationFunction& f, FlowCache& orbit,
                                          double r, const SojournOptions& opt)
{
    if (!f.has_hessian())
        throw UnsupportedFunctionError(
            "sojourn_difference_discrete: the discrete-time formula needs a cutoff with two "
            "decaying derivatives; the sharp ball is not admissible");
    if (f.dim() != sys.d)
        throw std::domain_error("sojourn_difference_discrete: cutoff dimension mismatch");
    const Vec& m = orbit.base_point();
    const OrbitData od = orbit_data(sys, m);

    if (std::sqrt(od.a) < sys.critical_eps) {
        if (!opt.allow_critical)
            throw std::domain_error(sys.name + ": critical point");
        SojournSample s;
        s.t_star = opt.critical_window;
        double sum = 0.0;
        for (int n = 1; n <= int(opt.critical_window); ++n)
            sum += 0.5 * (f(sys.position(orbit.at(-double(n))) / r) -
                          f(sys.position(orbit.at(double(n))) / r));
        s.value = sum;
        return s;
    }

    const double speed = std::sqrt(od.a);
    const double ax = std::sqrt(od.c0);
    const double cg = f.gradient_decay_constant();
    const double rho = f.rho();
    auto tail_bound = [&](double T) {
        const double u = (T * speed - ax) / r;
        if (u <= 1.0)
            return std::numeric_limits<double>::infinity();
        return 2.0 * ax * cg / (speed * rho) * std::pow(u, -rho);
    };

    double T = (r + ax) / speed + 1.0;
    int guard = 0;
    while (ax > 0.0 && tail_bound(T) > opt.tail_tol && ++guard < 60)
        T *= 2.0;
    if (ax > 0.0 && tail_bound(T) > opt.tail_tol)
        throw NumericError("sojourn (discrete): tail bound not reached by N = " +
                           std::to_string(T));

    const auto n_terms = static_cast<long long>(std::ceil(T));
    double sum = 0.0, comp = 0.0;
    for (long long n = 1; n <= n_terms; ++n) {
        const double t = double(n);
        const double term =
            0.5 * (f(sys.position(orbit.at(-t)) / r) - f(sys.position(orbit.at(t)) / r));
        const double yk = term - comp;
        const double tk = sum + yk;
        comp = (tk - sum) - yk;
        sum = tk;
    }
    return {sum, double(n_terms)};
}

SojournSeries converge(const HamiltonianSystem& sys, const LocalisationFunction& f, const Vec& m,
                       const std::vector<double>& radii, const SojournOptions& opt, bool discrete)
{
    if (radii.size() < 4)
        throw std::domain_error("converge: need a geometric schedule with at least four radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw std::domain_error("converge: radii must increase");

    SojournSeries series;
    series.radii = radii;
    series.discrete = discrete;

    FlowCache orbit(sys, m);
    SojournOptions local = opt;

    if (is_critical(sys, m)) {
        series.critical_point = true;
        series.reference = 0.0;
        local.allow_critical = true;
        for (double r : radii) {
            const SojournSample s = discrete ? sojourn_difference_discrete(sys, f, orbit, r, local)
                                             : sojourn_difference(sys, f, orbit, r, local);
            series.values.push_back(s.value);
            series.errors.push_back(std::abs(s.value));
            series.truncation_times.push_back(s.t_star);
        }
        series.extrapolated = series.values.back();
        series.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        series.energy_drift = orbit.energy_drift();
        double worst = 0.0;
        for (double v : series.values)
            worst = std::max(worst, std::abs(v));
        series.errors_decreasing = true;
        series.passed = worst <= opt.acceptance_tol * opt.reference_floor + 1e-9;
        return series;
    }

    series.reference = T_f_observable(sys, f, m, {opt.quad_tol});
    const double scale = std::max(std::abs(series.reference), opt.reference_floor);
    local.tail_tol = std::min(opt.tail_tol, 0.1 * opt.acceptance_tol * scale);

    for (double r : radii) {
        const SojournSample s = discrete ? sojourn_difference_discrete(sys, f, orbit, r, local)
                                         : sojourn_difference(sys, f, orbit, r, local);
        series.values.push_back(s.value);
        series.errors.push_back(std::abs(s.value - series.reference));
        series.truncation_times.push_back(s.t_star);
    }

    const LimitFit fit = fit_geometric_limit(series.radii, series.values);
    series.extrapolated = fit.limit;
    series.fitted_rate = fitted_error_rate(series.radii, series.errors);
    series.energy_drift = orbit.energy_drift();

    const std::size_t k = series.errors.size();
    const double floor = 1e-11 * scale;
    auto non_increasing = [floor](double a, double b) { return b <= a * 1.000001 + floor; };
    series.errors_decreasing = non_increasing(series.errors[k - 3], series.errors[k - 2]) &&
                               non_increasing(series.errors[k - 2], series.errors[k - 1]);
    series.passed = std::abs(series.extrapolated - series.reference) <=
                        opt.acceptance_tol * scale &&
                    series.errors_decreasing;
    return series;
}

} // namespace sojourn
