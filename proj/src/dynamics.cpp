#include "sojourn/dynamics.hpp"

#include "sojourn/integrators.hpp"

#include <cmath>

namespace sojourn {

void HamiltonianSystem::require_domain(const Vec& m) const
{
    if (m.size() != 2 * n)
        throw std::domain_error(name + ": point has dimension " + std::to_string(m.size()) +
                                ", chart needs " + std::to_string(2 * n));
    if (!in_domain(m))
        throw std::domain_error(name + ": point violates the domain predicate " +
                                (domain_description.empty() ? std::string("(membership)")
                                                            : domain_description));
}

Mat canonical_poisson_tensor(int n)
{
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return j;
}

Vec fd_gradient(const std::function<double(const Vec&)>& fn, const Vec& x)
{
    Vec g(x.size());
    Vec z = x;
    for (int i = 0; i < x.size(); ++i) {
        const double h = 1e-5 * (1.0 + std::abs(x[i]));
        const double xi = x[i];
        z[i] = xi + 2.0 * h;
        const double f2p = fn(z);
        z[i] = xi + h;
        const double f1p = fn(z);
        z[i] = xi - h;
        const double f1m = fn(z);
        z[i] = xi - 2.0 * h;
        const double f2m = fn(z);
        z[i] = xi;
        if (!std::isfinite(f2p) || !std::isfinite(f2m) || !std::isfinite(f1p) || !std::isfinite(f1m))
            throw NumericError("fd_gradient: stencil left the function's domain");
        g[i] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
        if (h < 1e-300)
            throw NumericError("fd_gradient: step underflow");
    }
    return g;
}

namespace {

Vec observable_gradient(const Observable& o, const Vec& m)
{
    return o.gradient ? o.gradient(m) : fd_gradient(o.value, m);
}

Mat poisson_at(const HamiltonianSystem& sys, const Vec& m)
{
    return sys.poisson_tensor ? sys.poisson_tensor(m) : canonical_poisson_tensor(sys.n);
}

} // namespace

double poisson_bracket(const HamiltonianSystem& sys, const Observable& a, const Observable& b,
                       const Vec& m)
{
    sys.require_domain(m);
    const Vec ga = observable_gradient(a, m);
    const Vec gb = observable_gradient(b, m);
    return ga.dot(poisson_at(sys, m) * gb);
}

Vec nabla_h_bracket(const HamiltonianSystem& sys, const Vec& m)
{
    sys.require_domain(m);
    const Vec gh = sys.grad_hamiltonian ? sys.grad_hamiltonian(m)
                                        : fd_gradient(sys.hamiltonian, m);
    const Vec jgh = poisson_at(sys, m) * gh;
    Mat jac(sys.d, 2 * sys.n);
    if (sys.position_jacobian) {
        jac = sys.position_jacobian(m);
    } else {
        for (int j = 0; j < sys.d; ++j)
            jac.row(j) =
                fd_gradient([&](const Vec& z) { return sys.position(z)[j]; }, m).transpose();
    }
    return jac * jgh;
}

Vec nabla_h(const HamiltonianSystem& sys, const Vec& m)
{
    if (sys.velocity_closed_form) {
        sys.require_domain(m);
        return sys.velocity_closed_form(m);
    }
    return nabla_h_bracket(sys, m);
}

bool is_critical(const HamiltonianSystem& sys, const Vec& m, double eps)
{
    if (eps <= 0.0)
        eps = sys.critical_eps;
    return nabla_h(sys, m).norm() < eps;
}

Vec flow_point(const HamiltonianSystem& sys, double t, const Vec& m)
{
    FlowCache cache(sys, m);
    return cache.at(t);
}

AssumptionReport check_assumption(const HamiltonianSystem& sys, const Vec& m,
                                  const std::vector<double>& t_grid)
{
    sys.require_domain(m);
    if (t_grid.size() < 3)
        throw std::domain_error("check_assumption: need at least three grid times");

    const Vec phi0 = sys.position(m);
    const Vec vel0 = nabla_h(sys, m);

    FlowCache cache(sys, m);
    std::vector<Vec> phis, vels;
    phis.reserve(t_grid.size());
    for (double t : t_grid) {
        const Vec& mt = cache.at(t);
        phis.push_back(sys.position(mt));
        vels.push_back(nabla_h(sys, mt));
    }

    AssumptionReport rep;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        rep.max_linearity_residual =
            std::max(rep.max_linearity_residual,
                     (phis[k] - phi0 - t_grid[k] * vel0).lpNorm<Eigen::Infinity>());
        rep.max_velocity_variation =
            std::max(rep.max_velocity_variation, (vels[k] - vel0).lpNorm<Eigen::Infinity>());
        if (k >= 1 && k + 1 < t_grid.size())
            rep.max_second_difference =
                std::max(rep.max_second_difference,
                         (phis[k + 1] - 2.0 * phis[k] + phis[k - 1]).lpNorm<Eigen::Infinity>());
    }
    return rep;
}

double T_f_observable(const HamiltonianSystem& sys, const LocalisationFunction& f, const Vec& m,
                      const RfOptions& opt)
{
    sys.require_domain(m);
    if (f.dim() != sys.d)
        throw std::domain_error("T_f: cutoff dimension " + std::to_string(f.dim()) +
                                " does not match the position observable (d = " +
                                std::to_string(sys.d) + ")");
    const Vec vel = nabla_h(sys, m);
    if (vel.norm() < sys.critical_eps)
        throw std::domain_error(sys.name +
                                ": point is critical (velocity vector vanishes), T_f undefined");
    return -sys.position(m).dot(grad_Rf(f, vel, opt));
}

TimeOperatorReport check_time_operator(const HamiltonianSystem& sys,
                                       const LocalisationFunction& f, const Vec& m,
                                       const std::vector<double>& t_set, const RfOptions& opt)
{
    TimeOperatorReport rep;
    const double t0_val = T_f_observable(sys, f, m, opt);
    FlowCache cache(sys, m);
    for (double t : t_set) {
        const Vec& mt = cache.at(t);
        if (is_critical(sys, mt)) {
            rep.skipped_times.push_back(t);
            continue;
        }
        const double tt = T_f_observable(sys, f, mt, opt);
        rep.max_residual = std::max(rep.max_residual, std::abs(tt - t0_val - t));
    }
    return rep;
}

std::vector<double> symmetric_grid(double t_max, int points)
{
    if (points < 3 || points % 2 == 0)
        throw std::domain_error("symmetric_grid: need an odd point count >= 3");
    std::vector<double> g(points);
    const double h = 2.0 * t_max / (points - 1);
    for (int i = 0; i < points; ++i)
        g[i] = -t_max + i * h;
    g[(points - 1) / 2] = 0.0;
    return g;
}

} // namespace sojourn
