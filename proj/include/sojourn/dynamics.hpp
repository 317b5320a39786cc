#pragma once
// Hamiltonian systems in chart coordinates: Poisson brackets, flows, the
// velocity vector ({Phi_j, H})_j, criticality, and the time observable T_f.

#include "sojourn/locfn.hpp"
#include "sojourn/types.hpp"

#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace sojourn {

/// Scalar phase-space function with an optional analytic gradient. Without
/// one, brackets fall back to fourth-order central differences.
struct Observable {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
};

/// Closed-form flow map (t, m) -> phi_t(m). max_time bounds the window on
/// which the coordinate representation stays inside double range.
struct ExactFlow {
    std::function<Vec(double, const Vec&)> map;
    double max_time = std::numeric_limits<double>::infinity();
};

/// Fixed-step leapfrog composition for separable H = T(p) + V(q).
/// order 2 is plain leapfrog; 4 and 6 are triple-jump compositions.
struct SplittingFlow {
    std::function<Vec(const Vec&)> velocity; // dT/dp, evaluated on p
    std::function<Vec(const Vec&)> force;    // -dV/dq, evaluated on q
    double step = 1e-2;
    int order = 6;
};

/// Adaptive embedded Runge-Kutta of order 8(5,3) for general vector fields.
struct AdaptiveFlow {
    std::function<Vec(const Vec&)> rhs; // X_H on chart coordinates
    double rel_tol = 1e-13;
    double abs_tol = 1e-13;
};

using FlowSpec = std::variant<ExactFlow, SplittingFlow, AdaptiveFlow>;

struct HamiltonianSystem {
    std::string name;
    std::string description;
    int n = 0; // degrees of freedom; chart dimension is 2n
    int d = 0; // number of position-observable components

    std::function<double(const Vec&)> hamiltonian;
    std::function<Vec(const Vec&)> position; // Phi : chart -> R^d
    FlowSpec flow;
    std::function<bool(const Vec&)> domain;
    std::string domain_description;

    // Optional analytic data; absent entries fall back to differences.
    std::function<Vec(const Vec&)> grad_hamiltonian;     // dH, 2n components
    std::function<Mat(const Vec&)> position_jacobian;    // dPhi, d x 2n
    std::function<Vec(const Vec&)> velocity_closed_form; // ({Phi_j,H})_j
    std::function<Mat(const Vec&)> poisson_tensor;       // J(m); canonical when absent

    std::function<Vec(std::mt19937_64&)> sample_point;
    std::map<std::string, double> params;

    double critical_eps = 1e-8;
    double drift_budget = 1e-9;

    bool has_exact_flow() const { return std::holds_alternative<ExactFlow>(flow); }
    bool in_domain(const Vec& m) const { return !domain || domain(m); }
    void require_domain(const Vec& m) const;
};

/// Canonical Poisson tensor on (q, p) coordinates: {f,g} = df^T J dg.
Mat canonical_poisson_tensor(int n);

/// Fourth-order central-difference gradient, step 1e-5 (1 + |x_i|).
Vec fd_gradient(const std::function<double(const Vec&)>& fn, const Vec& x);

double poisson_bracket(const HamiltonianSystem& sys, const Observable& a, const Observable& b,
                       const Vec& m);

/// Velocity vector at m: component j is {Phi_j, H}(m). Uses the catalog's
/// closed form when present, else brackets with difference gradients.
Vec nabla_h(const HamiltonianSystem& sys, const Vec& m);

/// Bracket-based route, ignoring any closed form (cross-check path).
Vec nabla_h_bracket(const HamiltonianSystem& sys, const Vec& m);

/// |nabla_h(m)| < eps; eps <= 0 selects the system default.
bool is_critical(const HamiltonianSystem& sys, const Vec& m, double eps = 0.0);

/// One-off flow evaluation. Engines that query many times should use
/// FlowCache (integrators.hpp) instead.
Vec flow_point(const HamiltonianSystem& sys, double t, const Vec& m);

struct AssumptionReport {
    double max_second_difference = 0.0;  // curvature of t -> Phi(phi_t m)
    double max_linearity_residual = 0.0; // |Phi(phi_t m) - Phi(m) - t nabla_h(m)|_inf
    double max_velocity_variation = 0.0; // |nabla_h(phi_t m) - nabla_h(m)|_inf
};

/// Samples Phi along the orbit through m over a symmetric t-grid and
/// reports how far it is from exact linear drift.
AssumptionReport check_assumption(const HamiltonianSystem& sys, const Vec& m,
                                  const std::vector<double>& t_grid);

/// T_f(m) = -Phi(m) . (grad R_f)(nabla_h(m)); throws on critical points.
double T_f_observable(const HamiltonianSystem& sys, const LocalisationFunction& f, const Vec& m,
                      const RfOptions& opt = {});

struct TimeOperatorReport {
    double max_residual = 0.0; // max_t |T_f(phi_t m) - T_f(m) - t|
    std::vector<double> skipped_times; // orbit entered the critical band
};

TimeOperatorReport check_time_operator(const HamiltonianSystem& sys, const LocalisationFunction& f,
                                       const Vec& m, const std::vector<double>& t_set,
                                       const RfOptions& opt = {});

std::vector<double> symmetric_grid(double t_max, int points);

} // namespace sojourn
