#pragma once
// Sojourn-time differences along true orbits, continuous and discrete, and
// their extrapolation over expanding localisation radii.

#include "sojourn/dynamics.hpp"
#include "sojourn/integrators.hpp"

namespace sojourn {

struct SojournOptions {
    double quad_tol = 1e-10;
    /// Target for the analytic tail bound of the truncated t-integral.
    double tail_tol = 1e-8;
    /// PASS threshold: |extrapolated - T_f| <= acceptance_tol * scale, with
    /// scale = max(|T_f|, reference_floor).
    double acceptance_tol = 1e-3;
    double reference_floor = 0.01;
    /// Diagnostic mode for critical points: integrate a capped window
    /// instead of erroring (the difference vanishes there).
    bool allow_critical = false;
    double critical_window = 20.0;
    double crossing_tol = 1e-11;
};

struct SojournSample {
    double value = 0.0;
    double t_star = 0.0; // truncation time actually used
};

/// (1/2) Int_0^{t*} dt [f(Phi(phi_-t m)/r) - f(Phi(phi_t m)/r)], with Phi
/// evaluated through the actual flow. For the sharp ball the integral is
/// the measure difference of the inside intervals, whose endpoints are
/// located through the flow.
SojournSample sojourn_difference(const HamiltonianSystem& sys, const LocalisationFunction& f,
                                 FlowCache& orbit, double r, const SojournOptions& opt = {});

SojournSample sojourn_difference(const HamiltonianSystem& sys, const LocalisationFunction& f,
                                 const Vec& m, double r, const SojournOptions& opt = {});

/// Discrete-time counterpart: (1/2) Sum_{n=1}^{N*} [f(Phi(phi_-n m)/r) -
/// f(Phi(phi_n m)/r)]. Requires a cutoff with two decaying derivatives.
SojournSample sojourn_difference_discrete(const HamiltonianSystem& sys,
                                          const LocalisationFunction& f, FlowCache& orbit,
                                          double r, const SojournOptions& opt = {});

struct SojournSeries {
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> errors;            // |value - reference|
    std::vector<double> truncation_times;
    double reference = 0.0;                // T_f(m)
    double extrapolated = 0.0;
    double fitted_rate = 0.0;              // log-log slope of the last three errors
    bool errors_decreasing = false;        // over the last three radii (rounding floor aware)
    bool passed = false;
    bool critical_point = false;           // diagnostic zero mode was used
    bool discrete = false;
    double energy_drift = 0.0;             // worst drift seen along the orbit
};

/// Run the radius schedule at one phase point, sharing the orbit across
/// radii, and compare the extrapolated limit against T_f.
SojournSeries converge(const HamiltonianSystem& sys, const LocalisationFunction& f, const Vec& m,
                       const std::vector<double>& radii, const SojournOptions& opt = {},
                       bool discrete = false);

} // namespace sojourn
