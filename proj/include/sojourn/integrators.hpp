#pragma once
// Flow engines behind HamiltonianSystem::flow, and an orbit cache that
// amortises repeated time queries along one orbit.

#include "sojourn/dynamics.hpp"

#include <cstdint>
#include <map>

namespace sojourn {

/// Advance a separable state (q, p) from time 0 to t with the composition
/// scheme of the spec; the final partial step is a scaled composition step.
void advance_splitting(const SplittingFlow& f, Vec& state, double t);

/// One composition step of size h (order 2, 4 or 6).
void splitting_step(const SplittingFlow& f, Vec& q, Vec& p, double h);

/// Integrate dy/dt = rhs(y) from t0 to t1 (either direction) with the
/// embedded 8(5,3) Dormand-Prince pair.
void integrate_adaptive(const AdaptiveFlow& f, Vec& y, double t0, double t1);

/// Halve the step of a splitting flow until the measured energy drift over
/// probe windows [0, +/-probe_time] from each probe point stays within
/// budget. Returns the refined step.
double refine_splitting_step(const SplittingFlow& f,
                             const std::function<double(const Vec&)>& hamiltonian,
                             const std::vector<Vec>& probes, double probe_time, double budget);

/// Orbit state cache for one base point. Queries integrate incrementally
/// from the nearest cached state on the same side of t = 0; exact flows
/// evaluate directly. Tracks the worst energy drift seen.
class FlowCache {
public:
    FlowCache(const HamiltonianSystem& sys, Vec m0);

    const Vec& at(double t);

    double energy_drift() const { return max_drift_; }
    std::uint64_t evaluations() const { return evals_; }
    const Vec& base_point() const { return m0_; }

private:
    const Vec& insert(int side, double at, Vec state);

    const HamiltonianSystem& sys_;
    Vec m0_;
    double h0_;
    std::map<double, Vec> branch_[2]; // keyed on |t|; [0] forward, [1] backward
    double max_drift_ = 0.0;
    std::uint64_t evals_ = 0;
};

} // namespace sojourn
