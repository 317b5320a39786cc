#pragma once
// Construction of the example systems: Hamiltonian, position observable,
// domain, exact flow where a closed form exists, tuned integrator
// otherwise, and a sampler for random domain points.

#include "sojourn/dynamics.hpp"
#include "sojourn/elliptic.hpp"

namespace sojourn {

struct SystemSpec {
    std::string name;
    std::map<std::string, double> params;
    std::string notes;
};

/// Build a system by name. Closed-form velocity data is cross-checked
/// against difference-quotient brackets at sampled domain points before
/// the system is returned; numeric flows have their step/tolerance tuned
/// to the drift budget.
HamiltonianSystem build(const SystemSpec& spec);

struct ParamInfo {
    std::string name;
    double value; // default
    std::string constraint;
};

struct CatalogEntry {
    std::string name;
    std::string description;
    std::vector<ParamInfo> params;
    bool exact_flow;
};

const std::vector<CatalogEntry>& list();

/// Characteristic coordinates of the inverted oscillator:
/// u = K q + p, w = K q - p, stored as (u_1..u_n, w_1..w_n).
Vec repulsive_chart_from_qp(const Vec& q, const Vec& p, double K);
void repulsive_qp_from_chart(const Vec& m, double K, Vec& q, Vec& p);

/// The attracting/repelling Coulomb time functions: branch -1, +1 give the
/// two log forms, 0 their mean (the atanh form used as Phi).
double central_force_phi(const Vec& m, double K, int branch);

} // namespace sojourn
