#pragma once
// Finite truncation of the shift-isometry system: expectation values of
// (Delta, A) play (H, Phi), and the classical sojourn machinery runs on
// the real chart [Re psi; Im psi].

#include "sojourn/sojourn.hpp"

#include <memory>

namespace sojourn {

struct QuantumSystem {
    int dim = 0;
    int margin = 0; // boundary buffer b

    Mat U;       // truncated one-sided shift (real)
    Mat Delta;   // (U + U^T)/2, real symmetric tridiagonal
    Mat W;       // U - U^T; S = -(i/2) W
    Mat pos_form; // P with <A>(u + iv) = u^T P v; P = (W N + N W)/2
    Vec number;  // diagonal of N

    CMat S; // (U - U*)/(2i)
    CMat A; // (S N + N S)/2

    Vec eigenvalues;  // of Delta
    Mat eigenvectors; // columns, orthonormal
};

/// Build and validate the truncation: self-adjointness, spectrum inside
/// [-1, 1], and the interior rows of U N U* = N - 1.
std::shared_ptr<const QuantumSystem> build_shift_system(int dim, int margin);

/// <psi, M psi> for self-adjoint M and a unit vector psi.
double expectation(const CMat& op, const CVec& psi);
double expectation(const Mat& op, const CVec& psi);

/// Flow of the expectation-value Hamiltonian <Delta>; the sign is fixed so
/// that d/dt <K> = <i[K, Delta]> along it.
CVec evolve(const QuantumSystem& sys, const CVec& psi, double t);

/// Normalized packet: amplitudes exp(-(k-center)^2/(4 width^2) + i k momentum).
CVec gaussian_packet(int dim, double center, double width, double momentum);

/// <Delta^2 - 1>(psi), the conserved velocity of <A> along the flow.
double velocity_expectation(const QuantumSystem& sys, const CVec& psi);

/// Classical adapter on R^{2 dim}; Phi = <A>, H = <Delta>, exact flow
/// through the eigenbasis.
HamiltonianSystem expectation_system(std::shared_ptr<const QuantumSystem> sys);

Vec real_chart(const CVec& psi);
CVec from_real_chart(const Vec& m);

struct SlopeReport {
    double slope = 0.0;
    double expected = 0.0; // <Delta^2 - 1>(psi)
    double relative_error = 0.0;
};

/// Least-squares slope of t -> <A>(psi_t) over a symmetric window.
SlopeReport check_expectation_slope(const QuantumSystem& sys, const CVec& psi, double t_max,
                                    int samples);

struct QuantumSojournResult {
    SojournSeries series;
    std::vector<double> certified_radii;
    std::vector<double> rejected_radii;
    double certified_window = 0.0; // largest |t| with top-band mass under budget
    double leak_budget = 0.0;
    double max_usable_radius = 0.0;
};

/// Sojourn run with the time window capped by truncation leakage: only the
/// mass reaching the top rows counts as leakage (the bottom row reflection
/// is genuine one-sided shift dynamics).
QuantumSojournResult quantum_sojourn(std::shared_ptr<const QuantumSystem> sys,
                                     const LocalisationFunction& f, const CVec& psi,
                                     const std::vector<double>& radii,
                                     const SojournOptions& opt = {}, double leak_budget = 1e-6);

} // namespace sojourn
