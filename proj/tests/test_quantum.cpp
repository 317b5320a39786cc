#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sojourn/quantum.hpp"
#include "oracles.hpp"

#include <cmath>
#include <complex>

using namespace sojourn;

TEST_CASE("half-sum of the shift and its adjoint has the cosine spectrum")
{
    // 4x4 member of the same tridiagonal family, closed-form eigenvalues
    Mat d4 = Mat::Zero(4, 4);
    for (int k = 0; k + 1 < 4; ++k)
        d4(k + 1, k) = d4(k, k + 1) = 0.5;
    Eigen::SelfAdjointEigenSolver<Mat> eig(d4);
    const double pi = 4.0 * std::atan(1.0);
    Vec expected(4);
    expected << -std::cos(pi / 5.0), -std::cos(2.0 * pi / 5.0), std::cos(2.0 * pi / 5.0),
        std::cos(pi / 5.0);
    CHECK((eig.eigenvalues() - expected).lpNorm<Eigen::Infinity>() < 1e-14);

    // the built system obeys the same closed form
    auto sys = build_shift_system(32, 2);
    for (int k = 0; k < 32; ++k)
        CHECK(sys->eigenvalues[k] ==
              doctest::Approx(-std::cos(pi * (k + 1) / 33.0)).epsilon(1e-12));
}

TEST_CASE("construction invariants: self-adjointness, spectrum, interior identity")
{
    auto sys = build_shift_system(512, 32);
    CHECK((sys->S - sys->S.adjoint()).norm() < 1e-13);
    CHECK((sys->A - sys->A.adjoint()).norm() < 1e-13);
    CHECK(sys->eigenvalues.minCoeff() >= -1.0);
    CHECK(sys->eigenvalues.maxCoeff() <= 1.0);

    for (int k = 0; k < sys->dim; ++k)
        CHECK(std::abs(sys->A(k, k)) == 0.0); // zero diagonal, exactly

    // i[A, Delta] = Delta^2 - 1 on interior basis vectors
    const CMat delta_c = sys->Delta.cast<std::complex<double>>();
    const CMat comm = std::complex<double>(0, 1) * (sys->A * delta_c - delta_c * sys->A);
    const CMat target =
        (sys->Delta * sys->Delta - Mat::Identity(512, 512)).cast<std::complex<double>>();
    double worst = 0.0;
    for (int k = sys->margin; k <= sys->dim - 1 - sys->margin; ++k)
        worst = std::max(worst, (comm.col(k) - target.col(k)).norm());
    CHECK(worst < 1e-12);

    CHECK_THROWS_AS(build_shift_system(8, 1), ConfigError);
    CHECK_THROWS_AS(build_shift_system(64, 20), ConfigError);
}

TEST_CASE("expectations: identity, number operator, brute-force sum")
{
    auto sys = build_shift_system(64, 4);
    const CMat id = CMat::Identity(64, 64);

    CVec e5 = CVec::Zero(64);
    e5[5] = 1.0;
    CHECK(expectation(id, e5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(expectation(Mat(sys->number.asDiagonal()), e5) == doctest::Approx(5.0).epsilon(1e-14));

    const CVec psi = gaussian_packet(64, 30.0, 6.0, 0.7);
    double brute_re = 0.0, brute_im = 0.0;
    for (int j = 0; j < 64; ++j)
        for (int k = 0; k < 64; ++k) {
            const std::complex<double> term = std::conj(psi[j]) * sys->Delta(j, k) * psi[k];
            brute_re += term.real();
            brute_im += term.imag();
        }
    CHECK(std::abs(brute_im) < 1e-12);
    CHECK(expectation(sys->Delta, psi) == doctest::Approx(brute_re).epsilon(1e-12));

    CHECK_THROWS_AS(expectation(id, CVec(2.0 * e5)), std::domain_error);
}

TEST_CASE("evolution: group law, norm and energy conservation")
{
    auto sys = build_shift_system(64, 4);
    const CVec psi = gaussian_packet(64, 32.0, 6.0, 1.1);
    CHECK((evolve(*sys, psi, 0.0) - psi).norm() < 1e-14);

    const CVec a = evolve(*sys, evolve(*sys, psi, 2.3), -5.8);
    const CVec b = evolve(*sys, psi, -3.5);
    CHECK((a - b).norm() < 1e-12);

    const Mat delta2 = sys->Delta * sys->Delta;
    const double h0 = expectation(sys->Delta, psi);
    const double h2 = expectation(delta2, psi);
    for (double t : {-20.0, 7.0, 120.0}) {
        const CVec evolved = evolve(*sys, psi, t);
        CHECK(std::abs(evolved.norm() - 1.0) < 1e-12);
        CHECK(std::abs(expectation(sys->Delta, evolved) - h0) < 1e-12);
        CHECK(std::abs(expectation(delta2, evolved) - h2) < 1e-12);
    }
}

TEST_CASE("the expectation of A drifts at rate <Delta^2 - 1>")
{
    auto sys = build_shift_system(256, 16);
    const CVec psi = gaussian_packet(256, 128.0, 16.0, 0.0); // centered packet
    const auto rep = check_expectation_slope(*sys, psi, 5.0, 21);
    CHECK(rep.expected < 0.0);
    CHECK(rep.relative_error < 0.01);

    // a moving packet has an order-one velocity
    const double half_pi = std::asin(1.0);
    const CVec moving = gaussian_packet(256, 96.0, 10.0, half_pi);
    const auto rep2 = check_expectation_slope(*sys, moving, 5.0, 21);
    CHECK(rep2.expected == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(rep2.relative_error < 0.01);
}

TEST_CASE("states supported near the spectral edges are critical")
{
    auto sys = build_shift_system(256, 16);
    const CVec edge = sys->eigenvectors.col(255).cast<std::complex<double>>(); // closest to +1
    CHECK(std::abs(velocity_expectation(*sys, edge)) < 1e-3);
    const auto f = LocalisationFunction::radial_bump(1, 2.0);
    CHECK_THROWS_AS(
        quantum_sojourn(sys, f, edge, {10, 20, 40, 80}), std::domain_error);
}

TEST_CASE("classical adapter reproduces the quantum data")
{
    auto sys = build_shift_system(64, 4);
    auto cls = expectation_system(sys);
    const CVec psi = gaussian_packet(64, 32.0, 6.0, 0.9);
    const Vec m = real_chart(psi);

    CHECK(cls.hamiltonian(m) == doctest::Approx(expectation(sys->Delta, psi)).epsilon(1e-12));
    CHECK(cls.position(m)[0] == doctest::Approx(expectation(sys->A, psi)).epsilon(1e-12));
    CHECK(nabla_h(cls, m)[0] ==
          doctest::Approx(velocity_expectation(*sys, psi)).epsilon(1e-12));

    // flow on the chart matches the unitary evolution
    const Vec mt = flow_point(cls, 3.7, m);
    const CVec evolved = evolve(*sys, psi, 3.7);
    CHECK((from_real_chart(mt) - evolved).norm() < 1e-12);

    // bracket route (difference quotients through the weighted tensor)
    // agrees with the closed velocity
    const Vec vb = nabla_h_bracket(cls, m);
    CHECK(vb[0] == doctest::Approx(velocity_expectation(*sys, psi)).epsilon(1e-4));
}

TEST_CASE("sojourn run on certified radii matches <A>/<Delta^2 - 1>")
{
    auto sys = build_shift_system(256, 16);
    const double half_pi = std::asin(1.0);
    const CVec psi = gaussian_packet(256, 40.0, 8.0, half_pi);

    const double phi = expectation(sys->A, psi);
    const double vel = velocity_expectation(*sys, psi);
    const double expected = phi / vel;
    REQUIRE(expected > 0.0);

    SojournOptions opt;
    opt.acceptance_tol = 0.05;
    const auto chi = LocalisationFunction::characteristic_ball(1);
    const auto radii = geometric_radii(1.1 * std::abs(phi), 1.2, 4);
    const auto result = quantum_sojourn(sys, chi, psi, radii, opt);

    CHECK(result.certified_radii.size() == 4);
    CHECK(result.certified_window > 0.0);
    CHECK(result.series.reference == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(result.series.extrapolated - expected) < 0.05 * std::abs(expected));
    for (double v : result.series.values)
        CHECK(std::abs(v - expected) < 0.05 * std::abs(expected));

    // radii beyond the certified window are refused loudly
    const auto huge = geometric_radii(400.0, 2.0, 4);
    CHECK_THROWS_AS(quantum_sojourn(sys, chi, psi, huge, opt), NumericError);
}
