#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sojourn/catalog.hpp"
#include "sojourn/integrators.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace sojourn;

namespace {

HamiltonianSystem make(const std::string& name, std::map<std::string, double> params = {})
{
    return build(SystemSpec{name, std::move(params), ""});
}

const std::vector<std::string> exact_names = {
    "friedrichs", "stark", "dilation_homogeneous", "ratio_homogeneous",
    "kinetic",    "repulsive_harmonic", "sphere_covering", "oscillator_covering"};

} // namespace

TEST_CASE("incomplete elliptic integral: pinned values and quadrature oracle")
{
    CHECK(elliptic_F(0.0, 0.7) == 0.0);
    const double half_pi = std::asin(1.0);
    CHECK(elliptic_F(half_pi, 0.0) == doctest::Approx(half_pi).epsilon(1e-14));

    // brute-force Simpson on the defining integrand
    const double k = 0.5;
    const double oracle = oracles::simpson(
        [k](double th) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(th) * std::sin(th)); },
        0.0, half_pi / 2.0, 1 << 20);
    CHECK(std::abs(elliptic_F(half_pi / 2.0, k) - oracle) < 1e-12);

    CHECK_THROWS_AS(elliptic_F(0.3, 1.0), std::domain_error);
    CHECK_THROWS_AS(elliptic_F(2.0, 0.5), std::domain_error);

    // quasi-periodic extension is continuous and odd
    const double K = elliptic_K(0.6);
    CHECK(elliptic_F_real(half_pi, 0.6) == doctest::Approx(K).epsilon(1e-13));
    CHECK(elliptic_F_real(3.2, 0.6) ==
          doctest::Approx(2.0 * K + elliptic_F(3.2 - 2.0 * half_pi, 0.6)).epsilon(1e-13));
    CHECK(elliptic_F_real(-3.2, 0.6) == doctest::Approx(-elliptic_F_real(3.2, 0.6)).epsilon(1e-13));
}

TEST_CASE("catalog lists all systems with parameter schemas")
{
    const auto& entries = list();
    CHECK(entries.size() == 11);
    for (const auto& e : entries) {
        CHECK(!e.description.empty());
        CHECK_NOTHROW(make(e.name));
    }
    CHECK_THROWS_AS(make("no_such_system"), ConfigError);
}

TEST_CASE("kinetic: velocity vector is grad h")
{
    const auto sys = make("kinetic");
    Vec m(4);
    m << 1.0, 0.0, 3.0, 4.0;
    const Vec v = nabla_h(sys, m);
    CHECK(v[0] == 3.0);
    CHECK(v[1] == 4.0);
}

TEST_CASE("ratio system: velocity is H^2 - 4")
{
    const auto sys = make("ratio_homogeneous");
    Vec m(4);
    m << 1.0, 2.0, 0.7, -0.4; // H = 2.5
    CHECK(nabla_h(sys, m)[0] == doctest::Approx(2.25).epsilon(1e-13));
    Vec bad(4);
    bad << -1.0, 2.0, 0.0, 0.0;
    CHECK_THROWS_AS(nabla_h(sys, bad), std::domain_error);
}

TEST_CASE("dilation system: bracket of Phi with H equals H")
{
    const auto sys = make("dilation_homogeneous"); // K = 0
    Vec m(4);
    m << 1.0, 0.0, 2.0, 0.0;
    CHECK(nabla_h(sys, m)[0] == doctest::Approx(2.0).epsilon(1e-13));
    // independent difference-quotient oracle on the canonical chart
    const double oracle = oracles::canonical_bracket(
        [](const Vec& z) { return 0.5 * z.head(2).dot(z.tail(2)); },
        [](const Vec& z) { return 0.5 * z.tail(2).squaredNorm(); }, m);
    CHECK(oracle == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("inverted oscillator: chart round-trip and the exact flow")
{
    const double K = 1.0;
    Vec q(1), p(1);
    q << 1.0;
    p << 0.0;
    const Vec m0 = repulsive_chart_from_qp(q, p, K);
    const auto sys = make("repulsive_harmonic", {{"n", 1}, {"K", K}});

    const double t = std::log(2.0);
    const Vec mt = flow_point(sys, t, m0);
    Vec qt, pt;
    repulsive_qp_from_chart(mt, K, qt, pt);
    CHECK(qt[0] == doctest::Approx(1.25).epsilon(1e-14)); // cosh(log 2) = 5/4

    // brute-force integrator oracle in (q, p): qdot = p, pdot = K^2 q
    const Vec oracle = oracles::rk4(
        [K](const Vec& y) {
            Vec d(2);
            d[0] = y[1];
            d[1] = K * K * y[0];
            return d;
        },
        (Vec(2) << 1.0, 0.0).finished(), t, 1e-4);
    CHECK(std::abs(qt[0] - oracle[0]) < 1e-10);
    CHECK(std::abs(pt[0] - oracle[1]) < 1e-10);

    // smoothed velocity: e^{-1/H_j^2}
    const Vec vel = nabla_h(sys, m0);
    const double hj = -0.5 * m0[0] * m0[1];
    CHECK(vel[0] == doctest::Approx(std::exp(-1.0 / (hj * hj))).epsilon(1e-13));

    CHECK_THROWS_AS(flow_point(sys, 1e4, m0), NumericError); // window guard
}

TEST_CASE("pendulum: bracket of the elliptic time function is the sign of p")
{
    const auto sys = make("pendulum", {{"K", 1.0}});
    auto rng = oracles::rng(31);
    for (int i = 0; i < 6; ++i) {
        const Vec m = sys.sample_point(rng);
        const Vec v = nabla_h_bracket(sys, m);
        CHECK(v[0] == doctest::Approx(m[1] > 0 ? 1.0 : -1.0).epsilon(1e-7));
    }
    Vec below(2);
    below << 0.3, 0.1; // H < K: inside the separatrix
    CHECK_THROWS_AS(nabla_h(sys, below), std::domain_error);
    CHECK_THROWS_AS(make("pendulum", {{"K", -1.0}}), ConfigError);
}

TEST_CASE("pendulum: time function stays linear across many libration periods of q")
{
    const auto sys = make("pendulum", {{"K", 1.0}});
    Vec m(2);
    m << 0.5, 2.2; // rotor orbit, q covers all of R
    const auto rep = check_assumption(sys, m, symmetric_grid(10.0, 21));
    CHECK(rep.max_linearity_residual < 1e-9);
    CHECK(rep.max_second_difference < 1e-9);
}

TEST_CASE("central force: time-function branches are well-defined and consistent")
{
    const auto sys = make("central_force", {{"n", 2}, {"K", 1.0}});
    auto rng = oracles::rng(32);
    for (int i = 0; i < 8; ++i) {
        const Vec m = sys.sample_point(rng);
        const Vec q = m.head(2), p = m.tail(2);
        const double e2 = p.squaredNorm() - 1.0 / q.norm();
        const double a = q.norm() * (e2 + p.squaredNorm());
        const double b = 2.0 * std::sqrt(e2) * p.dot(q);
        CHECK(a + b > 0.0);
        CHECK(a - b > 0.0);
        const double mean =
            0.5 * (central_force_phi(m, 1.0, +1) + central_force_phi(m, 1.0, -1));
        CHECK(mean == doctest::Approx(central_force_phi(m, 1.0, 0)).epsilon(1e-12));
        CHECK(nabla_h(sys, m)[0] == 1.0);
    }
    // bracket {Phi_+, H} = 1, difference-quotient route
    const Vec m = sys.sample_point(rng);
    const Observable phi_plus{[](const Vec& z) { return central_force_phi(z, 1.0, +1); }, nullptr};
    const Observable ham{sys.hamiltonian, sys.grad_hamiltonian};
    CHECK(poisson_bracket(sys, phi_plus, ham, m) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hyperbolic ball: the time-function argument respects the strict bound")
{
    const auto sys = make("poincare_ball");
    auto rng = oracles::rng(33);
    for (int i = 0; i < 8; ++i) {
        const Vec m = sys.sample_point(rng);
        const Vec q = m.head(2), p = m.tail(2);
        const double h = sys.hamiltonian(m);
        const double arg = p.dot(q) * (1.0 - q.squaredNorm()) /
                           (std::sqrt(2.0 * h) * (1.0 + q.squaredNorm()));
        CHECK(std::abs(arg) <= 2.0 * q.norm() / (1.0 + q.squaredNorm()) + 1e-12);
        CHECK(std::abs(arg) < 1.0);
        // closed-form velocity against the bracket route
        const Vec v = nabla_h(sys, m);
        CHECK(v[0] == doctest::Approx(std::exp(-1.0 / h) * std::sqrt(2.0 * h)).epsilon(1e-12));
    }
    // deep-interior points have an underflowing smoothing factor: treated
    // as effectively critical, not as an error
    Vec slow(4);
    slow << 0.3, 0.0, 0.05, 0.0;
    CHECK(sys.hamiltonian(slow) < 0.01);
    CHECK(is_critical(sys, slow));
}

TEST_CASE("sphere covering: unit velocity from the canonical chart bracket")
{
    const auto sys = make("sphere_covering");
    Vec m(2);
    m << 0.7, 0.2;
    CHECK(nabla_h(sys, m)[0] == 1.0);
    CHECK(nabla_h_bracket(sys, m)[0] == doctest::Approx(1.0).epsilon(1e-9));
    const double oracle = oracles::canonical_bracket([](const Vec& z) { return z[0]; },
                                                     [](const Vec& z) { return z[1]; }, m);
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("oscillator covering: angles drift at rate -K")
{
    const auto sys = make("oscillator_covering", {{"n", 2}, {"K", 1.0}});
    auto rng = oracles::rng(34);
    const Vec m = sys.sample_point(rng);
    const Vec v = nabla_h(sys, m);
    CHECK(v[0] == -1.0);
    CHECK(v[1] == -1.0);
    // weighted-chart bracket route agrees
    const Vec vb = nabla_h_bracket(sys, m);
    CHECK(vb[0] == doctest::Approx(-1.0).epsilon(1e-8));

    const Vec mt = flow_point(sys, 7.25, m);
    CHECK((sys.position(mt) - (sys.position(m).array() - 7.25).matrix()).norm() < 1e-12);
}

TEST_CASE("exact flows satisfy the group law and conserve energy")
{
    auto rng = oracles::rng(35);
    for (const auto& name : exact_names) {
        auto sys = make(name);
        CAPTURE(name);
        for (int i = 0; i < 3; ++i) {
            const Vec m = sys.sample_point(rng);
            const double h0 = sys.hamiltonian(m);
            for (double t : {-7.3, 2.1}) {
                for (double s : {-2.7, 5.0}) {
                    const Vec one = flow_point(sys, t + s, m);
                    const Vec two = flow_point(sys, t, flow_point(sys, s, m));
                    CHECK((one - two).lpNorm<Eigen::Infinity>() <
                          1e-12 * (1.0 + one.lpNorm<Eigen::Infinity>()));
                }
                CHECK(std::abs(sys.hamiltonian(flow_point(sys, t, m)) - h0) <
                      1e-12 * (1.0 + std::abs(h0)));
            }
        }
    }
}

TEST_CASE("numeric flows stay in domain and inside the drift budget")
{
    auto rng = oracles::rng(36);
    for (const auto& name :
         {std::string("pendulum"), std::string("central_force"), std::string("poincare_ball")}) {
        auto sys = (name == "dilation") ? make("dilation_homogeneous", {{"K", 1.0}}) : make(name);
        CAPTURE(name);
        const Vec m = sys.sample_point(rng);
        FlowCache orbit(sys, m);
        for (double t : {-10.0, -3.0, 3.0, 10.0})
            CHECK(sys.in_domain(orbit.at(t)));
        CHECK(orbit.energy_drift() < 1e-9);
    }
    auto sys = make("dilation_homogeneous", {{"K", 1.0}});
    const Vec m = sys.sample_point(rng);
    FlowCache orbit(sys, m);
    for (double t : {-20.0, 20.0})
        CHECK(sys.in_domain(orbit.at(t)));
    CHECK(orbit.energy_drift() < 1e-9);
}

TEST_CASE("assumption residuals are flat for every catalog system")
{
    auto rng = oracles::rng(37);
    for (const auto& entry : list()) {
        auto sys = (entry.name == "dilation_homogeneous")
                       ? make(entry.name, {{"K", 1.0}})
                       : make(entry.name);
        CAPTURE(entry.name);
        const Vec m = sys.sample_point(rng);
        // the ball orbit compresses doubly-exponentially toward the
        // boundary; keep its grid inside the representable stretch
        const double window = entry.name == "poincare_ball" ? 6.0 : 10.0;
        const auto rep = check_assumption(sys, m, symmetric_grid(window, 21));
        const double tol = sys.has_exact_flow() ? 1e-8 : 1e-9 * 10.0;
        CHECK(rep.max_second_difference < tol);
        CHECK(rep.max_velocity_variation < 1e-6);
    }
}

TEST_CASE("invalid parameters are rejected")
{
    CHECK_THROWS_AS(make("repulsive_harmonic", {{"K", 0.0}}), ConfigError);
    CHECK_THROWS_AS(make("central_force", {{"n", 1}, {"K", 1.0}}), ConfigError);
    CHECK_THROWS_AS(make("friedrichs", {{"v1", 0.0}, {"v2", 0.0}}), ConfigError);
    CHECK_THROWS_AS(make("kinetic", {{"n", 2.5}}), ConfigError);
}
