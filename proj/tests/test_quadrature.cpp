#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sojourn/quadrature.hpp"

#include <cmath>

using namespace sojourn;

TEST_CASE("kronrod panel integrates polynomials of the Gauss degree exactly")
{
    auto p = [](double x) { return ((3.0 * x - 1.0) * x + 2.0) * x * x * x - x + 0.5; };
    const auto est = kronrod_panel(p, -1.0, 2.0);
    // antiderivative: x^6/2 - x^5/5 + x^4/2 - x^2/2 + x/2
    auto P = [](double x) {
        return 0.5 * std::pow(x, 6) - 0.2 * std::pow(x, 5) + 0.5 * std::pow(x, 4) -
               0.5 * x * x + 0.5 * x;
    };
    CHECK(est.value == doctest::Approx(P(2.0) - P(-1.0)).epsilon(1e-14));
}

TEST_CASE("adaptive integration reaches tight absolute tolerance")
{
    const double val = integrate([](double x) { return std::exp(-x) * std::sin(7.0 * x); }, 0.0,
                                 20.0, {1e-12});
    // closed form: Int e^-x sin(7x) = [-(sin 7x + 7 cos 7x) e^-x] / 50
    auto F = [](double x) { return -std::exp(-x) * (std::sin(7 * x) + 7 * std::cos(7 * x)) / 50.0; };
    CHECK(std::abs(val - (F(20.0) - F(0.0))) < 1e-11);
}

TEST_CASE("integrable endpoint spike is handled by subdivision")
{
    const double val = integrate([](double x) { return 1.0 / std::sqrt(x + 1e-8); }, 0.0, 1.0,
                                 {1e-9, 20000});
    const double exact = 2.0 * (std::sqrt(1.0 + 1e-8) - std::sqrt(1e-8));
    CHECK(std::abs(val - exact) < 1e-7);
}

TEST_CASE("segment list respects interior kinks")
{
    auto f = [](double x) { return std::abs(x - 0.3); };
    const double val = integrate_segments(f, {0.0, 0.3, 1.0}, {1e-13});
    CHECK(val == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-13));
}

TEST_CASE("empty interval integrates to zero")
{
    CHECK(integrate([](double x) { return x; }, 2.0, 2.0) == 0.0);
    CHECK_THROWS_AS(integrate([](double x) { return x; }, 2.0, 1.0), std::domain_error);
}

TEST_CASE("crossing finder locates bracketed roots to tolerance")
{
    auto g = [](double t) { return std::cos(t) - 0.2 * t; };
    const double root = find_crossing(g, 0.0, 3.0, 1e-13);
    CHECK(std::abs(g(root)) < 1e-12);

    CHECK_THROWS_AS(find_crossing([](double) { return 1.0; }, 0.0, 1.0, 1e-12), NumericError);
}
