#include "oracle.hpp"
#include "uwbrake/pulse.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace uwbrake;

TEST_CASE("pulse peaks at one and crosses zero at chip multiples")
{
    for (double a : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9})
    {
        const RaisedCosine p({a, 1.0});
        CHECK(p(0.0) == 1.0);
        for (int k = 1; k <= 20; ++k)
        {
            CHECK(std::abs(p(k)) < 1e-15);
            CHECK(std::abs(p(-k)) < 1e-15);
        }
    }
}

TEST_CASE("alpha = 1 at T/2 takes the limit value 1/2")
{
    const RaisedCosine p({1.0, 1.0});
    CHECK(p(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p(0.5 + 1e-6) == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(p(0.5 - 1e-6) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("pulse is even, bounded and continuous at its singular points")
{
    for (double a : {0.0, 0.25, 0.3, 0.6, 1.0})
    {
        const RaisedCosine p({a, 2.5});
        for (double t = -40.0; t <= 40.0; t += 0.0173)
        {
            CHECK(p(t) == p(-t));
            CHECK(std::abs(p(t)) <= 1.0);
        }
        if (a > 0.0)
        {
            const double t0 = 2.5 / (2.0 * a);
            for (double eps : {1e-4, 1e-6, 1e-8})
            {
                CHECK(std::abs(p(t0) - p(t0 + eps)) < 10 * eps);
                CHECK(std::abs(p(-t0) - p(-t0 - eps)) < 10 * eps);
            }
        }
    }
}

TEST_CASE("pulse agrees with the reference implementation")
{
    for (double a : {0.0, 0.1, 0.3, 0.5, 1.0})
    {
        const PulseConfig cfg{a, 1.0};
        for (double t = -15.0; t <= 15.0; t += 0.037)
            CHECK(std::abs(eval(cfg, t) - static_cast<double>(oracle::raised_cosine(t, a, 1.0))) < 1e-13);
    }
}

TEST_CASE("spectrum is P(0) = T, flat in the passband and zero beyond the band edge")
{
    const RaisedCosine p({0.3, 2.0});
    CHECK(p.spectrum(0.0) == doctest::Approx(2.0));
    CHECK(p.spectrum(0.1) == doctest::Approx(2.0));
    CHECK(p.spectrum(0.25) == doctest::Approx(1.0)); // half amplitude at 1/(2T)
    CHECK(p.spectrum(p.bandwidth() + 1e-9) == 0.0);
    CHECK(p.spectrum(-0.2) == p.spectrum(0.2));
}

TEST_CASE("invalid pulse configurations are rejected")
{
    CHECK_THROWS_AS(RaisedCosine({-0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(RaisedCosine({1.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(RaisedCosine({0.3, 0.0}), std::invalid_argument);
}
