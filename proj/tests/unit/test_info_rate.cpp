#include "oracle.hpp"
#include "uwbrake/info_rate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace uwbrake;

namespace
{

SymbolChannel taps(std::vector<double> t, int first = 0)
{
    SymbolChannel ch;
    ch.taps = std::move(t);
    ch.first_index = first;
    return ch;
}

double db(double x)
{
    return 10.0 * std::log10(x);
}

} // namespace

TEST_CASE("flat channel capacity is (1/2) log2(1 + 2s)")
{
    for (double s : {0.01, 0.1, 0.5, 1.0, 3.5, 10.0})
        CHECK(std::abs(capacity(taps({1.0}), db(s)) - 0.5 * std::log2(1.0 + 2.0 * s)) < 1e-9);
    CHECK(capacity(taps({1.0}), db(0.5)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(solve_snr(taps({1.0}), 0.5) - (-3.0103)) < 1e-3);
    CHECK(std::abs(solve_snr(taps({1.0}), 1.5) - 5.4407) < 1e-3);
}

TEST_CASE("zero channel carries nothing and cannot be solved")
{
    for (double snr : {-20.0, 0.0, 40.0})
        CHECK(capacity(taps({0.0, 0.0}), snr) == 0.0);
    CHECK_THROWS_AS(solve_snr(taps({0.0}), 0.3), SolveError);
}

TEST_CASE("two equal taps against the high-resolution oracle")
{
    // Oracle value with 2^20 nodes; equals one bit exactly.
    const double frozen = 1.0;
    CHECK(std::abs(capacity(taps({1.0, 1.0}), 0.0) - frozen) < 1e-12);

    // Needed Es/N0 for 0.3 bits/symbol, from oracle bisection.
    const double frozen_snr = -8.4683759576364537;
    CHECK(std::abs(solve_snr(taps({1.0, 1.0}), 0.3) - frozen_snr) < 1e-4);
}

TEST_CASE("capacity agrees with direct quadrature on random taps")
{
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5; ++trial)
    {
        std::vector<double> t(3 + trial * 2);
        for (auto &x : t)
            x = g(rng);
        const double snr = -5.0 + 4.0 * trial;
        CHECK(std::abs(capacity(taps(t), snr) - oracle::capacity(t, snr, 4096)) < 1e-11);
    }
}

TEST_CASE("capacity is strictly increasing in Es/N0")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial)
    {
        std::vector<double> t(1 + trial % 9);
        for (auto &x : t)
            x = g(rng);
        const ChannelSpectrum spec(t);
        double prev = spec.capacity(-60.0);
        for (double snr = -59.5; snr <= 60.0; snr += 0.5)
        {
            const double c = spec.capacity(snr);
            CHECK(c > prev);
            prev = c;
        }
    }
}

TEST_CASE("delay, zero padding and quadrature size do not change capacity")
{
    const std::vector<double> base{0.3, -1.2, 0.7, 0.05};
    std::vector<double> shifted(5, 0.0);
    shifted.insert(shifted.end(), base.begin(), base.end());
    std::vector<double> padded = base;
    padded.resize(40, 0.0);
    for (double snr : {-10.0, 0.0, 12.0})
    {
        const double c = capacity(taps(base), snr);
        CHECK(std::abs(capacity(taps(shifted, -7), snr) - c) < 1e-12);
        CHECK(std::abs(capacity(taps(padded), snr) - c) < 1e-12);
        CHECK(std::abs(capacity(taps(base), snr, 16384) - c) < 1e-6);
    }
}

TEST_CASE("degradation examples")
{
    const auto h = taps({0.2, 1.0, -0.4, 0.1});
    CHECK(std::abs(degradation(h, h, 0.3).loss_db) < 2e-4);
    CHECK(std::abs(degradation(h, taps(h.taps, 4), 0.3).loss_db) < 2e-4);

    auto doubled = h;
    for (auto &x : doubled.taps)
        x *= 2.0;
    CHECK(std::abs(degradation(doubled, h, 0.3).loss_db - 20.0 * std::log10(2.0)) < 2e-4);

    auto hs = h, fs = taps({0.05, 0.3, 0.3, -0.1});
    const double before = degradation(h, fs, 0.3).loss_db;
    for (auto &x : hs.taps)
        x *= 7.3;
    for (auto &x : fs.taps)
        x *= 7.3;
    CHECK(std::abs(degradation(hs, fs, 0.3).loss_db - before) < 1e-6);
}

TEST_CASE("solver failures are tagged with the failing channel")
{
    try
    {
        degradation(taps({1.0}), taps({1e-6}), 0.3);
        FAIL("expected SolveError");
    }
    catch (const SolveError &e)
    {
        CHECK(e.which() == SolveError::Channel::Mistimed);
    }
    try
    {
        degradation(taps({0.0}), taps({1.0}), 0.3);
        FAIL("expected SolveError");
    }
    catch (const SolveError &e)
    {
        CHECK(e.which() == SolveError::Channel::PerfectTiming);
    }
}

TEST_CASE("quadrature size must be a power of two of at least 64")
{
    const std::vector<double> t{1.0};
    CHECK_THROWS_AS(ChannelSpectrum(t, 32), std::invalid_argument);
    CHECK_THROWS_AS(ChannelSpectrum(t, 1000), std::invalid_argument);
    CHECK_NOTHROW(ChannelSpectrum(t, 64));
}
