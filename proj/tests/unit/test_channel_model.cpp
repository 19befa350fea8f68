#include "uwbrake/channel_model.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace uwbrake;

TEST_CASE("CM1 preset carries the reference-model parameters")
{
    const auto p = channel_preset(1);
    CHECK(p.cluster_rate == 0.0233);
    CHECK(p.ray_rate == 2.5);
    CHECK(p.cluster_decay == 7.1);
    CHECK(p.ray_decay == 4.3);
    CHECK(p.cluster_fade_std == 3.3941);
    CHECK(p.ray_fade_std == 3.3941);
    CHECK(p.shadow_std == 3.0);
    CHECK(p.max_excess_delay == doctest::Approx(71.0));
    for (int cm = 2; cm <= 4; ++cm)
        CHECK_NOTHROW(channel_preset(cm).validate());
    CHECK_THROWS_AS(channel_preset(0), std::invalid_argument);
    CHECK_THROWS_AS(channel_preset(5), std::invalid_argument);
}

TEST_CASE("invalid channel parameters are rejected")
{
    auto p = channel_preset(1);
    p.cluster_rate = 0.0;
    CHECK_THROWS_AS(generate(p, 1), std::invalid_argument);
    p = channel_preset(1);
    p.ray_decay = -1.0;
    CHECK_THROWS_AS(generate(p, 1), std::invalid_argument);
    p = channel_preset(1);
    p.max_excess_delay = p.cluster_decay;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("realizations start at zero delay and have increasing arrivals")
{
    const auto p = channel_preset(1);
    for (std::uint64_t seed = 0; seed < 300; ++seed)
    {
        const auto ch = generate(p, seed);
        REQUIRE_FALSE(ch.clusters.empty());
        CHECK(ch.clusters.front().arrival == 0.0);
        CHECK(ch.shadowing > 0.0);
        for (std::size_t l = 0; l < ch.clusters.size(); ++l)
        {
            const auto &c = ch.clusters[l];
            REQUIRE_FALSE(c.rays.empty());
            CHECK(c.rays.front().delay == 0.0);
            if (l > 0)
                CHECK(ch.clusters[l - 1].arrival < c.arrival);
            for (std::size_t k = 1; k < c.rays.size(); ++k)
                CHECK(c.rays[k - 1].delay < c.rays[k].delay);
            for (const auto &r : c.rays)
                CHECK(c.arrival + r.delay <= p.max_excess_delay);
        }
    }
}

TEST_CASE("generation is a pure function of the seed")
{
    const auto p = channel_preset(1);
    const auto a = generate(p, 42), b = generate(p, 42), c = generate(p, 43);
    std::ostringstream sa, sb, sc;
    write_channel_csv(sa, a);
    write_channel_csv(sb, b);
    write_channel_csv(sc, c);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str() != sc.str());
}

TEST_CASE("flatten follows the definition and sorts by delay")
{
    ChannelRealization ch;
    ch.shadowing = 2.0;
    ch.clusters = {{0.0, {{0.0, 0.5}, {2.0, -0.25}, {9.0, 0.1}}}, {1.5, {{0.0, 0.3}, {4.0, -0.2}}}};
    const auto paths = flatten(ch);
    REQUIRE(paths.size() == 5);
    const double expected_delay[] = {0.0, 1.5, 2.0, 5.5, 9.0};
    const double expected_amp[] = {1.0, 0.6, -0.5, -0.4, 0.2};
    for (std::size_t i = 0; i < 5; ++i)
    {
        CHECK(paths[i].delay == expected_delay[i]);
        CHECK(paths[i].amplitude == doctest::Approx(expected_amp[i]));
    }
    double rays = 0.0;
    for (const auto &c : ch.clusters)
        for (const auto &r : c.rays)
            rays += r.amplitude * r.amplitude;
    CHECK(path_energy(paths) == doctest::Approx(4.0 * rays));
}

TEST_CASE("normalize_energy")
{
    const auto n = normalize_energy(PathList{{0.0, 3.0}, {1.0, 4.0}});
    CHECK(n[0].amplitude == doctest::Approx(0.6));
    CHECK(n[1].amplitude == doctest::Approx(0.8));
    CHECK(n[1].delay == 1.0);
    const auto again = normalize_energy(n);
    CHECK(again[0].amplitude == doctest::Approx(n[0].amplitude).epsilon(1e-15));
    CHECK(path_energy(normalize_energy(flatten(generate(channel_preset(1), 5)))) == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalize_energy(PathList{}), std::invalid_argument);
    CHECK_THROWS_AS(normalize_energy(PathList{{0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("censored inter-arrival means match the Poisson rates")
{
    const auto p = channel_preset(1);
    double cluster_exposure = 0.0, ray_exposure = 0.0;
    std::size_t cluster_gaps = 0, ray_gaps = 0;
    for (std::uint64_t seed = 0; cluster_gaps < 10000; ++seed)
    {
        const auto ch = generate(p, 7000 + seed);
        cluster_exposure += cluster_horizon(p);
        cluster_gaps += ch.clusters.size() - 1;
        for (const auto &c : ch.clusters)
        {
            ray_exposure += std::max(0.0, ray_horizon(p, c.arrival));
            ray_gaps += c.rays.size() - 1;
        }
    }
    CHECK(cluster_exposure / cluster_gaps == doctest::Approx(1.0 / p.cluster_rate).epsilon(0.05));
    CHECK(ray_exposure / ray_gaps == doctest::Approx(1.0 / p.ray_rate).epsilon(0.05));
}

TEST_CASE("ray log-magnitudes have the lognormal mean and spread")
{
    // With shadowing and the deterministic decay removed, 20 log10 |alpha| is
    // normal with variance sigma1^2 + sigma2^2 and mean -(sigma1^2 + sigma2^2) ln10 / 20.
    const auto p = channel_preset(1);
    const double var = p.cluster_fade_std * p.cluster_fade_std + p.ray_fade_std * p.ray_fade_std;
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    for (std::uint64_t seed = 0; n < 100000; ++seed)
    {
        const auto ch = generate(p, 90000 + seed);
        for (const auto &c : ch.clusters)
            for (const auto &r : c.rays)
            {
                const double decay_db = 10.0 * std::log10(std::exp(-c.arrival / p.cluster_decay - r.delay / p.ray_decay));
                const double x = 20.0 * std::log10(std::abs(r.amplitude)) - decay_db;
                sum += x;
                sum2 += x * x;
                ++n;
            }
    }
    const double mean = sum / n;
    const double variance = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(-var * std::log(10.0) / 20.0).epsilon(0.1));
    CHECK(variance == doctest::Approx(var).epsilon(0.1));
}

TEST_CASE("channel CSV schema")
{
    std::ostringstream os;
    write_channel_csv_header(os);
    ChannelRealization ch;
    ch.seed = 9;
    ch.clusters = {{0.0, {{0.0, 0.5}, {1.25, -0.5}}}};
    write_channel_csv(os, ch);
    CHECK(os.str() == "seed,path_index,delay_ns,amplitude\n9,0,0,0.5\n9,1,1.25,-0.5\n");
}
