#include "uwbrake/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

namespace uwbrake
{

void ChannelParams::validate() const
{
    if (!(cluster_rate > 0.0) || !(ray_rate > 0.0))
        throw std::invalid_argument("Cluster and ray arrival rates must be positive.");
    if (!(cluster_decay > 0.0) || !(ray_decay > 0.0))
        throw std::invalid_argument("Cluster and ray decay constants must be positive.");
    if (!(cluster_fade_std >= 0.0) || !(ray_fade_std >= 0.0) || !(shadow_std >= 0.0))
        throw std::invalid_argument("Fading and shadowing deviations cannot be negative.");
    if (!(max_excess_delay > cluster_decay) || !std::isfinite(max_excess_delay))
        throw std::invalid_argument("max_excess_delay must be finite and exceed the cluster decay constant.");
    if (!(power_floor > 0.0 && power_floor < 1.0))
        throw std::invalid_argument("power_floor must lie in (0, 1).");
}

ChannelParams channel_preset(int cm)
{
    // IEEE 802.15.3a final report, Table 2 (model parameters).
    ChannelParams p;
    p.cluster_fade_std = 3.3941;
    p.ray_fade_std = 3.3941;
    p.shadow_std = 3.0;
    switch (cm)
    {
    case 1: // LOS, 0-4 m
        p.cluster_rate = 0.0233;
        p.ray_rate = 2.5;
        p.cluster_decay = 7.1;
        p.ray_decay = 4.3;
        break;
    case 2: // NLOS, 0-4 m
        p.cluster_rate = 0.4;
        p.ray_rate = 0.5;
        p.cluster_decay = 5.5;
        p.ray_decay = 6.7;
        break;
    case 3: // NLOS, 4-10 m
        p.cluster_rate = 0.0667;
        p.ray_rate = 2.1;
        p.cluster_decay = 14.0;
        p.ray_decay = 7.9;
        break;
    case 4: // 25 ns RMS delay spread
        p.cluster_rate = 0.0667;
        p.ray_rate = 2.1;
        p.cluster_decay = 24.0;
        p.ray_decay = 12.0;
        break;
    default:
        throw std::invalid_argument("Unknown channel model CM" + std::to_string(cm) + ", expected 1..4.");
    }
    p.max_excess_delay = 10.0 * p.cluster_decay;
    return p;
}

std::size_t ChannelRealization::ray_count() const
{
    std::size_t n = 0;
    for (const auto &c : clusters)
        n += c.rays.size();
    return n;
}

double cluster_horizon(const ChannelParams &params)
{
    const double by_power = params.cluster_decay * std::log(1.0 / params.power_floor);
    return std::min(params.max_excess_delay, by_power);
}

double ray_horizon(const ChannelParams &params, double cluster_arrival)
{
    const double by_delay = params.max_excess_delay - cluster_arrival;
    const double by_power = params.ray_decay * (std::log(1.0 / params.power_floor) - cluster_arrival / params.cluster_decay);
    return std::min(by_delay, by_power);
}

ChannelRealization generate(const ChannelParams &params, std::uint64_t seed)
{
    params.validate();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::exponential_distribution<double> cluster_gap(params.cluster_rate);
    std::exponential_distribution<double> ray_gap(params.ray_rate);
    std::bernoulli_distribution sign(0.5);

    auto positive_draw = [&rng](std::exponential_distribution<double> &d)
    {
        double x = d(rng);
        while (!(x > 0.0))
            x = d(rng);
        return x;
    };

    const double ln10 = std::log(10.0);
    // Lognormal mean correction so that E[alpha^2] follows the double-exponential decay.
    const double fade_var = params.cluster_fade_std * params.cluster_fade_std + params.ray_fade_std * params.ray_fade_std;
    const double mean_correction_db = fade_var * ln10 / 20.0;

    ChannelRealization ch;
    ch.seed = seed;
    ch.shadowing = std::pow(10.0, params.shadow_std * gauss(rng) / 20.0);

    const double t_max = cluster_horizon(params);
    double arrival = 0.0;
    while (arrival <= t_max)
    {
        Cluster cluster;
        cluster.arrival = arrival;
        const double cluster_fade_db = params.cluster_fade_std * gauss(rng);
        const double tau_max = ray_horizon(params, arrival);

        double tau = 0.0;
        do
        {
            const double mean_power = std::exp(-arrival / params.cluster_decay - tau / params.ray_decay);
            const double level_db = 10.0 * std::log10(mean_power) - mean_correction_db + cluster_fade_db + params.ray_fade_std * gauss(rng);
            const double magnitude = std::pow(10.0, level_db / 20.0);
            cluster.rays.push_back({tau, sign(rng) ? magnitude : -magnitude});
            tau += positive_draw(ray_gap);
        } while (tau <= tau_max);

        ch.clusters.push_back(std::move(cluster));
        arrival += positive_draw(cluster_gap);
    }
    return ch;
}

PathList flatten(const ChannelRealization &ch)
{
    PathList out;
    out.reserve(ch.ray_count());
    for (const auto &c : ch.clusters)
        for (const auto &r : c.rays)
            out.push_back({c.arrival + r.delay, ch.shadowing * r.amplitude});
    std::stable_sort(out.begin(), out.end(), [](const Path &a, const Path &b) { return a.delay < b.delay; });
    return out;
}

double path_energy(std::span<const Path> paths)
{
    double e = 0.0;
    for (const auto &p : paths)
        e += p.amplitude * p.amplitude;
    return e;
}

PathList normalize_energy(std::span<const Path> paths)
{
    if (paths.empty())
        throw std::invalid_argument("Cannot normalize an empty path list.");
    const double e = path_energy(paths);
    if (!(e > 0.0))
        throw std::invalid_argument("Cannot normalize a path list with zero energy.");
    const double scale = 1.0 / std::sqrt(e);
    PathList out(paths.begin(), paths.end());
    for (auto &p : out)
        p.amplitude *= scale;
    return out;
}

void write_channel_csv_header(std::ostream &os)
{
    os << "seed,path_index,delay_ns,amplitude\n";
}

void write_channel_csv(std::ostream &os, const ChannelRealization &ch)
{
    const auto paths = flatten(ch);
    const auto old_precision = os.precision(17);
    for (std::size_t i = 0; i < paths.size(); ++i)
        os << ch.seed << ',' << i << ',' << paths[i].delay << ',' << paths[i].amplitude << '\n';
    os.precision(old_precision);
}

} // namespace uwbrake
