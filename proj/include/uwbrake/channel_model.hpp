// IEEE 802.15.3a indoor UWB channel model (Saleh-Valenzuela cluster/ray
// arrivals with lognormal fading and lognormal shadowing).
//
// All delays are in ns. Amplitudes are real with an equiprobable sign.

#ifndef UWBRAKE_CHANNEL_MODEL_HPP
#define UWBRAKE_CHANNEL_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace uwbrake
{

struct ChannelParams
{
    double cluster_rate = 0.0;      // Lambda, cluster arrivals per ns
    double ray_rate = 0.0;          // lambda, ray arrivals per ns
    double cluster_decay = 0.0;     // Gamma, ns
    double ray_decay = 0.0;         // gamma, ns
    double cluster_fade_std = 0.0;  // sigma1, dB
    double ray_fade_std = 0.0;      // sigma2, dB
    double shadow_std = 0.0;        // sigma_x, dB
    double max_excess_delay = 0.0;  // generation horizon, ns
    double power_floor = 1e-5;      // rays below this fraction of the first ray's mean power are not emitted

    // Throws std::invalid_argument on non-positive rates/decays, negative
    // deviations, max_excess_delay <= Gamma or a floor outside (0, 1).
    void validate() const;
};

// Presets CM1..CM4. max_excess_delay defaults to 10 * Gamma.
ChannelParams channel_preset(int cm);

struct Ray
{
    double delay = 0.0;      // relative to the cluster arrival, ns
    double amplitude = 0.0;  // signed linear gain
};

struct Cluster
{
    double arrival = 0.0;  // T_l, ns
    std::vector<Ray> rays;
};

struct ChannelRealization
{
    std::uint64_t seed = 0;
    double shadowing = 1.0;  // X, linear amplitude gain
    std::vector<Cluster> clusters;

    std::size_t ray_count() const;
};

struct Path
{
    double delay = 0.0;      // ns
    double amplitude = 0.0;  // signed real
};

using PathList = std::vector<Path>;

// Last admissible cluster arrival time. Cluster arrivals are a Poisson
// process observed on [0, cluster_horizon].
double cluster_horizon(const ChannelParams &params);

// Last admissible ray delay (relative to T_l) for a cluster arriving at
// cluster_arrival. May be negative when only the first ray fits.
double ray_horizon(const ChannelParams &params, double cluster_arrival);

// Draws one realization. Pure function of (params, seed).
ChannelRealization generate(const ChannelParams &params, std::uint64_t seed);

// One path per ray with delay T_l + tau and amplitude X * alpha, stably sorted by delay.
PathList flatten(const ChannelRealization &ch);

// Rescales amplitudes to unit total energy. Throws std::invalid_argument on
// an empty list or zero energy.
PathList normalize_energy(std::span<const Path> paths);

double path_energy(std::span<const Path> paths);

// Channel dump CSV: header "seed,path_index,delay_ns,amplitude", one row per
// path of the flattened (unnormalized) realization.
void write_channel_csv_header(std::ostream &os);
void write_channel_csv(std::ostream &os, const ChannelRealization &ch);

} // namespace uwbrake

#endif
