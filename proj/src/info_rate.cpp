#include "uwbrake/info_rate.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace uwbrake
{

ChannelSpectrum::ChannelSpectrum(std::span<const double> taps, int quad_points)
{
    if (quad_points < 64 || !detail::is_power_of_two(static_cast<std::size_t>(quad_points)))
        throw std::invalid_argument("Quadrature size must be a power of two and at least 64.");

    // theta_m = 2 pi m / M + phi with phi = pi / M - pi, so
    // H(theta_m) = sum_i (g_i e^{-j i phi}) e^{-j 2 pi i m / M}; taps longer than M fold modulo M.
    const auto m = static_cast<std::size_t>(quad_points);
    const double phi = std::numbers::pi / quad_points - std::numbers::pi;
    std::vector<std::complex<double>> buf(m, {0.0, 0.0});
    for (std::size_t i = 0; i < taps.size(); ++i)
    {
        if (taps[i] == 0.0)
            continue;
        const double arg = -std::fmod(static_cast<double>(i) * phi, 2.0 * std::numbers::pi);
        buf[i % m] += taps[i] * std::polar(1.0, arg);
    }
    detail::fft(buf, detail::FftDirection::Forward);

    power_.resize(m);
    for (std::size_t k = 0; k < m; ++k)
    {
        power_[k] = std::norm(buf[k]);
        max_power_ = std::max(max_power_, power_[k]);
    }
}

double ChannelSpectrum::capacity(double snr_db) const
{
    const double twice_snr = 2.0 * std::pow(10.0, snr_db / 10.0);
    double acc = 0.0;
    for (double p : power_)
        acc += std::log1p(twice_snr * p);
    // (1 / 4 pi) * (2 pi / M) * sum log2(.)
    return acc / (2.0 * static_cast<double>(power_.size()) * std::numbers::ln2);
}

double ChannelSpectrum::solve_snr(double target_rate, const SolveOptions &opts) const
{
    if (!(target_rate > 0.0) || !std::isfinite(target_rate))
        throw std::invalid_argument("Target rate must be positive and finite.");
    if (!(opts.hi_db > opts.lo_db) || !(opts.tol_db > 0.0))
        throw std::invalid_argument("Invalid SNR bracket or tolerance.");
    if (!(max_power_ > 0.0))
        throw SolveError("Channel has zero energy; no Es/N0 reaches the target rate.");

    double lo = opts.lo_db, hi = opts.hi_db;
    double c_lo = capacity(lo) - target_rate;
    double c_hi = capacity(hi) - target_rate;
    if (c_hi < 0.0)
        throw SolveError("Target rate " + std::to_string(target_rate) + " not reached below " +
                         std::to_string(opts.hi_db) + " dB.");
    if (c_lo > 0.0)
        throw SolveError("Target rate " + std::to_string(target_rate) + " already exceeded at " +
                         std::to_string(opts.lo_db) + " dB.");

    while (hi - lo > opts.tol_db)
    {
        const double mid = 0.5 * (lo + hi);
        const double c_mid = capacity(mid) - target_rate;
        if (c_mid == 0.0)
            return mid;
        if (c_mid < 0.0)
        {
            lo = mid;
            c_lo = c_mid;
        }
        else
        {
            hi = mid;
            c_hi = c_mid;
        }
    }
    if (c_hi == c_lo)
        return 0.5 * (lo + hi);
    return lo - c_lo * (hi - lo) / (c_hi - c_lo);
}

double capacity(const SymbolChannel &ch, double snr_db, int quad_points)
{
    return ChannelSpectrum(ch, quad_points).capacity(snr_db);
}

double solve_snr(const SymbolChannel &ch, double target_rate, double tol_db, int quad_points)
{
    SolveOptions opts;
    opts.tol_db = tol_db;
    return ChannelSpectrum(ch, quad_points).solve_snr(target_rate, opts);
}

DegradationResult degradation(const ChannelSpectrum &h_spec, const ChannelSpectrum &f_spec, double target_rate,
                              const SolveOptions &opts)
{
    DegradationResult out;
    try
    {
        out.snr_h_db = h_spec.solve_snr(target_rate, opts);
    }
    catch (const SolveError &e)
    {
        throw SolveError(std::string("perfect-timing channel: ") + e.what(), SolveError::Channel::PerfectTiming);
    }
    try
    {
        out.snr_f_db = f_spec.solve_snr(target_rate, opts);
    }
    catch (const SolveError &e)
    {
        throw SolveError(std::string("mistimed channel: ") + e.what(), SolveError::Channel::Mistimed);
    }
    out.loss_db = out.snr_f_db - out.snr_h_db;
    return out;
}

DegradationResult degradation(const SymbolChannel &h_ch, const SymbolChannel &f_ch, double target_rate,
                              const SolveOptions &opts, int quad_points)
{
    return degradation(ChannelSpectrum(h_ch, quad_points), ChannelSpectrum(f_ch, quad_points), target_rate, opts);
}

} // namespace uwbrake
