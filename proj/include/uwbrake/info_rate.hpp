// Achievable information rate of a symbol-spaced ISI channel with white
// Gaussian noise at the Rake output, and the Es/N0 penalty of mistiming.
//
// Rates are in bits per symbol:
//
//     C = 1/(4 pi) * integral_{-pi}^{pi} log2(1 + 2 (Es/N0) |H(e^{j theta})|^2) d theta.

#ifndef UWBRAKE_INFO_RATE_HPP
#define UWBRAKE_INFO_RATE_HPP

#include "uwbrake/equivalent_channel.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwbrake
{

inline constexpr int default_quad_points = 4096;

struct RatePoint
{
    double snr_db = 0.0;
    double rate = 0.0;
};

struct SolveOptions
{
    double lo_db = -60.0;
    double hi_db = 80.0;
    double tol_db = 1e-4;
};

struct DegradationResult
{
    double snr_h_db = 0.0;
    double snr_f_db = 0.0;
    double loss_db = 0.0;  // snr_f_db - snr_h_db
};

class SolveError : public std::runtime_error
{
  public:
    enum class Channel
    {
        Unspecified,
        PerfectTiming,
        Mistimed,
    };

    explicit SolveError(const std::string &what, Channel which = Channel::Unspecified)
        : std::runtime_error(what), which_(which)
    {
    }
    Channel which() const { return which_; }

  private:
    Channel which_;
};

// |H(e^{j theta})|^2 sampled at the M quadrature midpoints
// theta_m = -pi + (m + 1/2) 2 pi / M. Build once, evaluate many SNRs.
class ChannelSpectrum
{
  public:
    ChannelSpectrum(std::span<const double> taps, int quad_points = default_quad_points);
    explicit ChannelSpectrum(const SymbolChannel &ch, int quad_points = default_quad_points)
        : ChannelSpectrum(std::span<const double>(ch.taps), quad_points)
    {
    }

    double capacity(double snr_db) const;

    // Es/N0 (dB) at which capacity equals target_rate. Bisection on a fixed
    // bracket down to opts.tol_db, then a secant step inside the final bracket.
    // Throws SolveError when the target is not reachable in the bracket or the
    // channel is zero.
    double solve_snr(double target_rate, const SolveOptions &opts = {}) const;

    const std::vector<double> &power() const { return power_; }
    double max_power() const { return max_power_; }

  private:
    std::vector<double> power_;
    double max_power_ = 0.0;
};

double capacity(const SymbolChannel &ch, double snr_db, int quad_points = default_quad_points);

double solve_snr(const SymbolChannel &ch, double target_rate, double tol_db = 1e-4,
                 int quad_points = default_quad_points);

// L = SNR_f - SNR_h. Solver failures are rethrown tagged with the failing channel.
DegradationResult degradation(const SymbolChannel &h_ch, const SymbolChannel &f_ch, double target_rate,
                              const SolveOptions &opts = {}, int quad_points = default_quad_points);

DegradationResult degradation(const ChannelSpectrum &h_spec, const ChannelSpectrum &f_spec, double target_rate,
                              const SolveOptions &opts = {});

} // namespace uwbrake

#endif
