#include "uwbrake/equivalent_channel.hpp"

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace uwbrake
{

void SystemConfig::validate() const
{
    if (!(chip_period > 0.0) || !std::isfinite(chip_period))
        throw std::invalid_argument("Chip period must be positive and finite.");
    if (spread_length < 1)
        throw std::invalid_argument("Spreading length must be at least 1.");
}

double SymbolChannel::at(int k) const
{
    if (k < first_index || k > last_index())
        return 0.0;
    return taps[static_cast<std::size_t>(k - first_index)];
}

double SymbolChannel::energy() const
{
    double e = 0.0;
    for (double g : taps)
        e += g * g;
    return e;
}

double EquivalentChannel::EnergyGrid::energy_between(double lo, double hi) const
{
    const auto n_max = static_cast<double>(cumulative.size() - 1);
    const double a = std::clamp(std::ceil((lo - start) / step), 0.0, n_max);
    const double b = std::clamp(std::ceil((hi - start) / step), 0.0, n_max);
    return cumulative[static_cast<std::size_t>(b)] - cumulative[static_cast<std::size_t>(a)];
}

EquivalentChannel::EquivalentChannel(std::span<const Path> paths, const RakeFingers &fingers,
                                     const PulseConfig &pulse, const SystemConfig &system,
                                     const ComposeOptions &options)
    : paths_(paths.begin(), paths.end()), fingers_(fingers.entries), pulse_(pulse), system_(system), options_(options)
{
    system_.validate();
    if (options_.oversample < 4)
        throw std::invalid_argument("Energy-grid oversampling must be at least 4 samples per chip.");
    if (!(options_.energy_tolerance > 0.0 && options_.energy_tolerance < 1.0))
        throw std::invalid_argument("Energy tolerance must lie in (0, 1).");
    if (options_.initial_half_window < 1 || options_.max_half_window < options_.initial_half_window)
        throw std::invalid_argument("Invalid tap window limits.");
    if (std::abs(pulse.chip_period - system.chip_period) > 1e-12 * system.chip_period)
        throw std::invalid_argument("Pulse period must equal the chip period.");
    if (paths_.empty())
        throw std::invalid_argument("Equivalent channel needs at least one path.");
    if (fingers_.empty())
        throw std::invalid_argument("Equivalent channel needs at least one Rake finger.");

    terms_.reserve(paths_.size() * fingers_.size());
    shift_min_ = std::numeric_limits<double>::infinity();
    shift_max_ = -std::numeric_limits<double>::infinity();
    for (const auto &f : fingers_)
    {
        for (const auto &p : paths_)
        {
            const double coeff = f.weight * p.amplitude;
            if (coeff == 0.0)
                continue;
            const double shift = p.delay - f.delay;
            terms_.push_back({shift, coeff});
            shift_min_ = std::min(shift_min_, shift);
            shift_max_ = std::max(shift_max_, shift);
        }
    }
    if (terms_.empty())
        throw std::invalid_argument("Equivalent channel is identically zero.");

    const double pad = 2.0 * (options_.initial_half_window + 1) * system_.symbol_period();
    grid_ = build_grid(shift_min_ - pad, shift_max_ + pad);
    centroid_ = grid_.centroid;
}

double EquivalentChannel::operator()(double t) const
{
    double acc = 0.0;
    for (const auto &term : terms_)
        acc += term.coeff * pulse_(t - term.shift);
    return acc;
}

double EquivalentChannel::mistimed(double t, double dt) const
{
    double acc = 0.0;
    for (const auto &term : terms_)
        acc += term.coeff * pulse_(t - (term.shift + dt));
    return acc;
}

EquivalentChannel::EnergyGrid EquivalentChannel::build_grid(double lo, double hi) const
{
    using cplx = std::complex<double>;

    EnergyGrid grid;
    grid.step = system_.chip_period / options_.oversample;
    const auto wanted = static_cast<std::size_t>(std::ceil((hi - lo) / grid.step)) + 1;
    const std::size_t n = detail::next_power_of_two(wanted);
    const double span = grid.step * static_cast<double>(n);
    grid.start = 0.5 * (lo + hi) - 0.5 * span;

    // Spectrum H(f) = P(f) A(f) W(f), A over paths (delays taken relative to
    // the grid start), W over fingers. Bins beyond the pulse bandwidth vanish.
    const double df = 1.0 / span;
    const auto k_max = static_cast<std::size_t>(std::floor(pulse_.bandwidth() / df));
    if (2 * k_max + 1 >= n)
        throw std::logic_error("Energy grid does not resolve the pulse bandwidth.");

    std::vector<cplx> path_phase(paths_.size()), path_step(paths_.size());
    for (std::size_t i = 0; i < paths_.size(); ++i)
    {
        const double arg = -2.0 * std::numbers::pi * df * (paths_[i].delay - grid.start);
        path_phase[i] = 1.0;
        path_step[i] = std::polar(1.0, arg);
    }
    std::vector<cplx> finger_phase(fingers_.size()), finger_step(fingers_.size());
    for (std::size_t j = 0; j < fingers_.size(); ++j)
    {
        finger_phase[j] = 1.0;
        finger_step[j] = std::polar(1.0, 2.0 * std::numbers::pi * df * fingers_[j].delay);
    }

    std::vector<cplx> spec(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k <= k_max; ++k)
    {
        // Re-anchor the phase recurrences periodically to bound drift.
        if (k % 256 == 0)
        {
            const double f = df * static_cast<double>(k);
            for (std::size_t i = 0; i < paths_.size(); ++i)
                path_phase[i] = std::polar(1.0, -2.0 * std::numbers::pi * f * (paths_[i].delay - grid.start));
            for (std::size_t j = 0; j < fingers_.size(); ++j)
                finger_phase[j] = std::polar(1.0, 2.0 * std::numbers::pi * f * fingers_[j].delay);
        }
        cplx a(0.0, 0.0), w(0.0, 0.0);
        for (std::size_t i = 0; i < paths_.size(); ++i)
        {
            a += paths_[i].amplitude * path_phase[i];
            path_phase[i] *= path_step[i];
        }
        for (std::size_t j = 0; j < fingers_.size(); ++j)
        {
            w += fingers_[j].weight * finger_phase[j];
            finger_phase[j] *= finger_step[j];
        }
        const cplx value = df * pulse_.spectrum(df * static_cast<double>(k)) * a * w;
        spec[k] = value;
        if (k != 0)
            spec[n - k] = std::conj(value);
    }

    detail::fft(spec, detail::FftDirection::Backward);

    grid.cumulative.resize(n + 1);
    grid.cumulative[0] = 0.0;
    double moment = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double h = spec[i].real();
        const double e = grid.step * h * h;
        grid.cumulative[i + 1] = grid.cumulative[i] + e;
        moment += e * (grid.start + grid.step * static_cast<double>(i));
    }
    grid.total = grid.cumulative[n];
    if (!(grid.total > 0.0))
        throw std::invalid_argument("Equivalent channel has zero energy.");
    grid.centroid = moment / grid.total;
    return grid;
}

SymbolChannel EquivalentChannel::taps(double dt) const
{
    if (!std::isfinite(dt))
        throw std::invalid_argument("Timing offset must be finite.");

    const double ts = system_.symbol_period();
    const int center = static_cast<int>(std::lround((centroid_ + dt) / ts));

    EnergyGrid local;
    const EnergyGrid *grid = &grid_;
    int half = options_.initial_half_window;
    double ratio = 0.0;
    for (;;)
    {
        // Window in h-time: the samples k T_s - dt for k in [center - half, center + half].
        const double lo = (center - half - 0.5) * ts - dt;
        const double hi = (center + half + 0.5) * ts - dt;
        const double margin = hi - lo;
        if (lo - margin < grid->start || hi + margin > grid->end())
        {
            local = build_grid(std::min(lo, shift_min_) - 2.0 * margin, std::max(hi, shift_max_) + 2.0 * margin);
            grid = &local;
        }
        ratio = std::min(1.0, grid->energy_between(lo, hi) / grid->total);
        if (1.0 - ratio <= options_.energy_tolerance)
            break;
        half *= 2;
        if (half > options_.max_half_window)
            throw WindowError("Tap window exceeded " + std::to_string(options_.max_half_window) +
                                  " symbols per side; captured energy ratio " + std::to_string(ratio) + ".",
                              ratio);
    }

    SymbolChannel out;
    out.first_index = center - half;
    out.window_energy_ratio = ratio;
    out.taps.resize(static_cast<std::size_t>(2 * half + 1));
    for (int i = 0; i <= 2 * half; ++i)
        out.taps[static_cast<std::size_t>(i)] = mistimed((out.first_index + i) * ts, dt);
    return out;
}

SymbolChannel compose_taps(std::span<const Path> paths, const RakeFingers &fingers, const PulseConfig &pulse,
                           const SystemConfig &system, const MistimingSpec &mistiming, const ComposeOptions &options)
{
    return EquivalentChannel(paths, fingers, pulse, system, options).taps(mistiming.dt);
}

bool shift_consistency_check(std::span<const Path> paths, const RakeFingers &fingers, const PulseConfig &pulse,
                             const SystemConfig &system, double dt, double tol)
{
    const EquivalentChannel ec(paths, fingers, pulse, system);
    const SymbolChannel f = ec.taps(dt);
    const double ts = system.symbol_period();
    for (int k = f.first_index; k <= f.last_index(); ++k)
    {
        if (!(std::abs(f.at(k) - ec(k * ts - dt)) <= tol))
            return false;
    }
    return true;
}

void write_taps_csv(std::ostream &os, const SymbolChannel &ch)
{
    os << "k,tap_value\n";
    const auto old_precision = os.precision(17);
    for (int k = ch.first_index; k <= ch.last_index(); ++k)
        os << k << ',' << ch.at(k) << '\n';
    os.precision(old_precision);
}

} // namespace uwbrake
