#include "uwbrake/pulse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uwbrake
{

namespace
{
// |1 - 4 alpha^2 x^2| below this is treated as the singular point.
constexpr double singular_guard = 1e-8;
} // namespace

void PulseConfig::validate() const
{
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
        throw std::invalid_argument("Roll-off factor must lie in [0, 1].");
    if (!(chip_period > 0.0) || !std::isfinite(chip_period))
        throw std::invalid_argument("Chip period must be positive and finite.");
}

RaisedCosine::RaisedCosine(const PulseConfig &cfg)
    : cfg_(cfg), alpha_(cfg.rolloff), period_(cfg.chip_period), singular_value_(0.0)
{
    cfg_.validate();
    if (alpha_ > 0.0)
    {
        // L'Hopital: lim_{x -> 1/(2 alpha)} p = (alpha / 2) sin(pi / (2 alpha))
        singular_value_ = 0.5 * alpha_ * std::sin(std::numbers::pi / (2.0 * alpha_));
    }
}

double RaisedCosine::operator()(double t) const
{
    const double x = std::abs(t) / period_;
    if (x == 0.0)
        return 1.0;

    const double ax = alpha_ * x;
    const double den = 1.0 - 4.0 * ax * ax;
    if (std::abs(den) < singular_guard)
        return singular_value_;

    const double px = std::numbers::pi * x;
    return std::sin(px) / px * std::cos(std::numbers::pi * ax) / den;
}

double RaisedCosine::spectrum(double f) const
{
    const double af = std::abs(f) * period_;
    const double lo = 0.5 * (1.0 - alpha_);
    const double hi = 0.5 * (1.0 + alpha_);
    if (af <= lo)
        return period_;
    if (af > hi)
        return 0.0;
    return 0.5 * period_ * (1.0 + std::cos(std::numbers::pi / alpha_ * (af - lo)));
}

double eval(const PulseConfig &cfg, double t)
{
    return RaisedCosine(cfg)(t);
}

} // namespace uwbrake
