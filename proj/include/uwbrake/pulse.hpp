// Combined transmit/receive raised-cosine pulse.

#ifndef UWBRAKE_PULSE_HPP
#define UWBRAKE_PULSE_HPP

namespace uwbrake
{

struct PulseConfig
{
    double rolloff = 0.0;      // alpha in [0, 1]
    double chip_period = 1.0;  // T, ns

    void validate() const;
};

class RaisedCosine
{
  public:
    explicit RaisedCosine(const PulseConfig &cfg);

    // p(t) = sinc(t/T) cos(alpha pi t/T) / (1 - 4 alpha^2 t^2 / T^2).
    // The removable singularities at t = 0 and t = +-T/(2 alpha) return their limits.
    double operator()(double t) const;

    // Fourier transform of p(t); P(0) = T and p(0) = 1.
    double spectrum(double f) const;

    // One-sided bandwidth (1 + alpha) / (2T).
    double bandwidth() const { return (1.0 + alpha_) / (2.0 * period_); }

    const PulseConfig &config() const { return cfg_; }

  private:
    PulseConfig cfg_;
    double alpha_;
    double period_;
    double singular_value_;  // p(T/(2 alpha))
};

// Convenience wrapper, equivalent to RaisedCosine(cfg)(t).
double eval(const PulseConfig &cfg, double t);

} // namespace uwbrake

#endif
