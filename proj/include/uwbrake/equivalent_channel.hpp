// Symbol-level equivalent channel seen at the Rake output.
//
// The continuous response is composed in closed form as a sum of shifted
// raised cosines,
//
//     h(t) = sum_j sum_p w_j a_p p(t + t_j - d_p),
//
// with the fingers aligned so that every matched path peaks at t = 0. Under a
// common timing offset dt on all branches the response becomes
// f(t) = h(t - dt), and the receiver's symbol clock samples f at k * T_s.

#ifndef UWBRAKE_EQUIVALENT_CHANNEL_HPP
#define UWBRAKE_EQUIVALENT_CHANNEL_HPP

#include "uwbrake/channel_model.hpp"
#include "uwbrake/pulse.hpp"
#include "uwbrake/rake.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwbrake
{

struct SystemConfig
{
    double chip_period = 1.0;  // T_c, ns
    int spread_length = 12;    // N

    double symbol_period() const { return chip_period * spread_length; }
    void validate() const;
};

struct MistimingSpec
{
    double dt = 0.0;  // ns, common to all branches
};

struct SymbolChannel
{
    std::vector<double> taps;        // taps[i] = g(first_index + i)
    int first_index = 0;
    double window_energy_ratio = 1.0;

    int last_index() const { return first_index + static_cast<int>(taps.size()) - 1; }
    // g(k), zero outside the stored window.
    double at(int k) const;
    double energy() const;
};

struct ComposeOptions
{
    int oversample = 64;              // energy-grid samples per chip
    double energy_tolerance = 1e-8;   // admissible out-of-window energy fraction
    int initial_half_window = 8;      // symbols each side of the energy centroid
    int max_half_window = 1024;
};

// Tap window could not reach the energy criterion within max_half_window.
class WindowError : public std::runtime_error
{
  public:
    WindowError(const std::string &what, double achieved_ratio)
        : std::runtime_error(what), achieved_ratio_(achieved_ratio)
    {
    }
    double achieved_ratio() const { return achieved_ratio_; }

  private:
    double achieved_ratio_;
};

class EquivalentChannel
{
  public:
    EquivalentChannel(std::span<const Path> paths, const RakeFingers &fingers, const PulseConfig &pulse,
                      const SystemConfig &system, const ComposeOptions &options = {});

    // h(t), perfect timing.
    double operator()(double t) const;

    // f(t) = h(t - dt), evaluated term by term.
    double mistimed(double t, double dt) const;

    // Symbol samples f(k T_s) over an auto-extended window. Throws WindowError.
    SymbolChannel taps(double dt) const;

    // Continuous-time energy of h and its energy centroid, measured on the
    // oversampled grid.
    double energy() const { return grid_.total; }
    double centroid() const { return centroid_; }

    const SystemConfig &system() const { return system_; }

  private:
    struct Term
    {
        double shift;  // d_p - t_j
        double coeff;  // w_j a_p
    };

    struct EnergyGrid
    {
        double start = 0.0;             // time of sample 0
        double step = 0.0;
        std::vector<double> cumulative; // cumulative[n] = step * sum_{m<n} h_m^2
        double total = 0.0;
        double centroid = 0.0;

        double end() const { return start + step * static_cast<double>(cumulative.size() - 1); }
        double energy_between(double lo, double hi) const;
    };

    EnergyGrid build_grid(double lo, double hi) const;

    std::vector<Term> terms_;
    std::vector<Path> paths_;
    std::vector<Finger> fingers_;
    RaisedCosine pulse_;
    SystemConfig system_;
    ComposeOptions options_;
    double shift_min_ = 0.0;
    double shift_max_ = 0.0;
    EnergyGrid grid_;
    double centroid_ = 0.0;
};

SymbolChannel compose_taps(std::span<const Path> paths, const RakeFingers &fingers, const PulseConfig &pulse,
                           const SystemConfig &system, const MistimingSpec &mistiming,
                           const ComposeOptions &options = {});

// Checks that the taps composed at offset dt agree within tol with the
// perfect-timing response sampled at the shifted instants k T_s - dt.
bool shift_consistency_check(std::span<const Path> paths, const RakeFingers &fingers, const PulseConfig &pulse,
                             const SystemConfig &system, double dt, double tol = 1e-10);

// Tap dump CSV: header "k,tap_value".
void write_taps_csv(std::ostream &os, const SymbolChannel &ch);

} // namespace uwbrake

#endif
