// Monte Carlo sweeps of the mistiming penalty over receiver type, roll-off,
// diversity order and target rate.
//
// For every parameter cell (receiver, roll-off, fingers, rate) the channel
// ensemble is screened once at perfect timing: the realizations needing the
// highest Es/N0 are discarded. The survivors are then evaluated on every
// timing offset of the grid. Per-channel worst-case (max over the grid) and
// average-case (uniform mean over the grid) losses are averaged in dB across
// the surviving channels.

#ifndef UWBRAKE_EXPERIMENT_HPP
#define UWBRAKE_EXPERIMENT_HPP

#include "uwbrake/channel_model.hpp"
#include "uwbrake/equivalent_channel.hpp"
#include "uwbrake/info_rate.hpp"
#include "uwbrake/rake.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uwbrake
{

struct SweepConfig
{
    int num_channels = 1000;
    double keep_fraction = 0.9;
    std::vector<double> dt_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; // fractions of T_s
    std::vector<double> rolloffs = {0.3};
    std::vector<int> finger_counts = {8};
    std::vector<double> rates = {0.3};  // bits per symbol
    std::vector<RakeSpec> receivers = {RakeSpec{}};  // fingers field is ignored, see finger_counts
    std::uint64_t base_seed = 1;
    SystemConfig system;
    ChannelParams channel = channel_preset(1);
    int channel_model = 1;  // preset the channel parameters came from; informational
    int quad_points = default_quad_points;
    double solve_tol_db = 1e-4;
    bool normalize_paths = true;
    bool global_screening = false;  // screen on the first receiver's ranking for all receivers
    int threads = 1;                // 0 = hardware concurrency; never changes results

    // Throws std::invalid_argument.
    void validate() const;
};

// Named parameter sets fig2 ... fig7. Throws std::invalid_argument on unknown names.
SweepConfig sweep_preset(const std::string &name);
std::vector<std::string> sweep_preset_names();

// Needed Es/N0 of one channel realization for one parameter cell.
struct ChannelOutcome
{
    std::uint64_t seed = 0;
    std::optional<double> snr_h_db;                // perfect timing
    std::vector<std::optional<double>> snr_f_db;   // one per dt_grid entry
};

struct ScreenResult
{
    std::vector<std::size_t> kept;  // indices into the input, ascending
    std::size_t discarded = 0;
    std::size_t unsolvable = 0;     // discarded first, regardless of the quota
};

// Number of realizations removed by screening: ceil((1 - keep_fraction) n).
std::size_t screen_quota(std::size_t n, double keep_fraction);

// Discards the screen_quota(...) realizations with the highest SNR_h
// (unsolvable first; ties go to the larger seed). Needs at least 10 outcomes.
ScreenResult screen_outcomes(std::span<const ChannelOutcome> outcomes, double keep_fraction);

struct ScreenedChannel
{
    std::size_t index = 0;  // into the realization list
    double snr_h_db = 0.0;
};

struct ScreenedSet
{
    std::vector<ScreenedChannel> survivors;
    std::size_t discarded = 0;
    std::size_t unsolvable = 0;
};

// Computes the perfect-timing SNR_h of every realization for one receiver
// configuration and drops the worst ones. Fingers are taken from receiver.fingers.
ScreenedSet screen_channels(std::span<const PathList> realizations, const RakeSpec &receiver, double rolloff,
                            double rate, const SweepConfig &cfg);

struct DtAggregate
{
    double dt_over_ts = 0.0;
    double mean_snr_h_db = 0.0;
    double mean_snr_f_db = 0.0;
    double mean_loss_db = 0.0;
    int n_used = 0;
    int n_failed = 0;
};

struct CellAggregate
{
    std::vector<DtAggregate> per_dt;  // same order as the dt grid
    double mean_snr_h_db = 0.0;       // over the screened set
    double worst_loss_db = 0.0;
    double avg_loss_db = 0.0;
    double std_worst_loss_db = 0.0;
    double std_avg_loss_db = 0.0;
    int n_kept = 0;
    int n_used = 0;       // channels solvable at every offset
    int n_failed = 0;     // kept channels with at least one failed offset
    int n_unsolvable = 0; // channels without a perfect-timing solution
};

// Screens and aggregates one parameter cell. Result is independent of the
// order of outcomes. When screen_on is given, its outcomes (same seeds, same
// order) decide which channels survive.
CellAggregate aggregate_cell(std::span<const ChannelOutcome> outcomes, std::span<const double> dt_grid,
                             double keep_fraction, std::span<const ChannelOutcome> screen_on = {});

struct DegradationRow
{
    RakeSpec receiver;
    double rolloff = 0.0;
    int fingers = 0;
    double rate = 0.0;
    double dt_over_ts = 0.0;
    double mean_snr_h_db = 0.0;
    double mean_snr_f_db = 0.0;
    double mean_loss_db = 0.0;
    double worst_loss_db = 0.0;
    double avg_loss_db = 0.0;
    int n_used = 0;
    int n_failed = 0;
};

struct SummaryRow
{
    RakeSpec receiver;
    double rolloff = 0.0;
    int fingers = 0;
    double rate = 0.0;
    CellAggregate cell;
};

struct SweepResult
{
    std::vector<DegradationRow> rows;
    std::vector<SummaryRow> summary;
    int failed_evaluations = 0;  // (channel, offset) pairs without a solution
};

using ProgressFn = std::function<void(const std::string &)>;

// Deterministic given cfg (threads only changes the schedule).
SweepResult run_sweep(const SweepConfig &cfg, const ProgressFn &progress = {});

// Realization i uses seed base_seed + i.
std::vector<PathList> generate_ensemble(const SweepConfig &cfg);

void write_results_csv(std::ostream &os, std::span<const DegradationRow> rows);
void write_summary_csv(std::ostream &os, std::span<const SummaryRow> rows);

} // namespace uwbrake

#endif
