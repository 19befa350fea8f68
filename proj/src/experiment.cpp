#include "uwbrake/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace uwbrake
{

namespace
{

// Order-independent mean: values are sorted before a compensated sum.
double stable_mean(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    double sum = 0.0, comp = 0.0;
    for (double x : v)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return (sum + comp) / static_cast<double>(v.size());
}

double stable_std(const std::vector<double> &v)
{
    if (v.size() < 2)
        return 0.0;
    const double mean = stable_mean(v);
    std::vector<double> sq;
    sq.reserve(v.size());
    for (double x : v)
        sq.push_back((x - mean) * (x - mean));
    const double n = static_cast<double>(v.size());
    return std::sqrt(stable_mean(std::move(sq)) * n / (n - 1.0));
}

template <class Body>
void parallel_for(std::size_t n, int threads, Body &&body)
{
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&]
                          {
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            } });
    }
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

struct CellParams
{
    RakeSpec receiver;
    double rolloff = 0.0;
};

// Needed Es/N0 of one realization: one outcome per target rate. Evaluation
// failures leave the affected entries empty.
std::vector<ChannelOutcome> evaluate_channel(const PathList &paths, std::uint64_t seed, const CellParams &cell,
                                             const SweepConfig &cfg, bool perfect_timing_only)
{
    const std::size_t n_rates = cfg.rates.size();
    const std::size_t n_dt = perfect_timing_only ? 0 : cfg.dt_grid.size();
    std::vector<ChannelOutcome> out(n_rates);
    for (auto &o : out)
    {
        o.seed = seed;
        o.snr_f_db.assign(n_dt, std::nullopt);
    }

    SolveOptions solve;
    solve.tol_db = cfg.solve_tol_db;

    auto solve_all = [&](const ChannelSpectrum &spec, auto &&store)
    {
        for (std::size_t r = 0; r < n_rates; ++r)
        {
            try
            {
                store(r, spec.solve_snr(cfg.rates[r], solve));
            }
            catch (const SolveError &)
            {
            }
        }
    };

    try
    {
        const PulseConfig pulse{cell.rolloff, cfg.system.chip_period};
        const RakeFingers fingers = select_fingers(paths, cell.receiver);
        const EquivalentChannel ec(paths, fingers, pulse, cfg.system);
        const ChannelSpectrum h_spec(ec.taps(0.0), cfg.quad_points);
        solve_all(h_spec, [&](std::size_t r, double v) { out[r].snr_h_db = v; });

        const double ts = cfg.system.symbol_period();
        for (std::size_t d = 0; d < n_dt; ++d)
        {
            const double dt = cfg.dt_grid[d] * ts;
            try
            {
                if (dt == 0.0)
                {
                    for (std::size_t r = 0; r < n_rates; ++r)
                        out[r].snr_f_db[d] = out[r].snr_h_db;
                    continue;
                }
                const ChannelSpectrum f_spec(ec.taps(dt), cfg.quad_points);
                solve_all(f_spec, [&](std::size_t r, double v) { out[r].snr_f_db[d] = v; });
            }
            catch (const WindowError &)
            {
            }
        }
    }
    catch (const std::exception &)
    {
        // Realization unusable for this receiver; every entry stays empty.
    }
    return out;
}

std::string format_number(const char *fmt, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string selection_name(Selection s)
{
    return s == Selection::SRake ? "SRake" : "PRake";
}

} // namespace

void SweepConfig::validate() const
{
    if (num_channels < 10)
        throw std::invalid_argument("At least 10 channel realizations are needed for screening.");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw std::invalid_argument("keep_fraction must lie in (0, 1].");
    if (dt_grid.empty())
        throw std::invalid_argument("The timing-offset grid is empty.");
    for (double d : dt_grid)
        if (!(d >= 0.0 && d < 1.0))
            throw std::invalid_argument("Timing offsets must lie in [0, 1) symbol periods.");
    if (rolloffs.empty() || finger_counts.empty() || rates.empty() || receivers.empty())
        throw std::invalid_argument("Roll-off, finger, rate and receiver lists must be nonempty.");
    for (double a : rolloffs)
        PulseConfig{a, system.chip_period}.validate();
    for (int j : finger_counts)
        if (j < 1)
            throw std::invalid_argument("Finger counts must be at least 1.");
    for (double r : rates)
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("Target rates must be positive.");
    if (quad_points < 64 || (quad_points & (quad_points - 1)) != 0)
        throw std::invalid_argument("Quadrature size must be a power of two and at least 64.");
    if (!(solve_tol_db > 0.0))
        throw std::invalid_argument("Solver tolerance must be positive.");
    if (threads < 0)
        throw std::invalid_argument("Thread count cannot be negative.");
    system.validate();
    channel.validate();
}

SweepConfig sweep_preset(const std::string &name)
{
    const RakeSpec s_mrc{8, Selection::SRake, Combining::MRC};
    const RakeSpec p_mrc{8, Selection::PRake, Combining::MRC};
    const RakeSpec p_egc{8, Selection::PRake, Combining::EGC};
    const std::vector<double> alpha_sweep = {0.1, 0.3, 0.5, 0.7, 1.0};
    const std::vector<double> rate_sweep = {0.1, 0.2, 0.3, 0.4, 0.5};
    const std::vector<int> finger_sweep = {2, 4, 8};

    SweepConfig cfg;
    if (name == "fig2")
    {
        cfg.receivers = {s_mrc};
        cfg.rolloffs = alpha_sweep;
    }
    else if (name == "fig3")
    {
        cfg.receivers = {s_mrc};
        cfg.rolloffs = {1.0};
        cfg.finger_counts = finger_sweep;
    }
    else if (name == "fig4")
    {
        cfg.receivers = {s_mrc};
        cfg.rates = rate_sweep;
    }
    else if (name == "fig5")
    {
        cfg.receivers = {s_mrc, p_mrc, p_egc};
        cfg.rolloffs = alpha_sweep;
    }
    else if (name == "fig6")
    {
        cfg.receivers = {s_mrc, p_mrc, p_egc};
        cfg.rolloffs = {1.0};
        cfg.finger_counts = finger_sweep;
    }
    else if (name == "fig7")
    {
        cfg.receivers = {s_mrc, p_mrc, p_egc};
        cfg.rates = rate_sweep;
    }
    else
    {
        throw std::invalid_argument("Unknown preset '" + name + "'.");
    }
    return cfg;
}

std::vector<std::string> sweep_preset_names()
{
    return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
}

std::size_t screen_quota(std::size_t n, double keep_fraction)
{
    const double drop = (1.0 - keep_fraction) * static_cast<double>(n);
    // Absorb representation error, e.g. (1 - 0.9) * 10 = 0.9999999999999998.
    return std::min(n, static_cast<std::size_t>(std::ceil(drop - 1e-9)));
}

ScreenResult screen_outcomes(std::span<const ChannelOutcome> outcomes, double keep_fraction)
{
    if (outcomes.size() < 10)
        throw std::invalid_argument("Screening needs at least 10 channel realizations.");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw std::invalid_argument("keep_fraction must lie in (0, 1].");

    std::vector<std::size_t> order(outcomes.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    // Worst first: unsolvable, then highest SNR_h, then larger seed.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
              {
        const auto &oa = outcomes[a];
        const auto &ob = outcomes[b];
        if (oa.snr_h_db.has_value() != ob.snr_h_db.has_value())
            return !oa.snr_h_db.has_value();
        if (oa.snr_h_db && *oa.snr_h_db != *ob.snr_h_db)
            return *oa.snr_h_db > *ob.snr_h_db;
        return oa.seed > ob.seed; });

    ScreenResult res;
    for (const auto &o : outcomes)
        if (!o.snr_h_db)
            ++res.unsolvable;
    res.discarded = std::max(screen_quota(outcomes.size(), keep_fraction), res.unsolvable);
    res.kept.assign(order.begin() + static_cast<std::ptrdiff_t>(res.discarded), order.end());
    std::sort(res.kept.begin(), res.kept.end());
    return res;
}

ScreenedSet screen_channels(std::span<const PathList> realizations, const RakeSpec &receiver, double rolloff,
                            double rate, const SweepConfig &cfg)
{
    SweepConfig local = cfg;
    local.rates = {rate};
    const CellParams cell{receiver, rolloff};

    std::vector<ChannelOutcome> outcomes(realizations.size());
    parallel_for(realizations.size(), cfg.threads, [&](std::size_t i)
                 { outcomes[i] = evaluate_channel(realizations[i], i, cell, local, true).front(); });

    const ScreenResult res = screen_outcomes(outcomes, cfg.keep_fraction);
    ScreenedSet out;
    out.discarded = res.discarded;
    out.unsolvable = res.unsolvable;
    for (std::size_t i : res.kept)
        out.survivors.push_back({i, *outcomes[i].snr_h_db});
    return out;
}

CellAggregate aggregate_cell(std::span<const ChannelOutcome> outcomes, std::span<const double> dt_grid,
                             double keep_fraction, std::span<const ChannelOutcome> screen_on)
{
    if (!screen_on.empty() && screen_on.size() != outcomes.size())
        throw std::invalid_argument("Screening outcomes must match the evaluated outcomes.");
    for (const auto &o : outcomes)
        if (o.snr_f_db.size() != dt_grid.size())
            throw std::invalid_argument("Outcome does not match the timing-offset grid.");

    const ScreenResult screened = screen_outcomes(screen_on.empty() ? outcomes : screen_on, keep_fraction);

    CellAggregate agg;
    agg.n_kept = static_cast<int>(screened.kept.size());
    agg.n_unsolvable = static_cast<int>(screened.unsolvable);

    std::vector<double> snr_h;
    for (std::size_t i : screened.kept)
        if (outcomes[i].snr_h_db)
            snr_h.push_back(*outcomes[i].snr_h_db);
    agg.mean_snr_h_db = stable_mean(snr_h);

    agg.per_dt.resize(dt_grid.size());
    for (std::size_t d = 0; d < dt_grid.size(); ++d)
    {
        std::vector<double> h, f, loss;
        for (std::size_t i : screened.kept)
        {
            const auto &o = outcomes[i];
            if (o.snr_h_db && o.snr_f_db[d])
            {
                h.push_back(*o.snr_h_db);
                f.push_back(*o.snr_f_db[d]);
                loss.push_back(*o.snr_f_db[d] - *o.snr_h_db);
            }
        }
        DtAggregate &row = agg.per_dt[d];
        row.dt_over_ts = dt_grid[d];
        row.n_used = static_cast<int>(loss.size());
        row.n_failed = agg.n_kept - row.n_used;
        row.mean_snr_h_db = stable_mean(std::move(h));
        row.mean_snr_f_db = stable_mean(std::move(f));
        row.mean_loss_db = stable_mean(std::move(loss));
    }

    std::vector<double> worst, avg;
    for (std::size_t i : screened.kept)
    {
        const auto &o = outcomes[i];
        if (!o.snr_h_db)
            continue;
        std::vector<double> loss;
        for (const auto &f : o.snr_f_db)
            if (f)
                loss.push_back(*f - *o.snr_h_db);
        if (loss.size() != dt_grid.size())
            continue;
        worst.push_back(*std::max_element(loss.begin(), loss.end()));
        avg.push_back(stable_mean(std::move(loss)));
    }
    agg.n_used = static_cast<int>(worst.size());
    agg.n_failed = agg.n_kept - agg.n_used;
    agg.worst_loss_db = stable_mean(worst);
    agg.avg_loss_db = stable_mean(avg);
    agg.std_worst_loss_db = stable_std(worst);
    agg.std_avg_loss_db = stable_std(avg);
    return agg;
}

std::vector<PathList> generate_ensemble(const SweepConfig &cfg)
{
    std::vector<PathList> out(static_cast<std::size_t>(cfg.num_channels));
    parallel_for(out.size(), cfg.threads, [&](std::size_t i)
                 {
        PathList pl = flatten(generate(cfg.channel, cfg.base_seed + i));
        out[i] = cfg.normalize_paths ? normalize_energy(pl) : std::move(pl); });
    return out;
}

SweepResult run_sweep(const SweepConfig &cfg, const ProgressFn &progress)
{
    cfg.validate();
    const auto ensemble = generate_ensemble(cfg);
    const std::size_t n_ch = ensemble.size();
    const std::size_t n_rx = cfg.receivers.size();
    const std::size_t n_a = cfg.rolloffs.size();
    const std::size_t n_j = cfg.finger_counts.size();
    const std::size_t n_r = cfg.rates.size();

    // outcomes[((rx * n_a + a) * n_j + j) * n_r + r][channel]
    std::vector<std::vector<ChannelOutcome>> outcomes(n_rx * n_a * n_j * n_r,
                                                      std::vector<ChannelOutcome>(n_ch));
    auto cell_index = [&](std::size_t rx, std::size_t a, std::size_t j, std::size_t r)
    { return ((rx * n_a + a) * n_j + j) * n_r + r; };

    std::size_t group = 0;
    const std::size_t n_groups = n_rx * n_a * n_j;
    for (std::size_t rx = 0; rx < n_rx; ++rx)
        for (std::size_t a = 0; a < n_a; ++a)
            for (std::size_t j = 0; j < n_j; ++j)
            {
                CellParams cell{cfg.receivers[rx], cfg.rolloffs[a]};
                cell.receiver.fingers = cfg.finger_counts[j];
                parallel_for(n_ch, cfg.threads, [&](std::size_t i)
                             {
                    auto per_rate = evaluate_channel(ensemble[i], cfg.base_seed + i, cell, cfg, false);
                    for (std::size_t r = 0; r < n_r; ++r)
                        outcomes[cell_index(rx, a, j, r)][i] = std::move(per_rate[r]); });
                ++group;
                if (progress)
                {
                    progress("[" + std::to_string(group) + "/" + std::to_string(n_groups) + "] " +
                             cell.receiver.id() + " rolloff=" + format_number("%g", cell.rolloff) +
                             " fingers=" + std::to_string(cell.receiver.fingers));
                }
            }

    SweepResult result;
    for (const auto &cell : outcomes)
        for (const auto &o : cell)
            for (const auto &f : o.snr_f_db)
                if (!f)
                    ++result.failed_evaluations;

    for (std::size_t rx = 0; rx < n_rx; ++rx)
        for (std::size_t a = 0; a < n_a; ++a)
            for (std::size_t j = 0; j < n_j; ++j)
                for (std::size_t r = 0; r < n_r; ++r)
                {
                    const auto &cell_outcomes = outcomes[cell_index(rx, a, j, r)];
                    std::span<const ChannelOutcome> screen_on;
                    if (cfg.global_screening)
                        screen_on = outcomes[cell_index(0, a, j, r)];
                    SummaryRow summary;
                    summary.receiver = cfg.receivers[rx];
                    summary.receiver.fingers = cfg.finger_counts[j];
                    summary.rolloff = cfg.rolloffs[a];
                    summary.fingers = cfg.finger_counts[j];
                    summary.rate = cfg.rates[r];
                    summary.cell = aggregate_cell(cell_outcomes, cfg.dt_grid, cfg.keep_fraction, screen_on);

                    for (const auto &d : summary.cell.per_dt)
                    {
                        DegradationRow row;
                        row.receiver = summary.receiver;
                        row.rolloff = summary.rolloff;
                        row.fingers = summary.fingers;
                        row.rate = summary.rate;
                        row.dt_over_ts = d.dt_over_ts;
                        row.mean_snr_h_db = d.mean_snr_h_db;
                        row.mean_snr_f_db = d.mean_snr_f_db;
                        row.mean_loss_db = d.mean_loss_db;
                        row.worst_loss_db = summary.cell.worst_loss_db;
                        row.avg_loss_db = summary.cell.avg_loss_db;
                        row.n_used = d.n_used;
                        row.n_failed = d.n_failed;
                        result.rows.push_back(row);
                    }
                    result.summary.push_back(std::move(summary));
                }
    return result;
}

void write_results_csv(std::ostream &os, std::span<const DegradationRow> rows)
{
    os << "receiver,selection,combining,rolloff,fingers,rate_target,dt_over_ts,mean_snr_h_db,mean_snr_f_db,"
          "mean_L_db,worst_L_db,avg_L_db,n_used,n_failed\n";
    for (const auto &r : rows)
    {
        os << r.receiver.id() << ',' << selection_name(r.receiver.selection) << ','
           << to_string(r.receiver.combining) << ',' << format_number("%g", r.rolloff) << ',' << r.fingers << ','
           << format_number("%g", r.rate) << ',' << format_number("%g", r.dt_over_ts) << ','
           << format_number("%.6f", r.mean_snr_h_db) << ',' << format_number("%.6f", r.mean_snr_f_db) << ','
           << format_number("%.6f", r.mean_loss_db) << ',' << format_number("%.6f", r.worst_loss_db) << ','
           << format_number("%.6f", r.avg_loss_db) << ',' << r.n_used << ',' << r.n_failed << '\n';
    }
}

void write_summary_csv(std::ostream &os, std::span<const SummaryRow> rows)
{
    os << "receiver,selection,combining,rolloff,fingers,rate_target,mean_snr_h_db,worst_L_db,avg_L_db,"
          "std_worst_L_db,std_avg_L_db,n_kept,n_used,n_failed,n_unsolvable\n";
    for (const auto &r : rows)
    {
        const auto &c = r.cell;
        os << r.receiver.id() << ',' << selection_name(r.receiver.selection) << ','
           << to_string(r.receiver.combining) << ',' << format_number("%g", r.rolloff) << ',' << r.fingers << ','
           << format_number("%g", r.rate) << ',' << format_number("%.6f", c.mean_snr_h_db) << ','
           << format_number("%.6f", c.worst_loss_db) << ',' << format_number("%.6f", c.avg_loss_db) << ','
           << format_number("%.6f", c.std_worst_loss_db) << ',' << format_number("%.6f", c.std_avg_loss_db) << ','
           << c.n_kept << ',' << c.n_used << ',' << c.n_failed << ',' << c.n_unsolvable << '\n';
    }
}

} // namespace uwbrake
