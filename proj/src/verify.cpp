#include "uwbrake/cli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uwbrake::cli
{

namespace
{

std::string fmt_err(double e)
{
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << e;
    return os.str();
}

SymbolChannel make_taps(std::vector<double> taps, int first = 0)
{
    SymbolChannel ch;
    ch.taps = std::move(taps);
    ch.first_index = first;
    return ch;
}

struct Checker
{
    std::vector<VerifyCheck> &results;
    const std::string &group;
    double bias;  // added to every measured error when this group is under fault injection

    void expect(const std::string &name, double error, double tol)
    {
        const double e = error + bias;
        results.push_back({group, name, e < tol, "error " + fmt_err(e) + " (tol " + fmt_err(tol) + ")"});
    }
};

void check_capacity(Checker &c)
{
    double worst = 0.0;
    for (double s : {0.01, 0.1, 0.5, 1.0, 3.5, 10.0})
    {
        const double expected = 0.5 * std::log2(1.0 + 2.0 * s);
        worst = std::max(worst, std::abs(capacity(make_taps({1.0}), 10.0 * std::log10(s)) - expected));
    }
    c.expect("flat channel closed form", worst, 1e-9);

    const double a = std::abs(solve_snr(make_taps({1.0}), 0.5) - 10.0 * std::log10(0.5));
    const double b = std::abs(solve_snr(make_taps({1.0}), 1.5) - 10.0 * std::log10(3.5));
    c.expect("flat channel inversion", std::max(a, b), 1e-3);

    // (1/2pi) int log(a + b cos) = log((a + sqrt(a^2 - b^2)) / 2): taps [1, 1] at s = 1 give exactly 1 bit.
    c.expect("two-tap closed form", std::abs(capacity(make_taps({1.0, 1.0}), 0.0) - 1.0), 1e-9);
}

struct Draw
{
    PathList paths;
    RakeFingers fingers;
};

Draw cm1_draw(std::uint64_t seed)
{
    Draw d;
    d.paths = normalize_energy(flatten(generate(channel_preset(1), seed)));
    d.fingers = select_fingers(d.paths, RakeSpec{8, Selection::SRake, Combining::MRC});
    return d;
}

void check_invariance(Checker &c)
{
    const SystemConfig sys;
    const PulseConfig pulse{0.3, sys.chip_period};
    double zero_loss = 0.0, shift_loss = 0.0, scale_change = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const Draw d = cm1_draw(seed);
        const EquivalentChannel ec(d.paths, d.fingers, pulse, sys);
        const SymbolChannel h = ec.taps(0.0);
        zero_loss = std::max(zero_loss, std::abs(degradation(h, ec.taps(0.0), 0.3).loss_db));
        shift_loss = std::max(shift_loss, std::abs(degradation(h, ec.taps(sys.symbol_period()), 0.3).loss_db));

        const SymbolChannel f = ec.taps(0.5 * sys.symbol_period());
        SymbolChannel hs = h, fs = f;
        for (auto &g : hs.taps)
            g *= 7.3;
        for (auto &g : fs.taps)
            g *= 7.3;
        scale_change = std::max(scale_change,
                                std::abs(degradation(hs, fs, 0.3).loss_db - degradation(h, f, 0.3).loss_db));
    }
    c.expect("perfect timing gives zero loss", zero_loss, 2e-4);
    c.expect("integer symbol shift gives zero loss", shift_loss, 1e-3);
    c.expect("common tap scaling leaves loss unchanged", scale_change, 1e-6);

    SymbolChannel padded = make_taps({0.4, -1.0, 0.25});
    const double before = capacity(padded, 3.0);
    padded.taps.insert(padded.taps.end(), 17, 0.0);
    c.expect("zero padding leaves capacity unchanged", std::abs(capacity(padded, 3.0) - before), 1e-12);
}

void check_convergence(Checker &c)
{
    const SystemConfig sys;
    const PulseConfig pulse{0.3, sys.chip_period};
    double worst = 0.0;
    for (std::uint64_t seed = 11; seed <= 15; ++seed)
    {
        const Draw d = cm1_draw(seed);
        const SymbolChannel h = compose_taps(d.paths, d.fingers, pulse, sys, {});
        worst = std::max(worst, std::abs(capacity(h, 0.0, 4096) - capacity(h, 0.0, 16384)));
    }
    c.expect("quadrature 4096 vs 16384 points", worst, 1e-6);
}

void check_channel(Checker &c)
{
    const ChannelParams p = channel_preset(1);
    const double horizon = cluster_horizon(p);
    double cluster_exposure = 0.0, ray_exposure = 0.0;
    std::size_t cluster_gaps = 0, ray_gaps = 0;
    for (std::uint64_t seed = 0; cluster_gaps < 10000; ++seed)
    {
        const auto ch = generate(p, 1000 + seed);
        cluster_exposure += horizon;
        cluster_gaps += ch.clusters.size() - 1;
        for (const auto &cl : ch.clusters)
        {
            ray_exposure += std::max(0.0, ray_horizon(p, cl.arrival));
            ray_gaps += cl.rays.size() - 1;
        }
    }
    // Exposure / events is the censoring-aware mean inter-arrival time.
    const double cluster_mean = cluster_exposure / static_cast<double>(cluster_gaps);
    const double ray_mean = ray_exposure / static_cast<double>(ray_gaps);
    c.expect("mean inter-cluster gap vs 1/Lambda", std::abs(cluster_mean * p.cluster_rate - 1.0), 0.05);
    c.expect("mean inter-ray gap vs 1/lambda", std::abs(ray_mean * p.ray_rate - 1.0), 0.05);
}

void check_pulse(Checker &c)
{
    double worst = 0.0;
    for (double a : {0.25, 0.3, 0.5, 1.0})
    {
        const RaisedCosine p({a, 1.0});
        const double t0 = 1.0 / (2.0 * a);
        worst = std::max(worst, std::abs(p(t0) - 0.5 * (p(t0 + 1e-6) + p(t0 - 1e-6))));
    }
    c.expect("continuity at the singular points", worst, 1e-9);
    c.expect("alpha = 1 limit at T/2", std::abs(RaisedCosine({1.0, 1.0})(0.5) - 0.5), 1e-15);
}

} // namespace

std::vector<std::string> verify_groups()
{
    return {"capacity", "invariance", "convergence", "channel", "pulse"};
}

std::vector<VerifyCheck> run_verify_checks(const std::vector<std::string> &only, const std::string &fault)
{
    std::vector<VerifyCheck> results;
    for (const auto &group : verify_groups())
    {
        if (!only.empty() && std::find(only.begin(), only.end(), group) == only.end())
            continue;
        Checker c{results, group, group == fault ? 1.0 : 0.0};
        if (group == "capacity")
            check_capacity(c);
        else if (group == "invariance")
            check_invariance(c);
        else if (group == "convergence")
            check_convergence(c);
        else if (group == "channel")
            check_channel(c);
        else if (group == "pulse")
            check_pulse(c);
    }
    return results;
}

} // namespace uwbrake::cli
