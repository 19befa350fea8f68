#include "uwbrake/rake.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace uwbrake
{

void RakeSpec::validate() const
{
    if (fingers < 1)
        throw std::invalid_argument("A Rake receiver needs at least one finger.");
}

std::string to_string(Selection s)
{
    return s == Selection::SRake ? "S" : "P";
}

std::string to_string(Combining c)
{
    return c == Combining::MRC ? "MRC" : "EGC";
}

std::string RakeSpec::id() const
{
    return to_string(selection) + "-" + to_string(combining);
}

RakeSpec parse_receiver(const std::string &text, int fingers)
{
    std::string lower;
    for (char ch : text)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));

    const auto colon = lower.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("Receiver must have the form selection:combining, got '" + text + "'.");
    const std::string sel = lower.substr(0, colon);
    const std::string comb = lower.substr(colon + 1);

    RakeSpec spec;
    spec.fingers = fingers;
    if (sel == "s" || sel == "srake" || sel == "s-rake")
        spec.selection = Selection::SRake;
    else if (sel == "p" || sel == "prake" || sel == "p-rake")
        spec.selection = Selection::PRake;
    else
        throw std::invalid_argument("Unknown finger selection '" + sel + "', expected srake or prake.");

    if (comb == "mrc")
        spec.combining = Combining::MRC;
    else if (comb == "egc")
        spec.combining = Combining::EGC;
    else
        throw std::invalid_argument("Unknown combining rule '" + comb + "', expected mrc or egc.");
    return spec;
}

double RakeFingers::captured_energy() const
{
    double e = 0.0;
    for (const auto &f : entries)
        e += f.amplitude * f.amplitude;
    return e;
}

RakeFingers select_fingers(std::span<const Path> paths, const RakeSpec &spec)
{
    spec.validate();
    if (paths.empty())
        throw std::invalid_argument("Cannot select Rake fingers from an empty path list.");

    // Delay-sorted, coincident delays merged.
    std::vector<Path> merged(paths.begin(), paths.end());
    std::stable_sort(merged.begin(), merged.end(), [](const Path &a, const Path &b) { return a.delay < b.delay; });
    std::size_t w = 0;
    for (std::size_t r = 1; r < merged.size(); ++r)
    {
        if (merged[r].delay == merged[w].delay)
            merged[w].amplitude += merged[r].amplitude;
        else
            merged[++w] = merged[r];
    }
    merged.resize(w + 1);

    const auto requested = static_cast<std::size_t>(spec.fingers);
    const std::size_t count = std::min(requested, merged.size());

    std::vector<std::size_t> order(merged.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    if (spec.selection == Selection::SRake)
    {
        // Strongest first; equal magnitudes resolved toward the earlier path.
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         { return std::abs(merged[a].amplitude) > std::abs(merged[b].amplitude); });
    }
    order.resize(count);
    std::sort(order.begin(), order.end());

    RakeFingers out;
    out.truncated = requested > merged.size();
    out.entries.reserve(count);
    double norm2 = 0.0;
    for (std::size_t idx : order)
    {
        const Path &p = merged[idx];
        Finger f;
        f.delay = p.delay;
        f.amplitude = p.amplitude;
        if (spec.combining == Combining::MRC)
            f.raw_weight = p.amplitude;
        else
            f.raw_weight = p.amplitude > 0.0 ? 1.0 : (p.amplitude < 0.0 ? -1.0 : 0.0);
        norm2 += f.raw_weight * f.raw_weight;
        out.entries.push_back(f);
    }

    if (!(norm2 > 0.0))
        throw std::invalid_argument("Selected Rake fingers have all-zero combining weights.");
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto &f : out.entries)
        f.weight = f.raw_weight * scale;
    out.normalized = true;
    return out;
}

} // namespace uwbrake
