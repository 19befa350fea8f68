// Rake finger selection (selective / partial) and combining weights (MRC / EGC).

#ifndef UWBRAKE_RAKE_HPP
#define UWBRAKE_RAKE_HPP

#include "uwbrake/channel_model.hpp"

#include <span>
#include <string>
#include <vector>

namespace uwbrake
{

enum class Selection
{
    SRake,  // J strongest paths
    PRake,  // J earliest paths
};

enum class Combining
{
    MRC,
    EGC,
};

struct RakeSpec
{
    int fingers = 1;
    Selection selection = Selection::SRake;
    Combining combining = Combining::MRC;

    void validate() const;

    // "S-MRC", "P-EGC", ...
    std::string id() const;

    bool operator==(const RakeSpec &) const = default;
};

// Parses "selection:combining", e.g. "srake:mrc", "P:EGC". Throws std::invalid_argument.
RakeSpec parse_receiver(const std::string &text, int fingers = 1);

std::string to_string(Selection s);
std::string to_string(Combining c);

struct Finger
{
    double delay = 0.0;      // t_j, ns
    double weight = 0.0;     // w_j after normalization
    double raw_weight = 0.0; // w_j before normalization
    double amplitude = 0.0;  // amplitude of the selected path
};

struct RakeFingers
{
    std::vector<Finger> entries;  // strictly increasing delay
    bool normalized = false;
    bool truncated = false;       // fewer paths than requested fingers

    double captured_energy() const;
};

// Paths sharing a delay are merged before selection so that finger delays
// are strictly increasing. Throws std::invalid_argument on an empty path list.
RakeFingers select_fingers(std::span<const Path> paths, const RakeSpec &spec);

} // namespace uwbrake

#endif
