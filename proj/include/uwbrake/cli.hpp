// Command-line front end: sweep, verify and channels subcommands.

#ifndef UWBRAKE_CLI_HPP
#define UWBRAKE_CLI_HPP

#include "uwbrake/experiment.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace uwbrake::cli
{

inline constexpr const char *tool_version = "1.0.0";

enum ExitCode : int
{
    exit_ok = 0,
    exit_failure = 1,  // a verification check failed or the run aborted
    exit_usage = 2,    // bad flags or configuration
    exit_io = 3,       // unreadable / unwritable files
};

// Flat "key = value" configuration text mirroring SweepConfig. Lines starting
// with '#' are comments; keys prefixed "manifest." are ignored so a run
// manifest can be fed back as a configuration.
void apply_config_text(SweepConfig &cfg, const std::string &text);
std::string config_to_text(const SweepConfig &cfg);

struct RunManifest
{
    SweepConfig config;
    std::string tool_version;
    std::string started;   // ISO-8601 UTC
    std::string finished;
    std::vector<std::string> outputs;

    std::string to_text() const;
};

// Checks run by `verify`; `fault` names a group whose checks get a
// deliberately perturbed result (test harness only).
struct VerifyCheck
{
    std::string group;
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<std::string> verify_groups();
std::vector<VerifyCheck> run_verify_checks(const std::vector<std::string> &only, const std::string &fault = {});

int cmd_sweep(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int cmd_verify(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
int cmd_channels(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

// Dispatches argv[1] to a subcommand.
int main(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace uwbrake::cli

#endif
