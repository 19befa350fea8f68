#include "uwbrake/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace uwbrake::cli
{

namespace fs = std::filesystem;

namespace
{

class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

double to_double(const std::string &key, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return x;
    }
    catch (const std::exception &)
    {
        throw UsageError("Config key '" + key + "': '" + v + "' is not a number.");
    }
}

long long to_int(const std::string &key, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return x;
    }
    catch (const std::exception &)
    {
        throw UsageError("Config key '" + key + "': '" + v + "' is not an integer.");
    }
}

bool to_bool(const std::string &key, const std::string &v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw UsageError("Config key '" + key + "': '" + v + "' is not a boolean.");
}

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T, class F>
std::string join(const std::vector<T> &v, F &&f)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (i)
            out += ',';
        out += f(v[i]);
    }
    return out;
}

std::string receiver_token(const RakeSpec &r)
{
    return std::string(r.selection == Selection::SRake ? "srake" : "prake") + ":" +
           (r.combining == Combining::MRC ? "mrc" : "egc");
}

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

// Writes through a temporary sibling and renames into place.
void write_atomically(const fs::path &path, const std::string &content)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw IoError("Cannot open '" + tmp.string() + "' for writing.");
        os << content;
        os.flush();
        if (!os)
            throw IoError("Failed writing '" + tmp.string() + "'.");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw IoError("Cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

std::string read_file(const std::string &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("Cannot read '" + path + "'.");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// CLI11 consumes arguments in reverse order.
int parse_args(CLI::App &app, const std::vector<std::string> &args, std::ostream &out, std::ostream &err,
               bool &done)
{
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    done = false;
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &e)
    {
        done = true;
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError &e)
    {
        done = true;
        app.exit(e, out, err);
        return exit_usage;
    }
    return exit_ok;
}

const char *units_note = "Units: delays and chip period in ns, Es/N0 in dB, rates in bits/symbol, "
                         "timing offsets as fractions of the symbol period T_s = N * T_c.";

} // namespace

void apply_config_text(SweepConfig &cfg, const std::string &text)
{
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("Config line " + std::to_string(lineno) + ": expected key = value.");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("manifest.", 0) == 0)
            continue;

        auto doubles = [&]
        {
            std::vector<double> v;
            for (const auto &s : split_list(value))
                v.push_back(to_double(key, s));
            return v;
        };

        if (key == "num_channels")
            cfg.num_channels = static_cast<int>(to_int(key, value));
        else if (key == "keep_fraction")
            cfg.keep_fraction = to_double(key, value);
        else if (key == "dt_grid")
            cfg.dt_grid = doubles();
        else if (key == "rolloffs")
            cfg.rolloffs = doubles();
        else if (key == "finger_counts")
        {
            cfg.finger_counts.clear();
            for (const auto &s : split_list(value))
                cfg.finger_counts.push_back(static_cast<int>(to_int(key, s)));
        }
        else if (key == "rates")
            cfg.rates = doubles();
        else if (key == "receivers")
        {
            cfg.receivers.clear();
            for (const auto &s : split_list(value))
            {
                try
                {
                    cfg.receivers.push_back(parse_receiver(s));
                }
                catch (const std::invalid_argument &e)
                {
                    throw UsageError(e.what());
                }
            }
        }
        else if (key == "base_seed")
        {
            try
            {
                cfg.base_seed = std::stoull(value);
            }
            catch (const std::exception &)
            {
                throw UsageError("Config key 'base_seed': '" + value + "' is not an unsigned integer.");
            }
        }
        else if (key == "chip_period")
            cfg.system.chip_period = to_double(key, value);
        else if (key == "spread_length")
            cfg.system.spread_length = static_cast<int>(to_int(key, value));
        else if (key == "channel_model")
        {
            const auto cm = static_cast<int>(to_int(key, value));
            try
            {
                cfg.channel = channel_preset(cm);
            }
            catch (const std::invalid_argument &e)
            {
                throw UsageError(e.what());
            }
            cfg.channel_model = cm;
        }
        else if (key == "cluster_rate")
            cfg.channel.cluster_rate = to_double(key, value);
        else if (key == "ray_rate")
            cfg.channel.ray_rate = to_double(key, value);
        else if (key == "cluster_decay")
            cfg.channel.cluster_decay = to_double(key, value);
        else if (key == "ray_decay")
            cfg.channel.ray_decay = to_double(key, value);
        else if (key == "cluster_fade_std")
            cfg.channel.cluster_fade_std = to_double(key, value);
        else if (key == "ray_fade_std")
            cfg.channel.ray_fade_std = to_double(key, value);
        else if (key == "shadow_std")
            cfg.channel.shadow_std = to_double(key, value);
        else if (key == "max_excess_delay")
            cfg.channel.max_excess_delay = to_double(key, value);
        else if (key == "power_floor")
            cfg.channel.power_floor = to_double(key, value);
        else if (key == "quad_points")
            cfg.quad_points = static_cast<int>(to_int(key, value));
        else if (key == "solve_tol_db")
            cfg.solve_tol_db = to_double(key, value);
        else if (key == "normalize_paths")
            cfg.normalize_paths = to_bool(key, value);
        else if (key == "global_screening")
            cfg.global_screening = to_bool(key, value);
        else if (key == "threads")
            cfg.threads = static_cast<int>(to_int(key, value));
        else
            throw UsageError("Unknown config key '" + key + "' on line " + std::to_string(lineno) + ".");
    }
}

std::string config_to_text(const SweepConfig &cfg)
{
    std::ostringstream os;
    os << "num_channels = " << cfg.num_channels << '\n'
       << "keep_fraction = " << num(cfg.keep_fraction) << '\n'
       << "dt_grid = " << join(cfg.dt_grid, num) << '\n'
       << "rolloffs = " << join(cfg.rolloffs, num) << '\n'
       << "finger_counts = " << join(cfg.finger_counts, [](int j) { return std::to_string(j); }) << '\n'
       << "rates = " << join(cfg.rates, num) << '\n'
       << "receivers = " << join(cfg.receivers, receiver_token) << '\n'
       << "base_seed = " << cfg.base_seed << '\n'
       << "chip_period = " << num(cfg.system.chip_period) << '\n'
       << "spread_length = " << cfg.system.spread_length << '\n'
       << "channel_model = " << cfg.channel_model << '\n'
       << "cluster_rate = " << num(cfg.channel.cluster_rate) << '\n'
       << "ray_rate = " << num(cfg.channel.ray_rate) << '\n'
       << "cluster_decay = " << num(cfg.channel.cluster_decay) << '\n'
       << "ray_decay = " << num(cfg.channel.ray_decay) << '\n'
       << "cluster_fade_std = " << num(cfg.channel.cluster_fade_std) << '\n'
       << "ray_fade_std = " << num(cfg.channel.ray_fade_std) << '\n'
       << "shadow_std = " << num(cfg.channel.shadow_std) << '\n'
       << "max_excess_delay = " << num(cfg.channel.max_excess_delay) << '\n'
       << "power_floor = " << num(cfg.channel.power_floor) << '\n'
       << "quad_points = " << cfg.quad_points << '\n'
       << "solve_tol_db = " << num(cfg.solve_tol_db) << '\n'
       << "normalize_paths = " << (cfg.normalize_paths ? "true" : "false") << '\n'
       << "global_screening = " << (cfg.global_screening ? "true" : "false") << '\n'
       << "threads = " << cfg.threads << '\n';
    return os.str();
}

std::string RunManifest::to_text() const
{
    std::ostringstream os;
    os << "# Run manifest. Replay with: uwbrake sweep --config <this file> --out <dir>\n"
       << "manifest.tool_version = " << tool_version << '\n'
       << "manifest.started = " << started << '\n'
       << "manifest.finished = " << finished << '\n'
       << "manifest.outputs = " << join(outputs, [](const std::string &s) { return s; }) << '\n'
       << config_to_text(config);
    return os.str();
}

int cmd_sweep(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{std::string("Run a mistiming-loss sweep and write results.csv, summary.csv and manifest.txt.\n") +
                 units_note};
    app.name("uwbrake sweep");

    std::string preset, config_path, out_dir = "results", dt_grid, cm_text;
    int channels = 0, quad_points = 0, threads = 1;
    unsigned long long seed = 0;
    double keep_fraction = 0.0;
    std::vector<double> rolloffs, rates;
    std::vector<int> fingers;
    std::vector<std::string> receivers;
    bool global_screening = false, no_normalize = false, quiet = false;

    auto *o_preset = app.add_option("--preset", preset, "Named parameter set: fig2 .. fig7");
    auto *o_config = app.add_option("--config", config_path, "key = value configuration file (flags override it)");
    auto *o_channels = app.add_option("--channels", channels, "Number of channel realizations (default 1000)");
    auto *o_seed = app.add_option("--seed", seed, "Base seed; realization i uses seed + i");
    auto *o_rolloff = app.add_option("--rolloff", rolloffs, "Raised-cosine roll-off in [0, 1] (repeatable)");
    auto *o_fingers = app.add_option("--fingers", fingers, "Rake finger count J (repeatable)");
    auto *o_rate = app.add_option("--rate", rates, "Target rate in bits/symbol (repeatable)");
    auto *o_receiver = app.add_option("--receiver", receivers, "selection:combining, e.g. srake:mrc, prake:egc (repeatable)");
    auto *o_dt = app.add_option("--dt-grid", dt_grid, "Comma-separated timing offsets in units of T_s, each in [0, 1)");
    auto *o_keep = app.add_option("--keep-fraction", keep_fraction, "Fraction of best channels kept (0, 1]");
    auto *o_quad = app.add_option("--quad-points", quad_points, "Rate-integral quadrature points (power of two >= 64)");
    auto *o_threads = app.add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it");
    auto *o_cm = app.add_option("--cm", cm_text, "Channel model CM1..CM4 (default 1)");
    app.add_flag("--global-screening", global_screening, "Screen channels on the first receiver's ranking for all receivers");
    app.add_flag("--no-normalize", no_normalize, "Skip per-realization path energy normalization");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--quiet", quiet, "No progress lines on stderr");

    bool done = false;
    if (const int rc = parse_args(app, args, out, err, done); done)
        return rc;

    SweepConfig cfg;
    try
    {
        if (o_preset->count())
            cfg = sweep_preset(preset);
        if (o_config->count())
            apply_config_text(cfg, read_file(config_path));
        if (o_cm->count())
        {
            const int cm = static_cast<int>(to_int("--cm", cm_text));
            cfg.channel = channel_preset(cm);
            cfg.channel_model = cm;
        }
        if (o_channels->count())
            cfg.num_channels = channels;
        if (o_seed->count())
            cfg.base_seed = seed;
        if (o_rolloff->count())
            cfg.rolloffs = rolloffs;
        if (o_fingers->count())
            cfg.finger_counts = fingers;
        if (o_rate->count())
            cfg.rates = rates;
        if (o_receiver->count())
        {
            cfg.receivers.clear();
            for (const auto &r : receivers)
                cfg.receivers.push_back(parse_receiver(r));
        }
        if (o_dt->count())
        {
            cfg.dt_grid.clear();
            for (const auto &s : split_list(dt_grid))
                cfg.dt_grid.push_back(to_double("--dt-grid", s));
        }
        if (o_keep->count())
            cfg.keep_fraction = keep_fraction;
        if (o_quad->count())
            cfg.quad_points = quad_points;
        if (o_threads->count())
            cfg.threads = threads;
        if (global_screening)
            cfg.global_screening = true;
        if (no_normalize)
            cfg.normalize_paths = false;
        cfg.validate();
    }
    catch (const IoError &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_io;
    }
    catch (const std::exception &e)
    {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    RunManifest manifest;
    manifest.config = cfg;
    manifest.tool_version = tool_version;
    manifest.started = utc_now();

    SweepResult result;
    try
    {
        ProgressFn progress;
        if (!quiet)
            progress = [&err](const std::string &line) { err << line << '\n'; };
        result = run_sweep(cfg, progress);
    }
    catch (const std::exception &e)
    {
        err << "error: sweep failed: " << e.what() << '\n';
        return exit_failure;
    }
    manifest.finished = utc_now();

    try
    {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec)
            throw IoError("Cannot create output directory '" + out_dir + "': " + ec.message());

        const fs::path dir(out_dir);
        std::ostringstream results_csv, summary_csv;
        write_results_csv(results_csv, result.rows);
        write_summary_csv(summary_csv, result.summary);
        write_atomically(dir / "results.csv", results_csv.str());
        write_atomically(dir / "summary.csv", summary_csv.str());
        manifest.outputs = {(dir / "results.csv").string(), (dir / "summary.csv").string()};
        write_atomically(dir / "manifest.txt", manifest.to_text());
    }
    catch (const IoError &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_io;
    }

    if (result.failed_evaluations > 0)
        err << "warning: " << result.failed_evaluations << " (channel, offset) evaluations had no solution\n";
    out << "wrote " << result.rows.size() << " rows to " << (fs::path(out_dir) / "results.csv").string() << '\n';
    return exit_ok;
}

int cmd_verify(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Run the built-in closed-form, invariance, convergence and channel-statistics checks."};
    app.name("uwbrake verify");
    std::vector<std::string> only;
    std::string fault;
    app.add_option("--only", only, "Restrict to check groups (repeatable): capacity, invariance, convergence, channel, pulse");
    app.add_option("--inject-fault", fault, "Perturb one group's results (test harness)")->group("");

    bool done = false;
    if (const int rc = parse_args(app, args, out, err, done); done)
        return rc;

    const auto groups = verify_groups();
    for (const auto &g : only)
    {
        if (std::find(groups.begin(), groups.end(), g) == groups.end())
        {
            err << "usage error: unknown check group '" << g << "'\n";
            return exit_usage;
        }
    }

    std::vector<VerifyCheck> checks;
    try
    {
        checks = run_verify_checks(only, fault);
    }
    catch (const std::exception &e)
    {
        err << "error: verification aborted: " << e.what() << '\n';
        return exit_failure;
    }

    int failed = 0;
    for (const auto &c : checks)
    {
        out << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(12) << c.group << std::setw(44) << c.name
            << c.detail << '\n';
        if (!c.passed)
            ++failed;
    }
    out << checks.size() - failed << '/' << checks.size() << " checks passed\n";
    return failed == 0 ? exit_ok : exit_failure;
}

int cmd_channels(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{std::string("Dump channel realizations as CSV (seed,path_index,delay_ns,amplitude).\n") + units_note};
    app.name("uwbrake channels");
    int cm = 1, count = 1;
    unsigned long long seed = 1;
    std::string out_path;
    app.add_option("--cm", cm, "Channel model CM1..CM4")->capture_default_str();
    app.add_option("--count", count, "Number of realizations")->capture_default_str();
    app.add_option("--seed", seed, "Base seed; realization i uses seed + i")->capture_default_str();
    app.add_option("--out", out_path, "Output CSV file (default: stdout)");

    bool done = false;
    if (const int rc = parse_args(app, args, out, err, done); done)
        return rc;

    ChannelParams params;
    try
    {
        params = channel_preset(cm);
        if (count < 1)
            throw std::invalid_argument("--count must be at least 1.");
    }
    catch (const std::exception &e)
    {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    std::ostringstream csv;
    write_channel_csv_header(csv);
    for (int i = 0; i < count; ++i)
        write_channel_csv(csv, generate(params, seed + static_cast<unsigned long long>(i)));

    if (out_path.empty())
    {
        out << csv.str();
        return exit_ok;
    }
    try
    {
        write_atomically(out_path, csv.str());
    }
    catch (const IoError &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_io;
    }
    return exit_ok;
}

int main(int argc, char **argv, std::ostream &out, std::ostream &err)
{
    const std::string usage = std::string("usage: uwbrake <sweep|verify|channels> [options]\n"
                                          "       uwbrake <command> --help\n") +
                              units_note + "\n";
    if (argc < 2)
    {
        err << usage;
        return exit_usage;
    }
    const std::string cmd = argv[1];
    const std::vector<std::string> args(argv + 2, argv + argc);
    if (cmd == "sweep")
        return cmd_sweep(args, out, err);
    if (cmd == "verify")
        return cmd_verify(args, out, err);
    if (cmd == "channels")
        return cmd_channels(args, out, err);
    if (cmd == "--help" || cmd == "-h" || cmd == "help")
    {
        out << usage;
        return exit_ok;
    }
    if (cmd == "--version")
    {
        out << "uwbrake " << tool_version << '\n';
        return exit_ok;
    }
    err << "unknown command '" << cmd << "'\n" << usage;
    return exit_usage;
}

} // namespace uwbrake::cli
