#include "uwbrake/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace uwbrake;

namespace
{

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "uwbrake");
    std::vector<char *> argv;
    for (auto &a : args)
        argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string &name)
{
    const auto dir = fs::temp_directory_path() / ("uwbrake_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

const std::vector<std::string> small_sweep = {"sweep", "--channels", "10", "--dt-grid", "0,0.5", "--quiet"};

} // namespace

TEST_CASE("sweep writes results, summary and a replayable manifest")
{
    const auto dir = scratch("sweep");
    auto args = small_sweep;
    args.insert(args.end(), {"--seed", "7", "--rolloff", "0.3", "--rolloff", "1.0", "--out", dir.string()});
    const auto r = run(args);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "manifest.txt"));
    const auto manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("base_seed = 7") != std::string::npos);
    CHECK(manifest.find("rolloffs = 0.29999999999999999,1") != std::string::npos);
    CHECK(manifest.find("manifest.started = ") != std::string::npos);

    const auto again = scratch("sweep_again");
    args.back() = again.string();
    REQUIRE(run(args).code == 0);
    CHECK(slurp(dir / "results.csv") == slurp(again / "results.csv"));
    CHECK(slurp(dir / "summary.csv") == slurp(again / "summary.csv"));

    const auto replay = scratch("sweep_replay");
    REQUIRE(run({"sweep", "--config", (dir / "manifest.txt").string(), "--quiet", "--out", replay.string()}).code == 0);
    CHECK(slurp(dir / "results.csv") == slurp(replay / "results.csv"));
}

TEST_CASE("invalid sweep flags are usage errors and write nothing")
{
    const auto dir = scratch("bad");
    for (const auto &bad : std::vector<std::vector<std::string>>{{"--rolloff", "1.5"},
                                                                 {"--receiver", "zrake:mrc"},
                                                                 {"--dt-grid", "0,1.2"},
                                                                 {"--keep-fraction", "0"},
                                                                 {"--quad-points", "100"},
                                                                 {"--preset", "fig42"},
                                                                 {"--cm", "7"},
                                                                 {"--bogus"}})
    {
        auto args = small_sweep;
        args.insert(args.end(), bad.begin(), bad.end());
        args.insert(args.end(), {"--out", dir.string()});
        const auto r = run(args);
        CHECK(r.code == cli::exit_usage);
        CHECK_FALSE(fs::exists(dir));
    }
}

TEST_CASE("config file values are overridden by flags")
{
    const auto dir = scratch("config");
    fs::create_directories(dir);
    std::ofstream(dir / "run.cfg") << "# comment\nnum_channels = 10\nrates = 0.2\ndt_grid = 0, 0.5\nrolloffs = 0.5\n";
    const auto out = dir / "out";
    REQUIRE(run({"sweep", "--config", (dir / "run.cfg").string(), "--rolloff", "0.7", "--quiet", "--out",
                 out.string()})
                .code == 0);
    const auto manifest = slurp(out / "manifest.txt");
    CHECK(manifest.find("rolloffs = 0.69999999999999996") != std::string::npos);
    CHECK(manifest.find("rates = 0.20000000000000001") != std::string::npos);

    std::ofstream(dir / "bad.cfg") << "unknown_key = 3\n";
    CHECK(run({"sweep", "--config", (dir / "bad.cfg").string(), "--out", out.string()}).code == cli::exit_usage);
    CHECK(run({"sweep", "--config", (dir / "missing.cfg").string(), "--out", out.string()}).code == cli::exit_io);
}

TEST_CASE("config text round-trips")
{
    SweepConfig cfg = sweep_preset("fig7");
    cfg.base_seed = 99;
    cfg.global_screening = true;
    SweepConfig back;
    cli::apply_config_text(back, cli::config_to_text(cfg));
    CHECK(cli::config_to_text(back) == cli::config_to_text(cfg));
    REQUIRE(back.receivers.size() == cfg.receivers.size());
    for (std::size_t i = 0; i < cfg.receivers.size(); ++i)
        CHECK(back.receivers[i].id() == cfg.receivers[i].id());
}

TEST_CASE("verify runs every group, honours --only and fails under an injected fault")
{
    const auto all = run({"verify"});
    CHECK(all.code == 0);
    CHECK(all.out.find("FAIL") == std::string::npos);
    CHECK(all.out.find("12/12 checks passed") != std::string::npos);

    const auto only = run({"verify", "--only", "capacity"});
    CHECK(only.code == 0);
    CHECK(only.out.find("invariance") == std::string::npos);
    CHECK(only.out.find("3/3 checks passed") != std::string::npos);

    const auto faulty = run({"verify", "--only", "capacity", "--inject-fault", "capacity"});
    CHECK(faulty.code == cli::exit_failure);
    CHECK(faulty.out.find("FAIL") != std::string::npos);

    CHECK(run({"verify", "--only", "nonsense"}).code == cli::exit_usage);
}

TEST_CASE("channels dumps a deterministic CSV")
{
    const auto a = run({"channels", "--cm", "1", "--count", "10", "--seed", "3"});
    const auto b = run({"channels", "--cm", "1", "--count", "10", "--seed", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("seed,path_index,delay_ns,amplitude\n", 0) == 0);
    CHECK(a.out.find("\n12,") != std::string::npos);
    CHECK(a.out.find("\n13,") == std::string::npos);

    const auto dir = scratch("channels");
    fs::create_directories(dir);
    REQUIRE(run({"channels", "--count", "10", "--seed", "3", "--cm", "1", "--out", (dir / "c.csv").string()}).code ==
            0);
    CHECK(slurp(dir / "c.csv") == a.out);

    CHECK(run({"channels", "--cm", "5"}).code == cli::exit_usage);
    CHECK(run({"channels", "--out", (dir / "no" / "such" / "dir.csv").string()}).code == cli::exit_io);
}

TEST_CASE("help documents units and unknown commands are usage errors")
{
    const auto help = run({"sweep", "--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("ns") != std::string::npos);
    CHECK(help.out.find("dB") != std::string::npos);
    CHECK(help.out.find("bits/symbol") != std::string::npos);
    CHECK(run({}).code == cli::exit_usage);
    CHECK(run({"plot"}).code == cli::exit_usage);
}
