// End-to-end tests that invoke the installed binary, pinning the exit-code
// contract: 0 success, 2 configuration error, 3 statistical failure.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "spinport/csv.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path()
{
#ifdef SPINPORT_CLI_PATH
    return SPINPORT_CLI_PATH;
#else
    return "spinport";
#endif
}

fs::path scratch_dir()
{
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "spinport_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& content)
{
    const auto path = scratch_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args)
{
    const auto out_path = scratch_dir() / "stdout.txt";
    const auto err_path = scratch_dir() / "stderr.txt";
    const std::string command = std::string(cli_path()) + " " + args + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int status = std::system(command.c_str());
    CliResult result;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    }
    return result;
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("help exits cleanly")
{
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("analytic --help").exit_code == 0);
}

TEST_CASE("missing arguments and files are configuration errors")
{
    CHECK(run_cli("analytic").exit_code == 2);
    CHECK(run_cli("analytic --config /does/not/exist").exit_code == 2);
    CHECK(run_cli("frobnicate --config x").exit_code == 2);
}

TEST_CASE("configuration errors carry line numbers to stderr")
{
    const auto cfg = write_file("bad.cfg", "n_atoms = 1e6\nmcc.n_traj = 10\n");
    const auto result = run_cli("analytic --config " + cfg.string());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("line 2") != std::string::npos);
}

TEST_CASE("analytic subcommand writes a round-trippable CSV")
{
    const auto cfg = write_file("analytic.cfg", "squeezing_r = 1\ncooperativity = 100\n");
    const auto csv_path = scratch_dir() / "analytic.csv";
    const auto result =
        run_cli("analytic --config " + cfg.string() + " --csv " + csv_path.string());
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("v_q") != std::string::npos);

    const auto csv = read_file(csv_path);
    const auto lines = spinport::split_lines(csv);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].rfind("g,eta,n_x", 0) == 0);
    for (const auto& field : spinport::split_csv_line(lines[1])) {
        CHECK(spinport::format_sig12(spinport::parse_double_strict(field)) == field);
    }
}

TEST_CASE("mc subcommand is deterministic across thread counts")
{
    const std::string base = "mc.n_traj = 1500\nmc.dt = 0.05\nmc.seed = 4242\n";
    const auto cfg1 = write_file("mc1.cfg", base + "mc.threads = 1\n");
    const auto cfg2 = write_file("mc2.cfg", base + "mc.threads = 3\n");
    const auto csv1 = scratch_dir() / "mc1.csv";
    const auto csv2 = scratch_dir() / "mc2.csv";

    const auto r1 = run_cli("mc --config " + cfg1.string() + " --csv " + csv1.string());
    const auto r2 = run_cli("mc --config " + cfg2.string() + " --csv " + csv2.string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    const auto bytes1 = read_file(csv1);
    CHECK(!bytes1.empty());
    CHECK(bytes1 == read_file(csv2));
}

TEST_CASE("mc dump writes one record per trajectory")
{
    const auto cfg = write_file("mcdump.cfg", "mc.n_traj = 50\nmc.dt = 0.1\nmc.t_max = 5\n");
    const auto dump = scratch_dir() / "traj.csv";
    const auto result = run_cli("mc --config " + cfg.string() + " --dump " + dump.string());
    CHECK(result.exit_code == 0);
    const auto lines = spinport::split_lines(read_file(dump));
    REQUIRE(lines.size() == 51);
    CHECK(lines[0] == "index,x1,y1,x2,y2,x3,y3,x3_out,y3_out");
}

TEST_CASE("a grossly coarse discretization fails the 3-sigma gate with exit 3")
{
    const auto cfg = write_file("coarse.cfg",
                                "cooperativity = 0.1\nsqueezing_r = 0\n"
                                "mc.n_traj = 4000\nmc.dt = 5\nmc.t_max = 10\nmc.seed = 5\n");
    const auto result = run_cli("mc --config " + cfg.string());
    CHECK(result.exit_code == 3);
    CHECK(result.out.find("FAIL") != std::string::npos);
}

TEST_CASE("mc rejects a single-trajectory request")
{
    const auto cfg = write_file("single.cfg", "mc.n_traj = 1\n");
    CHECK(run_cli("mc --config " + cfg.string()).exit_code == 2);
}

TEST_CASE("sweep validates the parameter name")
{
    const auto good = write_file("sweep.cfg",
                                 "sweep.parameter = squeezing_r\nsweep.start = 0\n"
                                 "sweep.stop = 2\nsweep.points = 5\n");
    const auto csv_path = scratch_dir() / "sweep.csv";
    CHECK(run_cli("sweep --config " + good.string() + " --csv " + csv_path.string()).exit_code ==
          0);
    CHECK(spinport::split_lines(read_file(csv_path)).size() == 6);

    const auto bad = write_file("sweep_bad.cfg",
                                "sweep.parameter = phase_of_moon\nsweep.start = 0\n"
                                "sweep.stop = 2\nsweep.points = 5\n");
    const auto result = run_cli("sweep --config " + bad.string());
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("phase_of_moon") != std::string::npos);
}

TEST_CASE("swap and calibrate succeed on the defaults")
{
    const auto cfg = write_file("empty.cfg", "");
    CHECK(run_cli("swap --config " + cfg.string()).exit_code == 0);
    const auto cal = run_cli("calibrate --config " + cfg.string());
    CHECK(cal.exit_code == 0);
    CHECK(cal.out.find("mG") != std::string::npos);
}

TEST_CASE("seed override reproduces and perturbs runs from the command line")
{
    const auto cfg = write_file("seedover.cfg", "mc.n_traj = 800\nmc.dt = 0.1\nmc.t_max = 5\n");
    const auto a = scratch_dir() / "seed_a.csv";
    const auto b = scratch_dir() / "seed_b.csv";
    const auto c = scratch_dir() / "seed_c.csv";
    CHECK(run_cli("mc --config " + cfg.string() + " --seed 7 --csv " + a.string()).exit_code == 0);
    CHECK(run_cli("mc --config " + cfg.string() + " --seed 7 --csv " + b.string()).exit_code == 0);
    CHECK(run_cli("mc --config " + cfg.string() + " --seed 8 --csv " + c.string()).exit_code == 0);
    CHECK(read_file(a) == read_file(b));
    CHECK(read_file(a) != read_file(c));
}
