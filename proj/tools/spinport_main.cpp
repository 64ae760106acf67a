// spinport: collective-spin teleportation simulator.
//
// Subcommands: analytic, mc, sweep, swap, calibrate. Exit codes: 0 success,
// 2 configuration error, 3 statistical-acceptance failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spinport/runner.hpp"
#include "spinport/scenario.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string csv_path;
    std::string dump_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool raw_spin = false;
};

void add_common_flags(CLI::App* cmd, CliArgs& args)
{
    cmd->add_option("--config", args.config_path, "scenario file (key = value lines)")
        ->required();
    cmd->add_option("--csv", args.csv_path, "write the machine-readable table to this path");
    cmd->add_option("--seed", args.seed, "override mc.seed")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_flag("--raw-spin", args.raw_spin,
                  "report raw J-unit moments instead of shot-noise-normalized ones");
}

int run_subcommand(const std::string& name, const CliArgs& args)
{
    spinport::ScenarioConfig cfg = spinport::load_scenario_file(args.config_path);
    spinport::CommonOptions opts;
    if (args.seed_set) {
        opts.seed_override = args.seed;
    }
    opts.raw_spin = args.raw_spin;
    if (!args.dump_path.empty()) {
        opts.dump_path = args.dump_path;
    }

    spinport::RunOutput output;
    if (name == "analytic") {
        output = spinport::run_analytic(cfg, opts);
    } else if (name == "mc") {
        output = spinport::run_mc(cfg, opts);
    } else if (name == "sweep") {
        output = spinport::run_sweep(cfg, opts);
    } else if (name == "swap") {
        output = spinport::run_swap(cfg, opts);
    } else {
        output = spinport::run_calibrate(cfg, opts);
    }

    std::cout << output.text;
    if (!args.csv_path.empty()) {
        std::ofstream csv(args.csv_path, std::ios::binary);
        if (!csv) {
            std::cerr << "error: cannot open csv file '" << args.csv_path << "'\n";
            return 2;
        }
        csv << output.csv;
    }
    return output.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"continuous-variable teleportation of collective atomic spins"};
    app.require_subcommand(1);

    CliArgs args;
    CLI::App* analytic = app.add_subcommand("analytic", "closed-form teleportation report");
    CLI::App* mc = app.add_subcommand("mc", "stochastic-trajectory ensemble vs. closed form");
    CLI::App* sweep = app.add_subcommand("sweep", "closed-form metrics over a parameter grid");
    CLI::App* swap = app.add_subcommand("swap", "entanglement-swapping inseparability");
    CLI::App* calibrate = app.add_subcommand("calibrate", "magnetic feedback field scale");
    for (CLI::App* cmd : {analytic, mc, sweep, swap, calibrate}) {
        add_common_flags(cmd, args);
    }
    mc->add_option("--dump", args.dump_path, "write one CSV record per trajectory to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        app.exit(e);
        return 2;
    }

    try {
        return run_subcommand(app.get_subcommands().front()->get_name(), args);
    } catch (const spinport::ScenarioError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
