#ifndef SPINPORT_RUNNER_HPP
#define SPINPORT_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "spinport/scenario.hpp"

namespace spinport {

// Subcommand pipelines shared by the CLI and the test suites. Configuration
// problems are thrown (ScenarioError / std::invalid_argument) and map to
// exit code 2 at the CLI; a failed statistical comparison returns exit
// code 3 through RunOutput.

struct CommonOptions {
    std::optional<std::uint64_t> seed_override;
    bool raw_spin = false;                 ///< report J-unit moments instead of normalized
    std::optional<std::string> dump_path;  ///< mc only: raw trajectory CSV destination
};

struct RunOutput {
    int exit_code = 0;
    std::string text; ///< human-readable report
    std::string csv;  ///< machine-readable table (12 significant digits, LF)
};

RunOutput run_analytic(const ScenarioConfig& cfg, const CommonOptions& opts = {});
RunOutput run_mc(const ScenarioConfig& cfg, const CommonOptions& opts = {});
RunOutput run_sweep(const ScenarioConfig& cfg, const CommonOptions& opts = {});
RunOutput run_swap(const ScenarioConfig& cfg, const CommonOptions& opts = {});
RunOutput run_calibrate(const ScenarioConfig& cfg, const CommonOptions& opts = {});

} // namespace spinport

#endif
