#ifndef SPINPORT_SCENARIO_HPP
#define SPINPORT_SCENARIO_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "spinport/core_model.hpp"
#include "spinport/montecarlo.hpp"

namespace spinport {

// Scenario files are flat "key = value" lines with dotted section prefixes:
//
//   # physical parameters
//   n_atoms       = 1e6
//   cooperativity = 100        # "inf" models the lossless limit
//   gamma0_hz     = 225e3      # gamma0 / 2pi; converted to rad/s internally
//   squeezing_r   = 1.0
//   gain_g        = 1.0
//   input.mean_x  = 0.0
//   mc.n_traj     = 100000
//   sweep.parameter = squeezing_r
//   swap.r01      = 1.0
//   calibration.gyromagnetic_hz_per_gauss = 450e3
//
// Unknown keys, malformed numbers, duplicates and physicality violations are
// reported with the offending line number.

/// Configuration error carrying a 1-based line number (0 when not tied to a
/// specific line).
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

struct SweepBlock {
    std::string parameter; // squeezing_r | cooperativity | gain_g
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
};

struct SwapBlock {
    double r01 = 1.0;
    double r23 = 1.0;
};

struct ScenarioConfig {
    ProtocolParams params;    // params.gamma0 holds 2*pi*gamma0_hz
    double gamma0_hz = 225e3; // as configured
    GaussianSpinState input;  // defaults to the coherent state at the origin
    TrajectoryConfig mc;
    std::optional<SweepBlock> sweep;
    SwapBlock swap;
    double gyromagnetic_hz_per_gauss = 450e3;
};

ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

} // namespace spinport

#endif
