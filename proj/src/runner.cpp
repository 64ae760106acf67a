#include "spinport/runner.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "spinport/csv.hpp"
#include "spinport/montecarlo.hpp"
#include "spinport/protocol.hpp"
#include "spinport/readout.hpp"

namespace spinport {

namespace {

std::string show(double v)
{
    return format_sig12(v);
}

// Scale factors for --raw-spin output. Normalized means multiply by
// sqrt(N/4), variance-like quantities by N/4.
struct UnitScale {
    double mean = 1.0;
    double var = 1.0;
};

UnitScale unit_scale(const ScenarioConfig& cfg, const CommonOptions& opts)
{
    if (!opts.raw_spin) {
        return {};
    }
    return {std::sqrt(cfg.params.n_atoms / 4.0), cfg.params.n_atoms / 4.0};
}

double nan_value()
{
    return std::numeric_limits<double>::quiet_NaN();
}

void append_warnings(std::ostringstream& out, const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings) {
        out << "warning: " << w << "\n";
    }
}

} // namespace

RunOutput run_analytic(const ScenarioConfig& cfg, const CommonOptions& opts)
{
    const auto report = teleport_moments(cfg.params, cfg.input);
    const auto scale = unit_scale(cfg, opts);
    const double fid = report.fidelity_coherent.value_or(nan_value());

    std::ostringstream text;
    append_warnings(text, validate_small_tilt(cfg.input, cfg.params.n_atoms));
    text << "analytic teleportation\n"
         << "  g           = " << show(report.params.gain_g) << "\n"
         << "  eta         = " << show(report.eta) << "\n"
         << "  n_x         = " << show(report.n_x * scale.var) << "\n"
         << "  n_y         = " << show(report.n_y * scale.var) << "\n"
         << "  v_q         = " << show(report.v_q * scale.var)
         << (report.v_q < 2.0 ? "  (beats the classical limit 2)" : "") << "\n";
    if (report.fidelity_coherent) {
        text << "  fidelity    = " << show(fid) << "\n";
    }
    text << "  out mean    = (" << show(report.output_state.mean_x * scale.mean) << ", "
         << show(report.output_state.mean_y * scale.mean) << ")\n"
         << "  out var     = (" << show(report.output_state.var_x * scale.var) << ", "
         << show(report.output_state.var_y * scale.var) << ")\n";

    std::string csv = "g,eta,n_x,n_y,v_q,fidelity,var_out_x,var_out_y,mean_out_x,mean_out_y\n";
    csv += csv_row({show(report.params.gain_g), show(report.eta), show(report.n_x * scale.var),
                    show(report.n_y * scale.var), show(report.v_q * scale.var), show(fid),
                    show(report.output_state.var_x * scale.var),
                    show(report.output_state.var_y * scale.var),
                    show(report.output_state.mean_x * scale.mean),
                    show(report.output_state.mean_y * scale.mean)});

    return {0, text.str(), csv};
}

RunOutput run_mc(const ScenarioConfig& cfg, const CommonOptions& opts)
{
    TrajectoryConfig mc = cfg.mc;
    if (opts.seed_override) {
        mc.seed = *opts.seed_override;
    }

    const auto result = run_ensemble(cfg.params, cfg.input, mc);
    const auto& est = result.moments;
    const auto report = teleport_moments(cfg.params, cfg.input);
    const auto comp = compare_to_analytic(est, report);
    const auto scale = unit_scale(cfg, opts);

    if (opts.dump_path) {
        std::ofstream dump(*opts.dump_path, std::ios::binary);
        if (!dump) {
            throw std::invalid_argument("cannot open dump file '" + *opts.dump_path + "'");
        }
        write_trajectory_csv(dump, result.trajectories);
    }

    std::ostringstream text;
    append_warnings(text, config_warnings(mc));
    append_warnings(text, validate_small_tilt(cfg.input, cfg.params.n_atoms));
    text << "monte carlo ensemble (" << est.n_valid << " valid / " << est.n_total
         << " trajectories)\n"
         << "  mean x3     = " << show(est.mean_x3 * scale.mean) << "  (se "
         << show(est.se_mean_x3 * scale.mean) << ", analytic "
         << show(report.output_state.mean_x * scale.mean) << ", z " << show(comp.z_mean_x)
         << ")\n"
         << "  mean y3     = " << show(est.mean_y3 * scale.mean) << "  (se "
         << show(est.se_mean_y3 * scale.mean) << ", analytic "
         << show(report.output_state.mean_y * scale.mean) << ", z " << show(comp.z_mean_y)
         << ")\n"
         << "  var x3      = " << show(est.var_x3 * scale.var) << "  (se "
         << show(est.se_var_x3 * scale.var) << ", analytic "
         << show(report.output_state.var_x * scale.var) << ", z " << show(comp.z_var_x) << ")\n"
         << "  var y3      = " << show(est.var_y3 * scale.var) << "  (se "
         << show(est.se_var_y3 * scale.var) << ", analytic "
         << show(report.output_state.var_y * scale.var) << ", z " << show(comp.z_var_y) << ")\n"
         << "  n_x (mc)    = " << show(est.n_x_est * scale.var) << "  (se "
         << show(est.se_n_x * scale.var) << ")\n"
         << "  n_y (mc)    = " << show(est.n_y_est * scale.var) << "  (se "
         << show(est.se_n_y * scale.var) << ")\n"
         << "  comparison  = " << (comp.pass ? "pass" : "FAIL")
         << "  (|z| <= 3 with " << show(comp.variance_bias_allowance)
         << " relative variance allowance)\n";

    std::string csv =
        "n_traj,n_invalid,mean_x3,se_mean_x3,mean_y3,se_mean_y3,"
        "var_x3,se_var_x3,var_y3,se_var_y3,n_x_mc,se_n_x,n_y_mc,se_n_y,"
        "analytic_mean_x,analytic_mean_y,analytic_var_x,analytic_var_y,"
        "z_mean_x,z_mean_y,z_var_x,z_var_y,pass\n";
    csv += csv_row({format_count(est.n_total), format_count(est.n_invalid),
                    show(est.mean_x3 * scale.mean), show(est.se_mean_x3 * scale.mean),
                    show(est.mean_y3 * scale.mean), show(est.se_mean_y3 * scale.mean),
                    show(est.var_x3 * scale.var), show(est.se_var_x3 * scale.var),
                    show(est.var_y3 * scale.var), show(est.se_var_y3 * scale.var),
                    show(est.n_x_est * scale.var), show(est.se_n_x * scale.var),
                    show(est.n_y_est * scale.var), show(est.se_n_y * scale.var),
                    show(report.output_state.mean_x * scale.mean),
                    show(report.output_state.mean_y * scale.mean),
                    show(report.output_state.var_x * scale.var),
                    show(report.output_state.var_y * scale.var), show(comp.z_mean_x),
                    show(comp.z_mean_y), show(comp.z_var_x), show(comp.z_var_y),
                    comp.pass ? "1" : "0"});

    return {comp.pass ? 0 : 3, text.str(), csv};
}

RunOutput run_sweep(const ScenarioConfig& cfg, const CommonOptions& opts)
{
    if (!cfg.sweep) {
        throw ScenarioError(0, "sweep block missing (set sweep.parameter/start/stop/points)");
    }
    const auto& sweep = *cfg.sweep;
    double ProtocolParams::*field = nullptr;
    if (sweep.parameter == "squeezing_r") {
        field = &ProtocolParams::squeezing_r;
    } else if (sweep.parameter == "cooperativity") {
        field = &ProtocolParams::cooperativity;
    } else if (sweep.parameter == "gain_g") {
        field = &ProtocolParams::gain_g;
    } else {
        throw ScenarioError(0, "unknown sweep parameter '" + sweep.parameter +
                                   "' (expected squeezing_r, cooperativity or gain_g)");
    }

    const auto scale = unit_scale(cfg, opts);
    std::string csv = "parameter,eta,n_x,n_y,v_q,fidelity\n";
    std::ostringstream text;
    text << "sweep over " << sweep.parameter << " (" << sweep.points << " points)\n";
    for (int i = 0; i < sweep.points; ++i) {
        const double t = sweep.points == 1
                             ? 0.0
                             : static_cast<double>(i) / static_cast<double>(sweep.points - 1);
        const double value = sweep.start + t * (sweep.stop - sweep.start);
        ProtocolParams params = cfg.params;
        params.*field = value;
        const auto report = teleport_moments(params, cfg.input);
        const double fid = report.fidelity_coherent.value_or(nan_value());
        csv += csv_row({show(value), show(report.eta), show(report.n_x * scale.var),
                        show(report.n_y * scale.var), show(report.v_q * scale.var), show(fid)});
    }
    text << "wrote " << sweep.points << " rows\n";
    return {0, text.str(), csv};
}

RunOutput run_swap(const ScenarioConfig& cfg, const CommonOptions& opts)
{
    (void)opts;
    const auto coeffs =
        coupling_coefficients(cfg.params.cooperativity, cfg.params.gamma0, cfg.params.n_atoms);
    const double i03 =
        entanglement_swap(cfg.swap.r01, cfg.swap.r23, coeffs.eta, cfg.params.gain_g);
    const bool entangled = i03 < 2.0;

    std::ostringstream text;
    text << "entanglement swapping\n"
         << "  r01         = " << show(cfg.swap.r01) << "\n"
         << "  r23         = " << show(cfg.swap.r23) << "\n"
         << "  eta         = " << show(coeffs.eta) << "\n"
         << "  g           = " << show(cfg.params.gain_g) << "\n"
         << "  I(0,3)      = " << show(i03) << "\n"
         << "  verdict     = " << (entangled ? "entangled" : "separable") << "\n";

    std::string csv = "r01,r23,eta,g,i03,entangled\n";
    csv += csv_row({show(cfg.swap.r01), show(cfg.swap.r23), show(coeffs.eta),
                    show(cfg.params.gain_g), show(i03), entangled ? "1" : "0"});
    return {0, text.str(), csv};
}

RunOutput run_calibrate(const ScenarioConfig& cfg, const CommonOptions& opts)
{
    (void)opts;
    const auto cal = calibrate_magnetic_field(cfg.params.n_atoms, cfg.params.gamma0,
                                              cfg.gyromagnetic_hz_per_gauss);

    std::ostringstream text;
    text << "magnetic feedback calibration (unity gain)\n"
         << "  n_atoms     = " << show(cfg.params.n_atoms) << "\n"
         << "  gamma0      = " << show(cfg.gamma0_hz) << " Hz\n"
         << "  gyromagn.   = " << show(cal.gyromagnetic) << " Hz/G\n"
         << "  theta       = " << show(cal.rotation_theta) << " rad\n"
         << "  omega_L     = " << show(cal.larmor_omega) << " rad/s\n"
         << "  B amplitude = " << show(cal.b_amplitude * 1e3) << " mG\n";

    std::string csv =
        "n_atoms,gamma0_hz,gyromagnetic_hz_per_gauss,theta_rad,omega_larmor_rad_s,"
        "b_amplitude_gauss\n";
    csv += csv_row({show(cfg.params.n_atoms), show(cfg.gamma0_hz), show(cal.gyromagnetic),
                    show(cal.rotation_theta), show(cal.larmor_omega), show(cal.b_amplitude)});
    return {0, text.str(), csv};
}

} // namespace spinport
