#include "spinport/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spinport/readout.hpp"

namespace spinport {

namespace {

bool is_exactly_coherent(const GaussianSpinState& s)
{
    return s.var_x == 1.0 && s.var_y == 1.0 && s.cov_xy == 0.0;
}

double injected_noise_variance(double g, double eta)
{
    if (g == 0.0) {
        return 0.0; // no feedback, nothing injected
    }
    if (!(eta > 0.0)) {
        throw std::invalid_argument("eta = 0 with nonzero gain: feedback is unrealizable");
    }
    return readout_noise_variance(g, eta);
}

} // namespace

double epr_reconstruction_variance(double g, double r)
{
    const double minus_sq = (1.0 - g) * (1.0 - g);
    const double plus_sq = (1.0 + g) * (1.0 + g);
    // the stretched exponential drops out entirely at unity gain
    const double stretched = minus_sq == 0.0 ? 0.0 : 0.5 * minus_sq * std::exp(2.0 * r);
    return stretched + 0.5 * plus_sq * std::exp(-2.0 * r);
}

TeleportReport teleport_moments(const ProtocolParams& params, const GaussianSpinState& input)
{
    validate(params);
    validate(input);

    const auto coeffs = coupling_coefficients(params.cooperativity, params.gamma0, params.n_atoms);
    const double g = params.gain_g;
    const double added = injected_noise_variance(g, coeffs.eta) +
                         epr_reconstruction_variance(g, params.squeezing_r);

    TeleportReport report;
    report.params = params;
    report.input_state = input;
    report.eta = coeffs.eta;

    report.output_state.mean_x = g * input.mean_x;
    report.output_state.mean_y = g * input.mean_y;
    report.output_state.var_x = g * g * input.var_x + added;
    report.output_state.var_y = g * g * input.var_y + added;
    report.output_state.cov_xy = g * g * input.cov_xy;

    report.n_x = report.output_state.var_x - g * g * input.var_x;
    report.n_y = report.output_state.var_y - g * g * input.var_y;
    report.v_q = vq_criterion(report.n_x, report.n_y);
    if (g == 1.0 && is_exactly_coherent(input)) {
        report.fidelity_coherent = fidelity_coherent_input(report.n_x, report.n_y, g);
    }
    return report;
}

std::pair<double, double> equivalent_input_noise(const ProtocolParams& params)
{
    validate(params);
    const auto coeffs = coupling_coefficients(params.cooperativity, params.gamma0, params.n_atoms);
    const double n = injected_noise_variance(params.gain_g, coeffs.eta) +
                     epr_reconstruction_variance(params.gain_g, params.squeezing_r);
    return {n, n};
}

double vq_criterion(double n_x, double n_y)
{
    if (n_x < 0.0 || n_y < 0.0 || std::isnan(n_x) || std::isnan(n_y)) {
        throw std::invalid_argument("equivalent input noises must be >= 0");
    }
    return std::sqrt(n_x * n_y);
}

double fidelity_coherent_input(double n_x, double n_y, double gain_g)
{
    if (gain_g != 1.0) {
        throw std::invalid_argument("coherent-input fidelity is defined at unity gain only");
    }
    if (n_x < 0.0 || n_y < 0.0 || std::isnan(n_x) || std::isnan(n_y)) {
        throw std::invalid_argument("equivalent input noises must be >= 0");
    }
    return 2.0 / std::sqrt((2.0 + n_x) * (2.0 + n_y));
}

MagneticCalibration calibrate_magnetic_field(double n_atoms, double gamma0,
                                             double gyromagnetic_hz_per_gauss)
{
    if (!(n_atoms >= 1.0)) {
        throw std::invalid_argument("n_atoms must be >= 1");
    }
    if (!(gamma0 > 0.0)) {
        throw std::invalid_argument("gamma0 must be positive");
    }
    if (!(gyromagnetic_hz_per_gauss > 0.0)) {
        throw std::invalid_argument("gyromagnetic ratio must be positive");
    }
    MagneticCalibration cal;
    cal.gyromagnetic = gyromagnetic_hz_per_gauss;
    cal.rotation_theta = 1.0 / std::sqrt(n_atoms);
    cal.larmor_omega = 2.0 * gamma0 * cal.rotation_theta;
    cal.b_amplitude = cal.larmor_omega / (2.0 * std::numbers::pi) / gyromagnetic_hz_per_gauss;
    return cal;
}

double entanglement_swap(double r01, double r23, double eta, double g)
{
    if (!(r01 >= 0.0) || !(r23 >= 0.0)) {
        throw std::invalid_argument("squeezing parameters must be >= 0");
    }
    if (std::isnan(eta) || eta < 0.0 || eta > 1.0) {
        throw std::invalid_argument("eta must lie in [0, 1]");
    }

    const double v0 = std::cosh(2.0 * r01);
    const double c01 = std::sinh(2.0 * r01);
    const double v3 = g * g * v0 + injected_noise_variance(g, eta) +
                      epr_reconstruction_variance(g, r23);

    // Joint state of the never-interacting ensembles 0 and reconstructed 3.
    JointGaussianState joint;
    joint.labels = {"0", "3"};
    joint.means = Eigen::VectorXd::Zero(4);
    joint.cov = Eigen::MatrixXd::Zero(4, 4);
    joint.cov(0, 0) = v0;
    joint.cov(1, 1) = v0;
    joint.cov(2, 2) = v3;
    joint.cov(3, 3) = v3;
    joint.cov(0, 2) = g * c01;
    joint.cov(2, 0) = g * c01;
    joint.cov(1, 3) = -g * c01;
    joint.cov(3, 1) = -g * c01;
    validate(joint);
    return inseparability(joint, "0", "3");
}

} // namespace spinport
