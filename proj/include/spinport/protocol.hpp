#ifndef SPINPORT_PROTOCOL_HPP
#define SPINPORT_PROTOCOL_HPP

#include <optional>
#include <utility>

#include "spinport/core_model.hpp"

namespace spinport {

// Closed-form Gaussian moment propagation for the teleportation protocol.
// The reconstructed spin obeys the linear input-output relation
//   x3_out = g x1(0) + x3(0) - g x2(0) + noise,
//   y3_out = g y1(0) + y3(0) + g y2(0) + noise,
// with Var(noise) = 2 g^2 (1 - eta^2) / eta^2 in normalized units, so the
// output variance is
//   V_out = g^2 V_in + 2 g^2 (1 - eta^2)/eta^2 + (1 + g^2) cosh(2r) - 2 g sinh(2r).

/// Analytic teleportation summary for one parameter set and input state.
struct TeleportReport {
    ProtocolParams params;
    GaussianSpinState input_state;
    GaussianSpinState output_state;
    double eta = 0.0;
    double n_x = 0.0; ///< equivalent input noise, V_out_x - g^2 V_in_x
    double n_y = 0.0;
    double v_q = 0.0; ///< sqrt(n_x * n_y); below 2 beats the classical limit
    /// Mean-matched coherent-state overlap; set only at unity gain with a
    /// coherent input, where the standard CV teleportation measures apply.
    std::optional<double> fidelity_coherent;
};

/// Reconstruction variance contributed by the EPR legs,
/// (1 + g^2) cosh(2r) - 2 g sinh(2r), evaluated in the overflow-safe form
/// (1-g)^2 e^{2r} / 2 + (1+g)^2 e^{-2r} / 2.
double epr_reconstruction_variance(double g, double r);

/// Propagates means and covariances of the input state through the protocol.
/// Rejects eta = 0 (C = 0) combined with g != 0: feedback is unrealizable.
TeleportReport teleport_moments(const ProtocolParams& params, const GaussianSpinState& input);

/// Equivalent input noise (n_x, n_y), independent of the input state.
/// At unity gain this reduces to 2 e^{-2r} + 2 (1 - eta^2)/eta^2.
std::pair<double, double> equivalent_input_noise(const ProtocolParams& params);

/// Teleportation quality criterion sqrt(n_x * n_y).
double vq_criterion(double n_x, double n_y);

/// Coherent-input fidelity at unity gain, F = 2 / sqrt((2 + n_x)(2 + n_y)).
/// Rejects gain_g != 1: the closed form only applies at unity gain.
double fidelity_coherent_input(double n_x, double n_y, double gain_g);

/// Magnetic feedback scale for unity gain. The spin must rotate by the
/// relative spin fluctuation 1/sqrt(N) within half a readout time, so
/// theta = omega_L / (2 gamma0) = 1/sqrt(N).
struct MagneticCalibration {
    double larmor_omega = 0.0;   // rad/s
    double rotation_theta = 0.0; // rad
    double b_amplitude = 0.0;    // gauss
    double gyromagnetic = 0.0;   // Hz/gauss
};

MagneticCalibration calibrate_magnetic_field(double n_atoms, double gamma0,
                                             double gyromagnetic_hz_per_gauss);

/// Inseparability of ensembles 0 and 3 after teleporting ensemble 1, itself
/// half of an EPR pair (0,1) with squeezing r01, using resources (2,3) with
/// squeezing r23. At g = 1 equals 2 e^{-2 r01} + 2 e^{-2 r23} + 2(1-eta^2)/eta^2;
/// general g goes through full covariance propagation.
double entanglement_swap(double r01, double r23, double eta, double g = 1.0);

} // namespace spinport

#endif
