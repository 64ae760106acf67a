#ifndef SPINPORT_READOUT_HPP
#define SPINPORT_READOUT_HPP

namespace spinport {

// Cavity readout of a collective spin. When the control field switches on,
// the outgoing amplitude quadrature of cavity i carries the stored spin,
// vacuum input noise and spontaneous-emission noise:
//
//   X_i^out(t) = X_i^in(t) - alpha * J_xi(0) e^{-gamma0 t}
//                - 2 eta^2 [ X_i^in(t) - gamma0 Int_0^t e^{-gamma0 (t-s)} X_i^in(s) ds ]
//                + beta   [ X_vi(t)   - gamma0 Int_0^t e^{-gamma0 (t-s)} X_vi(s) ds ]
//
// with identical structure for the phase quadratures (x -> y, X -> Y).
// All white-noise operators carry unit symmetric spectral density.

/// Readout constants derived from the cooperativity.
///   eta^2 = 2C / (1 + 2C)       transfer efficiency (eta -> 1 as C -> inf)
///   alpha = eta sqrt(8 gamma0 / N)
///   beta  = 2 eta / sqrt(1 + 2C)
struct CouplingCoefficients {
    double eta = 0.0;
    double alpha = 0.0;  // sqrt(rate) units
    double beta = 0.0;
    double gamma0 = 1.0; // rad/s
};

/// cooperativity may be +infinity (lossless limit, eta = 1, beta = 0).
CouplingCoefficients coupling_coefficients(double cooperativity, double gamma0, double n_atoms);

/// Variance of the exponentially matched-filtered combination of one white
/// noise channel,
///   Var[ Int_0^inf e^{-gamma0 t} ( c_direct W(t)
///          + c_conv gamma0 Int_0^t e^{-gamma0 (t-s)} W(s) ds ) dt ]
/// for unit-spectral-density W. Closed form: (c_direct + c_conv/2)^2 / (2 gamma0).
double filtered_noise_weight(double c_direct, double c_conv, double gamma0);

/// Normalized reconstruction gain and the raw electronic gain amplitude,
/// related by g = -G_raw * eta / sqrt(N gamma0).
struct FeedbackGain {
    double g = 0.0;
    double g_raw = 0.0; // rate units
};

FeedbackGain gain_from_raw(double g_raw, const CouplingCoefficients& coeffs, double n_atoms);

/// Inverse of gain_from_raw; rejects eta = 0 (no realizable feedback).
FeedbackGain raw_from_gain(double g, const CouplingCoefficients& coeffs, double n_atoms);

/// Normalized variance of the vacuum noise injected by measurement plus
/// feedback: 2 g^2 (1 - eta^2) / eta^2. Requires 0 < eta <= 1.
double readout_noise_variance(double g, double eta);

} // namespace spinport

#endif
