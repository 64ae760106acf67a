#include "spinport/readout.hpp"

#include <cmath>
#include <stdexcept>

namespace spinport {

CouplingCoefficients coupling_coefficients(double cooperativity, double gamma0, double n_atoms)
{
    if (std::isnan(cooperativity) || cooperativity < 0.0) {
        throw std::invalid_argument("cooperativity must be >= 0");
    }
    if (!(gamma0 > 0.0)) {
        throw std::invalid_argument("gamma0 must be positive");
    }
    if (!(n_atoms >= 1.0)) {
        throw std::invalid_argument("n_atoms must be >= 1");
    }

    CouplingCoefficients c;
    c.gamma0 = gamma0;
    if (std::isinf(cooperativity)) {
        c.eta = 1.0;
        c.beta = 0.0;
    } else {
        c.eta = std::sqrt(2.0 * cooperativity / (1.0 + 2.0 * cooperativity));
        c.beta = 2.0 * c.eta / std::sqrt(1.0 + 2.0 * cooperativity);
    }
    c.alpha = c.eta * std::sqrt(8.0 * gamma0 / n_atoms);
    return c;
}

double filtered_noise_weight(double c_direct, double c_conv, double gamma0)
{
    if (!(gamma0 > 0.0)) {
        throw std::invalid_argument("gamma0 must be positive");
    }
    const double w = c_direct + 0.5 * c_conv;
    return w * w / (2.0 * gamma0);
}

FeedbackGain gain_from_raw(double g_raw, const CouplingCoefficients& coeffs, double n_atoms)
{
    if (!(n_atoms >= 1.0)) {
        throw std::invalid_argument("n_atoms must be >= 1");
    }
    FeedbackGain fb;
    fb.g_raw = g_raw;
    fb.g = -g_raw * coeffs.eta / std::sqrt(n_atoms * coeffs.gamma0);
    return fb;
}

FeedbackGain raw_from_gain(double g, const CouplingCoefficients& coeffs, double n_atoms)
{
    if (!(n_atoms >= 1.0)) {
        throw std::invalid_argument("n_atoms must be >= 1");
    }
    if (!(coeffs.eta > 0.0)) {
        throw std::invalid_argument("eta = 0: requested gain is unrealizable");
    }
    FeedbackGain fb;
    fb.g = g;
    fb.g_raw = -g * std::sqrt(n_atoms * coeffs.gamma0) / coeffs.eta;
    return fb;
}

double readout_noise_variance(double g, double eta)
{
    if (!(eta > 0.0) || eta > 1.0) {
        throw std::invalid_argument("readout_noise_variance requires 0 < eta <= 1");
    }
    return 2.0 * g * g * (1.0 - eta * eta) / (eta * eta);
}

} // namespace spinport
