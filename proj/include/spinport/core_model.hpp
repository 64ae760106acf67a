#ifndef SPINPORT_CORE_MODEL_HPP
#define SPINPORT_CORE_MODEL_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spinport {

// Everything in this library works in shot-noise-normalized units: transverse
// spin quadratures are stored as x = Jx / sqrt(N/4) and y = Jy / sqrt(N/4), so
// a coherent spin state has unit variance in both components. Conversions back
// to raw J-units are provided below but raw values are never stored.

/// Tolerance used when checking covariance physicality (smallest eigenvalue,
/// symmetry defect, Heisenberg product), scaled by the magnitude of the data.
inline constexpr double kCovarianceTol = 1e-12;

/// Gaussian state of one ensemble's transverse collective-spin components.
struct GaussianSpinState {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double var_x = 1.0;
    double var_y = 1.0;
    double cov_xy = 0.0;

    friend bool operator==(const GaussianSpinState&, const GaussianSpinState&) = default;
};

/// True when variances are positive and the normalized Heisenberg bound
/// var_x * var_y - cov_xy^2 >= 1 holds (up to floating-point slack).
bool is_physical(const GaussianSpinState& state);

/// Throws std::invalid_argument when the state is unphysical.
void validate(const GaussianSpinState& state);

/// Coherent spin state: unit variances, zero cross correlation.
GaussianSpinState make_coherent_state(double mean_x, double mean_y);

/// Quadrature-squeezed state with var_x = e^{-2s}, var_y = e^{+2s}.
GaussianSpinState make_squeezed_state(double s, double mean_x = 0.0, double mean_y = 0.0);

/// Joint Gaussian state over several ensembles. Quadrature ordering is
/// (x, y) per ensemble, in label order: [x_a, y_a, x_b, y_b, ...].
struct JointGaussianState {
    std::vector<std::string> labels;
    Eigen::VectorXd means;
    Eigen::MatrixXd cov;

    /// Position of a label; throws std::invalid_argument on unknown label.
    std::size_t index_of(const std::string& label) const;

    /// Single-ensemble marginal (2x2 block plus means).
    GaussianSpinState marginal(const std::string& label) const;
};

/// Checks symmetry, positive semidefiniteness and per-ensemble Heisenberg
/// bounds; throws std::invalid_argument on violation.
void validate(const JointGaussianState& joint);

/// Smallest eigenvalue of the joint covariance (for physicality asserts).
double min_cov_eigenvalue(const JointGaussianState& joint);

/// Two-mode squeezed pair of ensembles: every quadrature variance equals
/// cosh(2r), cov(x_a, x_b) = +sinh(2r), cov(y_a, y_b) = -sinh(2r).
/// r = 0 gives two uncorrelated coherent states. Negative r is rejected.
JointGaussianState make_epr_pair(double r, const std::string& label_a = "2",
                                 const std::string& label_b = "3");

/// Entanglement witness on the [0, 2] scale:
///   I = (1/2) [ Var(x_a - x_b) + Var(y_a + y_b) ],
/// i.e. the sum of EPR variances normalized so that two uncorrelated coherent
/// states give exactly 2. Values strictly below 2 certify inseparability.
double inseparability(const JointGaussianState& joint, const std::string& label_a,
                      const std::string& label_b);

/// Physical parameters of the teleportation protocol.
struct ProtocolParams {
    double n_atoms = 1e6;      // atoms per ensemble, N
    double cooperativity = 100.0; // C >= 0; +infinity models the lossless limit
    double gamma0 = 1.0;       // effective atomic decay rate, rad/s
    double squeezing_r = 1.0;  // EPR resource squeezing, r >= 0
    double gain_g = 1.0;       // normalized reconstruction gain

    friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

void validate(const ProtocolParams& params);

/// Warns when the mean transverse displacement is too large for the
/// small-tilt (near-pole) approximation: |<J>| must stay well below N/2.
/// The default threshold flags means above 10% of N/2.
std::vector<std::string> validate_small_tilt(const GaussianSpinState& state, double n_atoms,
                                             double fraction = 0.1);

/// Raw-spin-unit conversions (J-units). Never stored, display only.
double raw_mean_from_normalized(double normalized_mean, double n_atoms);
double raw_variance_from_normalized(double normalized_var, double n_atoms);

} // namespace spinport

#endif
