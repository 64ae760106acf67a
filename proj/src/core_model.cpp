#include "spinport/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinport {

namespace {

double heisenberg_slack(double vx, double vy)
{
    return kCovarianceTol * std::max(1.0, vx * vy);
}

} // namespace

bool is_physical(const GaussianSpinState& s)
{
    if (!(s.var_x > 0.0) || !(s.var_y > 0.0)) {
        return false;
    }
    const double det = s.var_x * s.var_y - s.cov_xy * s.cov_xy;
    return det >= 1.0 - heisenberg_slack(s.var_x, s.var_y);
}

void validate(const GaussianSpinState& s)
{
    if (!(s.var_x > 0.0) || !(s.var_y > 0.0)) {
        throw std::invalid_argument("spin state variances must be positive");
    }
    const double det = s.var_x * s.var_y - s.cov_xy * s.cov_xy;
    if (!(det >= 1.0 - heisenberg_slack(s.var_x, s.var_y))) {
        throw std::invalid_argument(
            "spin state violates var_x*var_y - cov_xy^2 >= 1 (normalized Heisenberg bound)");
    }
    if (!std::isfinite(s.mean_x) || !std::isfinite(s.mean_y)) {
        throw std::invalid_argument("spin state means must be finite");
    }
}

GaussianSpinState make_coherent_state(double mean_x, double mean_y)
{
    GaussianSpinState s;
    s.mean_x = mean_x;
    s.mean_y = mean_y;
    s.var_x = 1.0;
    s.var_y = 1.0;
    s.cov_xy = 0.0;
    validate(s);
    return s;
}

GaussianSpinState make_squeezed_state(double squeeze, double mean_x, double mean_y)
{
    GaussianSpinState s;
    s.mean_x = mean_x;
    s.mean_y = mean_y;
    s.var_x = std::exp(-2.0 * squeeze);
    s.var_y = std::exp(2.0 * squeeze);
    s.cov_xy = 0.0;
    validate(s);
    return s;
}

std::size_t JointGaussianState::index_of(const std::string& label) const
{
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) {
            return i;
        }
    }
    throw std::invalid_argument("unknown ensemble label '" + label + "'");
}

GaussianSpinState JointGaussianState::marginal(const std::string& label) const
{
    const auto i = index_of(label);
    GaussianSpinState s;
    s.mean_x = means(2 * i);
    s.mean_y = means(2 * i + 1);
    s.var_x = cov(2 * i, 2 * i);
    s.var_y = cov(2 * i + 1, 2 * i + 1);
    s.cov_xy = cov(2 * i, 2 * i + 1);
    return s;
}

double min_cov_eigenvalue(const JointGaussianState& joint)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(joint.cov);
    return solver.eigenvalues().minCoeff();
}

void validate(const JointGaussianState& joint)
{
    const auto n = static_cast<Eigen::Index>(joint.labels.size());
    if (n == 0) {
        throw std::invalid_argument("joint state needs at least one ensemble");
    }
    if (joint.means.size() != 2 * n || joint.cov.rows() != 2 * n || joint.cov.cols() != 2 * n) {
        throw std::invalid_argument("joint state dimensions inconsistent with label count");
    }
    const double scale = std::max(1.0, joint.cov.cwiseAbs().maxCoeff());
    if ((joint.cov - joint.cov.transpose()).cwiseAbs().maxCoeff() > kCovarianceTol * scale) {
        throw std::invalid_argument("joint covariance must be symmetric");
    }
    if (min_cov_eigenvalue(joint) < -kCovarianceTol * scale) {
        throw std::invalid_argument("joint covariance must be positive semidefinite");
    }
    for (const auto& label : joint.labels) {
        validate(joint.marginal(label));
    }
}

JointGaussianState make_epr_pair(double r, const std::string& label_a, const std::string& label_b)
{
    if (!(r >= 0.0)) {
        throw std::invalid_argument("EPR squeezing r must be >= 0");
    }
    // cosh/sinh from shared exponentials: their rounding errors then cancel
    // in the EPR differences v - c, keeping the inseparability value at the
    // e^{-2r} scale accurate to the ulp of the stored entries.
    const double grow = std::exp(2.0 * r);
    const double shrink = std::exp(-2.0 * r);
    const double v = 0.5 * (grow + shrink);
    const double c = 0.5 * (grow - shrink);
    if (!std::isfinite(v)) {
        throw std::invalid_argument("EPR squeezing r too large to represent");
    }

    JointGaussianState joint;
    joint.labels = {label_a, label_b};
    joint.means = Eigen::VectorXd::Zero(4);
    joint.cov = Eigen::MatrixXd::Zero(4, 4);
    joint.cov(0, 0) = v; // x_a
    joint.cov(1, 1) = v; // y_a
    joint.cov(2, 2) = v; // x_b
    joint.cov(3, 3) = v; // y_b
    joint.cov(0, 2) = c;
    joint.cov(2, 0) = c;
    joint.cov(1, 3) = -c;
    joint.cov(3, 1) = -c;
    validate(joint);
    return joint;
}

double inseparability(const JointGaussianState& joint, const std::string& label_a,
                      const std::string& label_b)
{
    const auto a = joint.index_of(label_a);
    const auto b = joint.index_of(label_b);
    const auto xa = 2 * a;
    const auto ya = 2 * a + 1;
    const auto xb = 2 * b;
    const auto yb = 2 * b + 1;
    const double var_x_diff = joint.cov(xa, xa) + joint.cov(xb, xb) - 2.0 * joint.cov(xa, xb);
    const double var_y_sum = joint.cov(ya, ya) + joint.cov(yb, yb) + 2.0 * joint.cov(ya, yb);
    return 0.5 * (var_x_diff + var_y_sum);
}

void validate(const ProtocolParams& p)
{
    if (!(p.n_atoms >= 1.0)) {
        throw std::invalid_argument("n_atoms must be >= 1");
    }
    if (std::isnan(p.cooperativity) || p.cooperativity < 0.0) {
        throw std::invalid_argument("cooperativity must be >= 0");
    }
    if (!(p.gamma0 > 0.0) || !std::isfinite(p.gamma0)) {
        throw std::invalid_argument("gamma0 must be positive and finite");
    }
    if (std::isnan(p.squeezing_r) || p.squeezing_r < 0.0 || std::isinf(p.squeezing_r)) {
        throw std::invalid_argument("squeezing_r must be finite and >= 0");
    }
    if (!std::isfinite(p.gain_g)) {
        throw std::invalid_argument("gain_g must be finite");
    }
}

std::vector<std::string> validate_small_tilt(const GaussianSpinState& state, double n_atoms,
                                             double fraction)
{
    if (!(n_atoms >= 1.0)) {
        throw std::invalid_argument("n_atoms must be >= 1");
    }
    std::vector<std::string> warnings;
    const double threshold = fraction * n_atoms / 2.0;
    const auto check = [&](double normalized_mean, const char* name) {
        const double raw = std::abs(raw_mean_from_normalized(normalized_mean, n_atoms));
        if (raw > threshold) {
            warnings.push_back(std::string("mean ") + name + " tilt " + std::to_string(raw) +
                               " exceeds " + std::to_string(threshold) +
                               " (small-tilt approximation unreliable)");
        }
    };
    check(state.mean_x, "x");
    check(state.mean_y, "y");
    return warnings;
}

double raw_mean_from_normalized(double normalized_mean, double n_atoms)
{
    return normalized_mean * std::sqrt(n_atoms / 4.0);
}

double raw_variance_from_normalized(double normalized_var, double n_atoms)
{
    return normalized_var * (n_atoms / 4.0);
}

} // namespace spinport
