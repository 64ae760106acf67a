#include "spinport/montecarlo.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spinport/csv.hpp"
#include "spinport/readout.hpp"

namespace spinport {

namespace {

struct Chol2 {
    double l11, l21, l22;
};

// Lower Cholesky factor of [[v1, c], [c, v2]].
Chol2 chol2(double v1, double c, double v2)
{
    if (!(v1 > 0.0)) {
        throw std::invalid_argument("sampling covariance is not positive definite");
    }
    const double l11 = std::sqrt(v1);
    const double l21 = c / l11;
    const double rest = v2 - l21 * l21;
    if (rest < -kCovarianceTol * std::max(1.0, v2)) {
        throw std::invalid_argument("sampling covariance is not positive definite");
    }
    return {l11, l21, std::sqrt(std::max(rest, 0.0))};
}

std::int64_t step_count(const TrajectoryConfig& cfg)
{
    const auto k = static_cast<std::int64_t>(std::llround(cfg.t_max / cfg.dt));
    return k > 0 ? k : 1;
}

int resolved_threads(const TrajectoryConfig& cfg)
{
#ifdef _OPENMP
    return cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#else
    return 1;
#endif
}

double gaussian_se_of_variance(double var, std::int64_t n)
{
    return var * std::sqrt(2.0 / static_cast<double>(n - 1));
}

RunFingerprint make_fingerprint(const ProtocolParams& params, const GaussianSpinState& input,
                                const TrajectoryConfig& cfg)
{
    RunFingerprint fp;
    fp.params = params;
    fp.input = input;
    fp.dt = cfg.dt;
    fp.t_max = cfg.t_max;
    fp.n_traj = cfg.n_traj;
    fp.seed = cfg.seed;
    fp.mode = cfg.mode;
    return fp;
}

void validate_run_inputs(const ProtocolParams& params, const TrajectoryConfig& cfg)
{
    validate(params);
    validate(cfg);
    const auto coeffs = coupling_coefficients(params.cooperativity, params.gamma0, params.n_atoms);
    if (params.gain_g != 0.0 && !(coeffs.eta > 0.0)) {
        throw std::invalid_argument("eta = 0 with nonzero gain: feedback is unrealizable");
    }
}

} // namespace

void validate(const TrajectoryConfig& cfg)
{
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
        throw std::invalid_argument("mc dt must be positive and finite");
    }
    if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) {
        throw std::invalid_argument("mc t_max must be positive and finite");
    }
    if (cfg.n_traj < 2) {
        throw std::invalid_argument("mc n_traj must be >= 2 (variance estimation)");
    }
    if (cfg.threads < 0) {
        throw std::invalid_argument("mc threads must be >= 0");
    }
}

std::vector<std::string> config_warnings(const TrajectoryConfig& cfg)
{
    std::vector<std::string> warnings;
    if (cfg.t_max < 5.0) {
        warnings.push_back("mc t_max below 5/gamma0 truncates the reconstruction integral");
    }
    return warnings;
}

std::uint64_t substream_seed(std::uint64_t master_seed, std::int64_t trajectory_index)
{
    // splitmix64 of the master seed advanced by the trajectory index.
    std::uint64_t z = master_seed +
                      (static_cast<std::uint64_t>(trajectory_index) + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

InitialSpins sample_initial_spins(const GaussianSpinState& input, double r, std::mt19937_64& rng)
{
    validate(input);
    if (!(r >= 0.0)) {
        throw std::invalid_argument("EPR squeezing r must be >= 0");
    }
    std::normal_distribution<double> normal(0.0, 1.0);

    InitialSpins s;
    {
        const auto l = chol2(input.var_x, input.cov_xy, input.var_y);
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        s.x1 = input.mean_x + l.l11 * z1;
        s.y1 = input.mean_y + l.l21 * z1 + l.l22 * z2;
    }
    const double v = std::cosh(2.0 * r);
    const double c = std::sinh(2.0 * r);
    {
        const auto l = chol2(v, c, v); // x quadratures correlated
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        s.x2 = l.l11 * z1;
        s.x3 = l.l21 * z1 + l.l22 * z2;
    }
    {
        const auto l = chol2(v, -c, v); // y quadratures anti-correlated
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        s.y2 = l.l11 * z1;
        s.y3 = l.l21 * z1 + l.l22 * z2;
    }
    return s;
}

TrajectoryRecord simulate_trajectory(const ProtocolParams& params, const InitialSpins& spins,
                                     const TrajectoryConfig& cfg, std::mt19937_64& rng)
{
    validate(cfg);
    const auto coeffs = coupling_coefficients(params.cooperativity, params.gamma0, params.n_atoms);
    const double eta = coeffs.eta;
    const double beta = coeffs.beta;
    const double g = params.gain_g;
    if (g != 0.0 && !(eta > 0.0)) {
        throw std::invalid_argument("eta = 0 with nonzero gain: feedback is unrealizable");
    }
    const double gain_t = (g == 0.0) ? 0.0 : -2.0 * g / eta;

    const double dt = cfg.dt;
    const std::int64_t n_steps = step_count(cfg);
    const double decay = std::exp(-dt);
    const double decay2 = std::exp(-2.0 * dt);
    // Exact per-step integrals of the exponential gain profile:
    //   int e^{-tau} dtau = e^{-tau_k} (1 - e^{-dt}),
    //   int e^{-2tau} dtau = e^{-2tau_k} (1 - e^{-2dt}) / 2.
    const double w_gain = 1.0 - decay;
    const double w_signal = 0.5 * (1.0 - decay2);

    const double c_direct = 1.0 - 2.0 * eta * eta;
    const double c_conv = 2.0 * eta * eta;
    const double inv_sqrt_dt = 1.0 / std::sqrt(dt);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const bool with_noise = cfg.mode != SamplingMode::zero_noise;

    const double sig_x = -eta * (spins.x1 - spins.x2); // spin signal entering X_-
    const double sig_y = -eta * (spins.y1 + spins.y2); // spin signal entering Y_+

    std::normal_distribution<double> normal(0.0, 1.0);

    double x3 = spins.x3;
    double y3 = spins.y3;
    double f_x1 = 0.0, f_x2 = 0.0, f_y1 = 0.0, f_y2 = 0.0; // convolved vacuum inputs
    double h_x1 = 0.0, h_x2 = 0.0, h_y1 = 0.0, h_y2 = 0.0; // convolved atomic noise
    double exp_tau = 1.0;
    double exp_2tau = 1.0;

    for (std::int64_t k = 0; k < n_steps; ++k) {
        if (with_noise) {
            // Unit-spectral-density white noise: variance 1/dt per sample.
            const double xin1 = normal(rng) * inv_sqrt_dt;
            const double xin2 = normal(rng) * inv_sqrt_dt;
            const double yin1 = normal(rng) * inv_sqrt_dt;
            const double yin2 = normal(rng) * inv_sqrt_dt;
            const double xv1 = normal(rng) * inv_sqrt_dt;
            const double xv2 = normal(rng) * inv_sqrt_dt;
            const double yv1 = normal(rng) * inv_sqrt_dt;
            const double yv2 = normal(rng) * inv_sqrt_dt;

            const double out_x1 = c_direct * xin1 + c_conv * f_x1 + beta * (xv1 - h_x1);
            const double out_x2 = c_direct * xin2 + c_conv * f_x2 + beta * (xv2 - h_x2);
            const double out_y1 = c_direct * yin1 + c_conv * f_y1 + beta * (yv1 - h_y1);
            const double out_y2 = c_direct * yin2 + c_conv * f_y2 + beta * (yv2 - h_y2);

            x3 += gain_t * exp_tau * w_gain * inv_sqrt2 * (out_x1 - out_x2);
            y3 += gain_t * exp_tau * w_gain * inv_sqrt2 * (out_y1 + out_y2);

            f_x1 = decay * f_x1 + xin1 * dt;
            f_x2 = decay * f_x2 + xin2 * dt;
            f_y1 = decay * f_y1 + yin1 * dt;
            f_y2 = decay * f_y2 + yin2 * dt;
            h_x1 = decay * h_x1 + xv1 * dt;
            h_x2 = decay * h_x2 + xv2 * dt;
            h_y1 = decay * h_y1 + yv1 * dt;
            h_y2 = decay * h_y2 + yv2 * dt;
        }
        x3 += gain_t * exp_2tau * w_signal * sig_x;
        y3 += gain_t * exp_2tau * w_signal * sig_y;
        exp_tau *= decay;
        exp_2tau *= decay2;
    }

    TrajectoryRecord rec;
    rec.x1 = spins.x1;
    rec.y1 = spins.y1;
    rec.x2 = spins.x2;
    rec.y2 = spins.y2;
    rec.x3 = spins.x3;
    rec.y3 = spins.y3;
    rec.x3_out = x3;
    rec.y3_out = y3;
    rec.valid = std::isfinite(x3) && std::isfinite(y3);
    return rec;
}

EnsembleResult run_ensemble(const ProtocolParams& params, const GaussianSpinState& input,
                            const TrajectoryConfig& cfg)
{
    validate(input);
    validate_run_inputs(params, cfg);

    const std::int64_t n = cfg.n_traj;
    std::vector<TrajectoryRecord> records(static_cast<std::size_t>(n));
    const int threads = resolved_threads(cfg);
    (void)threads;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        std::mt19937_64 rng(substream_seed(cfg.seed, i));
        InitialSpins spins;
        if (cfg.mode != SamplingMode::zero_spins) {
            spins = sample_initial_spins(input, params.squeezing_r, rng);
        }
        records[static_cast<std::size_t>(i)] = simulate_trajectory(params, spins, cfg, rng);
    }

    // Fixed-order sequential reduction keeps results independent of the
    // thread count. Two passes: means first, then central moments.
    std::int64_t n_valid = 0;
    double s_x3o = 0.0, s_y3o = 0.0;
    double s_x1 = 0.0, s_x2 = 0.0, s_x3 = 0.0;
    double s_y1 = 0.0, s_y2 = 0.0, s_y3 = 0.0;
    double s_u = 0.0, s_v = 0.0;
    const double g = params.gain_g;
    for (const auto& r : records) {
        if (!r.valid) {
            continue;
        }
        ++n_valid;
        s_x3o += r.x3_out;
        s_y3o += r.y3_out;
        s_x1 += r.x1;
        s_x2 += r.x2;
        s_x3 += r.x3;
        s_y1 += r.y1;
        s_y2 += r.y2;
        s_y3 += r.y3;
        s_u += r.x3_out - g * r.x1;
        s_v += r.y3_out - g * r.y1;
    }
    const std::int64_t n_invalid = n - n_valid;
    if (n_invalid * 1000 > n) {
        throw std::runtime_error("monte carlo run produced " + std::to_string(n_invalid) +
                                 " invalid trajectories out of " + std::to_string(n) +
                                 " (more than 0.1%)");
    }
    if (n_valid < 2) {
        throw std::runtime_error("monte carlo run has fewer than 2 valid trajectories");
    }

    const double nv = static_cast<double>(n_valid);
    const double m_x3o = s_x3o / nv, m_y3o = s_y3o / nv;
    const double m_x1 = s_x1 / nv, m_x2 = s_x2 / nv, m_x3 = s_x3 / nv;
    const double m_y1 = s_y1 / nv, m_y2 = s_y2 / nv, m_y3 = s_y3 / nv;
    const double m_u = s_u / nv, m_v = s_v / nv;

    double ss_x3o = 0.0, ss_y3o = 0.0, ss_u = 0.0, ss_v = 0.0;
    double sc_x1 = 0.0, sc_x2 = 0.0, sc_x3 = 0.0;
    double sc_y1 = 0.0, sc_y2 = 0.0, sc_y3 = 0.0;
    for (const auto& r : records) {
        if (!r.valid) {
            continue;
        }
        const double dx = r.x3_out - m_x3o;
        const double dy = r.y3_out - m_y3o;
        ss_x3o += dx * dx;
        ss_y3o += dy * dy;
        const double du = (r.x3_out - g * r.x1) - m_u;
        const double dv = (r.y3_out - g * r.y1) - m_v;
        ss_u += du * du;
        ss_v += dv * dv;
        sc_x1 += dx * (r.x1 - m_x1);
        sc_x2 += dx * (r.x2 - m_x2);
        sc_x3 += dx * (r.x3 - m_x3);
        sc_y1 += dy * (r.y1 - m_y1);
        sc_y2 += dy * (r.y2 - m_y2);
        sc_y3 += dy * (r.y3 - m_y3);
    }
    const double denom = nv - 1.0;

    MomentEstimates est;
    est.n_total = n;
    est.n_valid = n_valid;
    est.n_invalid = n_invalid;
    est.mean_x3 = m_x3o;
    est.mean_y3 = m_y3o;
    est.var_x3 = ss_x3o / denom;
    est.var_y3 = ss_y3o / denom;
    est.se_mean_x3 = std::sqrt(est.var_x3 / nv);
    est.se_mean_y3 = std::sqrt(est.var_y3 / nv);
    est.se_var_x3 = gaussian_se_of_variance(est.var_x3, n_valid);
    est.se_var_y3 = gaussian_se_of_variance(est.var_y3, n_valid);
    est.cov_x3out_x1 = sc_x1 / denom;
    est.cov_x3out_x2 = sc_x2 / denom;
    est.cov_x3out_x3 = sc_x3 / denom;
    est.cov_y3out_y1 = sc_y1 / denom;
    est.cov_y3out_y2 = sc_y2 / denom;
    est.cov_y3out_y3 = sc_y3 / denom;
    est.n_x_est = ss_u / denom;
    est.n_y_est = ss_v / denom;
    est.se_n_x = gaussian_se_of_variance(est.n_x_est, n_valid);
    est.se_n_y = gaussian_se_of_variance(est.n_y_est, n_valid);
    est.fingerprint = make_fingerprint(params, input, cfg);

    return {est, std::move(records)};
}

ComparisonRecord compare_to_analytic(const MomentEstimates& est, const TeleportReport& report)
{
    if (!(est.fingerprint.params == report.params) ||
        !(est.fingerprint.input == report.input_state)) {
        throw std::invalid_argument("estimate/report parameter fingerprints do not match");
    }

    const auto zscore = [](double estimate, double analytic, double se) {
        const double diff = estimate - analytic;
        if (se > 0.0) {
            return diff / se;
        }
        return diff == 0.0 ? 0.0 : std::copysign(HUGE_VAL, diff);
    };
    const auto within = [](double estimate, double analytic, double se, double allowance) {
        return std::abs(estimate - analytic) <= 3.0 * se + allowance * std::abs(analytic);
    };

    ComparisonRecord rec;
    rec.variance_bias_allowance = kVarianceBiasAllowance;
    rec.z_mean_x = zscore(est.mean_x3, report.output_state.mean_x, est.se_mean_x3);
    rec.z_mean_y = zscore(est.mean_y3, report.output_state.mean_y, est.se_mean_y3);
    rec.z_var_x = zscore(est.var_x3, report.output_state.var_x, est.se_var_x3);
    rec.z_var_y = zscore(est.var_y3, report.output_state.var_y, est.se_var_y3);
    rec.pass_mean_x = within(est.mean_x3, report.output_state.mean_x, est.se_mean_x3, 0.0);
    rec.pass_mean_y = within(est.mean_y3, report.output_state.mean_y, est.se_mean_y3, 0.0);
    rec.pass_var_x = within(est.var_x3, report.output_state.var_x, est.se_var_x3,
                            kVarianceBiasAllowance);
    rec.pass_var_y = within(est.var_y3, report.output_state.var_y, est.se_var_y3,
                            kVarianceBiasAllowance);
    rec.pass = rec.pass_mean_x && rec.pass_mean_y && rec.pass_var_x && rec.pass_var_y;
    return rec;
}

SwapEnsembleResult run_swap_ensemble(double r01, const ProtocolParams& params,
                                     const TrajectoryConfig& cfg)
{
    if (!(r01 >= 0.0)) {
        throw std::invalid_argument("swap r01 must be >= 0");
    }
    validate_run_inputs(params, cfg);

    const double v01 = std::cosh(2.0 * r01);
    const double c01 = std::sinh(2.0 * r01);
    const double v23 = std::cosh(2.0 * params.squeezing_r);
    const double c23 = std::sinh(2.0 * params.squeezing_r);

    const std::int64_t n = cfg.n_traj;
    std::vector<SwapRecord> records(static_cast<std::size_t>(n));
    const int threads = resolved_threads(cfg);
    (void)threads;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        std::mt19937_64 rng(substream_seed(cfg.seed, i));
        std::normal_distribution<double> normal(0.0, 1.0);

        InitialSpins spins;
        SwapRecord rec;
        {
            const auto l = chol2(v01, c01, v01);
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            rec.x0 = l.l11 * z1;
            spins.x1 = l.l21 * z1 + l.l22 * z2;
        }
        {
            const auto l = chol2(v01, -c01, v01);
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            rec.y0 = l.l11 * z1;
            spins.y1 = l.l21 * z1 + l.l22 * z2;
        }
        {
            const auto l = chol2(v23, c23, v23);
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            spins.x2 = l.l11 * z1;
            spins.x3 = l.l21 * z1 + l.l22 * z2;
        }
        {
            const auto l = chol2(v23, -c23, v23);
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            spins.y2 = l.l11 * z1;
            spins.y3 = l.l21 * z1 + l.l22 * z2;
        }
        rec.traj = simulate_trajectory(params, spins, cfg, rng);
        records[static_cast<std::size_t>(i)] = rec;
    }

    std::int64_t n_valid = 0;
    double s_dx = 0.0, s_dy = 0.0;
    for (const auto& r : records) {
        if (!r.traj.valid) {
            continue;
        }
        ++n_valid;
        s_dx += r.x0 - r.traj.x3_out;
        s_dy += r.y0 + r.traj.y3_out;
    }
    const std::int64_t n_invalid = n - n_valid;
    if (n_invalid * 1000 > n) {
        throw std::runtime_error("swap run produced too many invalid trajectories");
    }
    if (n_valid < 2) {
        throw std::runtime_error("swap run has fewer than 2 valid trajectories");
    }
    const double nv = static_cast<double>(n_valid);
    const double m_dx = s_dx / nv;
    const double m_dy = s_dy / nv;
    double ss_dx = 0.0, ss_dy = 0.0;
    for (const auto& r : records) {
        if (!r.traj.valid) {
            continue;
        }
        const double dx = (r.x0 - r.traj.x3_out) - m_dx;
        const double dy = (r.y0 + r.traj.y3_out) - m_dy;
        ss_dx += dx * dx;
        ss_dy += dy * dy;
    }
    const double var_dx = ss_dx / (nv - 1.0);
    const double var_dy = ss_dy / (nv - 1.0);
    const double se_dx = gaussian_se_of_variance(var_dx, n_valid);
    const double se_dy = gaussian_se_of_variance(var_dy, n_valid);

    SwapEnsembleResult result;
    result.i03 = 0.5 * (var_dx + var_dy);
    result.se_i03 = 0.5 * std::sqrt(se_dx * se_dx + se_dy * se_dy);
    result.n_valid = n_valid;
    result.n_invalid = n_invalid;
    result.trajectories = std::move(records);
    return result;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records)
{
    out << "index,x1,y1,x2,y2,x3,y3,x3_out,y3_out\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out << csv_row({format_count(static_cast<std::int64_t>(i)), format_sig12(r.x1),
                        format_sig12(r.y1), format_sig12(r.x2), format_sig12(r.y2),
                        format_sig12(r.x3), format_sig12(r.y3), format_sig12(r.x3_out),
                        format_sig12(r.y3_out)});
    }
}

} // namespace spinport
