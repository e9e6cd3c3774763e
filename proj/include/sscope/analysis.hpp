#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sscope/optimizer.hpp"
#include "sscope/oracles.hpp"
#include "sscope/problems.hpp"

namespace sscope {

enum class Region { G, H, M };

inline char region_letter(Region r) {
    switch (r) {
        case Region::G: return 'G';
        case Region::H: return 'H';
        case Region::M: return 'M';
    }
    return '-';
}

/// Classifier parameters. Derived quantities:
///   c1 = 1 - mu (delta/2)(1 + beta^2)
///   c2 = (delta/2) sigma_sq
///   g_threshold = mu (c2/c1)(1 + 1/pi)
/// A point is G when |grad J|^2 >= g_threshold, otherwise H when
/// lambda_min(hess J) <= -tau, otherwise M.
struct ClassifierParams {
    double step_size = 0.01;  // mu
    double tau = 0.1;
    double pi = 0.5;
    double delta = 1.0;
    double beta = 0.0;
    double sigma_sq = 1.0;
};

struct Constants {
    double c1;
    double c2;
    double g_threshold;
};

Constants compute_constants(const ClassifierParams& params);

Region classify(const Eigen::VectorXd& w, const CostModel& model, const ClassifierParams& params);
/// classify() with the squared gradient norm already known.
Region classify_with_grad_sq(double grad_sq, const Eigen::VectorXd& w, const CostModel& model,
                             const ClassifierParams& params);

/// Eigendecomposition split at the sign boundary. Eigenvalues are sorted in
/// descending order within each block; each eigenvector's first component of
/// magnitude above 1e-12 is made positive so splits are reproducible.
struct SpectralSplit {
    Eigen::VectorXd eigvals_nonneg;
    Eigen::VectorXd eigvals_neg;
    Eigen::MatrixXd basis_nonneg;
    Eigen::MatrixXd basis_neg;
};

SpectralSplit spectral_split(const Eigen::MatrixXd& hessian);

/// lambda_min of the noise covariance projected onto the negative eigenspace.
/// Throws std::domain_error when the negative part is empty (the condition is
/// vacuous outside H).
double saddle_noise_floor(const Eigen::MatrixXd& noise_cov, const SpectralSplit& split);

/// Empirical second-moment matrix of n noise draws at fixed w (n >= 1000).
Eigen::MatrixXd estimate_noise_covariance(const GradientOracle& oracle, const Eigen::VectorXd& w,
                                          long long n, RngStream& rng);

/// One-sided fit of the fourth-moment bound E|s|^4 <= beta4 |grad|^4 + sigma4.
struct NoiseMomentFit {
    double beta4_hat = 0.0;
    double sigma4_hat = 0.0;
    struct Probe {
        double grad_norm_sq;
        double m2;        // empirical E|s|^2
        double m4;        // empirical E|s|^4
        double m4_se;     // standard error of m4
        double bound4;    // fitted beta4 g^4 + sigma4
        double residual;  // bound4 - m4 (>= 0 by construction)
    };
    std::vector<Probe> probes;
    /// Whether sqrt(beta4) |grad|^2 + sqrt(sigma4) dominates every empirical
    /// second moment within 3 standard errors.
    bool second_moment_ok = true;
};

NoiseMomentFit fit_noise_moments(const GradientOracle& oracle,
                                 const std::vector<Eigen::VectorXd>& probe_points,
                                 long long n_per_point, RngStream& rng);

enum class CovProbeFlag { Ok, ConstantCovariance, Inconclusive };

/// Log-log regression of |R(x) - R(y)| against |x - y| over point pairs.
/// Pairs whose covariance difference is indistinguishable from estimation
/// noise (split-half null) are excluded from the regression; when none are
/// significant the covariance is flagged constant.
struct CovLipschitzFit {
    double beta_r_hat = 0.0;  // one-sided envelope constant
    double gamma_hat = 0.0;   // fitted exponent
    CovProbeFlag flag = CovProbeFlag::Inconclusive;
    struct PairSample {
        double distance;
        double cov_diff;  // spectral norm of covariance difference
        double null_scale;
        bool significant;
    };
    std::vector<PairSample> pairs;
};

CovLipschitzFit covariance_lipschitz_probe(
    const GradientOracle& oracle, const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& point_pairs,
    long long n, RngStream& rng);

/// ceil( log(2 M sigma_sq/sigma_l_sq + 1) / log(1 + 2 mu tau) ), at least 1.
/// The lower-order correction inside the logarithm is taken as zero.
long long predict_escape_time(int dimension, double sigma_sq, double sigma_l_sq, double mu,
                              double tau);

/// Escape measurement for one trajectory. The anchor is the first recorded
/// point classified H; escape happens at the first later recorded index whose
/// region is not H and whose cost lies below
///   cost(anchor) - (mu/4) M sigma_sq.
/// The basin is the sign of the displacement from the anchor projected onto
/// the most-negative eigenvector at the anchor.
struct EscapeOutcome {
    bool entered_h = false;
    long long anchor_index = -1;   // recorded index of the anchor
    bool escaped = false;
    long long escape_index = -1;   // steps after the anchor
    bool censored = false;
    int basin = 0;                 // +1 / -1, 0 when not escaped
    double cost_at_escape = 0.0;
};

EscapeOutcome measure_escape(const Trajectory& traj, const CostModel& model,
                             const ClassifierParams& params);

/// Like measure_escape but reports entered_h = false instead of throwing when
/// the trajectory never reaches H.
EscapeOutcome try_measure_escape(const Trajectory& traj, const CostModel& model,
                                 const ClassifierParams& params);

/// Seeded ensemble of runs from `start` with escape statistics. Runs execute
/// in parallel on per-replica streams; aggregation is by seed order.
struct EscapeReport {
    long long predicted_is = 0;
    std::vector<EscapeOutcome> outcomes;
    double median_escape = 0.0;  // +inf when at least half the runs censored
    double q1 = 0.0;
    double q3 = 0.0;
    double censor_rate = 0.0;
    double positive_basin_rate = 0.0;  // among escaped runs
};

EscapeReport run_escape_ensemble(const CostModel& model, const GradientOracle& oracle,
                                 const ClassifierParams& params, const Eigen::VectorXd& start,
                                 long long horizon, long long n_seeds, std::uint64_t root_seed);

/// Axis-aligned sampling box for conditional verification.
struct SampleBox {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
};

/// Monte Carlo check of the one-step descent/ascent inequality conditioned on
/// a region: for G, mean(J(w+) - J(w)) <= -mu^2 c2/pi + 3 se; for M, <= +mu^2
/// c2 + 3 se. Points are rejection-sampled from the box.
struct DescentReport {
    Region region;
    double mean_delta = 0.0;
    double stderr_mean = 0.0;
    double bound = 0.0;
    long long n = 0;
    bool inconclusive = false;  // sampler starved
    bool premise_ok = true;     // mu <= 2/(delta (1+beta^2))
    bool passed = false;
};

DescentReport verify_descent(const CostModel& model, const GradientOracle& oracle,
                             const ClassifierParams& params, Region region, long long n_trials,
                             const SampleBox& box, std::uint64_t seed);

/// Evaluates ((1+mu d)^k / (1-mu d)^(k-1))^(T/mu) against its small-step
/// limit exp((2k-1) T d).
struct LimitingRatio {
    double value;
    double limit;
    double rel_error;
};

LimitingRatio limiting_ratio(double mu, double delta, int k, double T);

/// Aggregate-bound check: with probability 1 - pi the iterate reaches M
/// within (J(w0) - J_floor) / (mu^2 c2 pi) * i_s iterations. Measures first
/// M-hitting times over seeds and compares their (1-pi)-quantile to the bound.
struct FinalBoundReport {
    bool premise_ok = false;     // model bounded below and mu small enough
    double bound = 0.0;          // allowed iterations
    long long i_s = 0;
    double quantile_hit = 0.0;   // (1-pi) quantile of hitting times
    long long n_censored = 0;
    std::vector<double> hitting_times;  // +inf when censored at the horizon
    bool passed = false;
};

FinalBoundReport verify_final_bound(const CostModel& model, const GradientOracle& oracle,
                                    const ClassifierParams& params, double sigma_l_sq,
                                    const Eigen::VectorXd& w0, long long n_seeds,
                                    long long horizon_cap, std::uint64_t root_seed);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Quantile of a sample by linear interpolation; +inf entries sort last.
double sample_quantile(std::vector<double> values, double q);

}  // namespace sscope
