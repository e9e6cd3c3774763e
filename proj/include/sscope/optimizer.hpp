#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sscope/oracles.hpp"
#include "sscope/problems.hpp"

namespace sscope {

struct RunConfig {
    double step_size = 0.01;      // mu
    long long horizon = 1000;
    std::uint64_t seed = 0;
    long long record_stride = 1;
    /// When set, the run ends normally once |w| exceeds this radius (the
    /// stopping iterate is recorded). Used by escape ensembles on costs that
    /// are unbounded below; unrelated to the divergence guard at 1e6.
    std::optional<double> stop_radius;
};

/// Recorded iterates of one constant-step run. Replaying the same seed and
/// inputs reproduces the trajectory bit for bit.
struct Trajectory {
    std::vector<long long> indices;
    std::vector<Eigen::VectorXd> iterates;
    std::vector<double> costs;
    std::vector<double> grad_norm_sq;
    /// Squared norm of the gradient noise of the step leading into each
    /// recorded iterate (0 for the initial point). Diagnostic only.
    std::vector<double> noise_norm_sq;
    std::uint64_t seed = 0;
    RunConfig config;

    std::size_t size() const { return indices.size(); }
};

/// Runs w <- w - mu * estimate(w). Throws DivergedError when an iterate
/// becomes non-finite or leaves |w| <= 1e6, carrying the last finite index.
Trajectory run(const CostModel& model, const GradientOracle& oracle, const Eigen::VectorXd& w0,
               const RunConfig& config);

/// A trajectory coupled with its frozen-Hessian short-term model. Both
/// recursions start at the anchor and consume the same noise realization each
/// step, drawn at the true iterate; deviations record |w_j - w'_j|^2 per step.
/// The gap is propagated directly through
///   gap_{j+1} = (I - mu H(anchor)) gap_j - mu e_j,
/// where e_j is the gradient linearization error at the true iterate. On
/// constant-Hessian models e_j is exactly zero and so is every deviation.
struct CoupledPair {
    Trajectory true_traj;
    Trajectory model_traj;
    Eigen::VectorXd anchor;
    std::vector<double> deviation_sq;  // per recorded step, starts at exactly 0
};

CoupledPair run_coupled(const CostModel& model, const GradientOracle& oracle,
                        const Eigen::VectorXd& anchor, long long horizon, double step_size,
                        std::uint64_t seed);

/// Ensemble means per step of |w_j - anchor|^order for the true trajectories
/// (order in {2, 3, 4}) and of the coupled squared deviation.
struct DeviationMoments {
    std::vector<double> anchor_moment;
    std::vector<double> coupling_gap_sq;
};

DeviationMoments deviation_moments(const std::vector<CoupledPair>& ensemble, int order);

/// Optional region annotation for trajectory CSV output.
using RegionAnnotator = std::function<char(const Eigen::VectorXd& w, double grad_sq)>;

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          const RegionAnnotator& annotate = nullptr);
void write_coupled_csv(const CoupledPair& pair, const std::string& path,
                       const RegionAnnotator& annotate = nullptr);

}  // namespace sscope
