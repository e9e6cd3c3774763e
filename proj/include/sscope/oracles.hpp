#pragma once

#include <optional>

#include <Eigen/Dense>
#include <json.hpp>

#include "sscope/problems.hpp"
#include "sscope/rng.hpp"

namespace sscope {

/// Update-direction constructions. Every kind produces a conditionally
/// zero-mean gradient noise at fixed w; Exact produces zero noise identically.
enum class OracleKind {
    Exact,                // true gradient
    Stochastic,           // minibatch mean of per-sample gradients
    PerturbedExact,       // true gradient + isotropic Gaussian
    PerturbedStochastic,  // minibatch mean + isotropic Gaussian
    TargetedStochastic,   // minibatch mean + scalar Gaussian along a fixed direction
};

const char* oracle_kind_name(OracleKind kind);
OracleKind oracle_kind_from_name(const std::string& name);

struct OracleConfig {
    OracleKind kind = OracleKind::Exact;
    double perturbation_std = 1.0;               // sigma_v
    std::optional<Eigen::VectorXd> direction;    // unit vector, targeted kind only
    int minibatch = 1;
    std::optional<double> gate_threshold;        // targeted noise applied only when
                                                 // |stochastic estimate|^2 < threshold

    nlohmann::json to_json() const;
    static OracleConfig from_json(const nlohmann::json& j, const std::string& path = "$.oracle");
};

/// A gradient estimate together with the noise it induces.
/// direction + noise reconstructs the true gradient.
struct GradientEstimate {
    Eigen::VectorXd direction;  // the update direction, i.e. the estimate of grad J(w)
    Eigen::VectorXd noise;      // grad J(w) - direction
};

/// Immutable descriptor of one update-direction construction over a model.
/// Draw order per step is fixed: data samples first, perturbation second, so
/// streams replay identically and coupled runs can share realizations.
class GradientOracle {
public:
    GradientOracle(OracleConfig config, const CostModel& model);

    const OracleConfig& config() const { return config_; }
    const CostModel& model() const { return *model_; }

    /// Draws the update direction only (no true-gradient evaluation).
    Eigen::VectorXd draw_direction(const Eigen::VectorXd& w, RngStream& rng) const;

    /// Draws the direction and computes the induced noise.
    GradientEstimate estimate(const Eigen::VectorXd& w, RngStream& rng) const;

private:
    OracleConfig config_;
    const CostModel* model_;
};

/// Sample mean of n independent noise draws at fixed w (n >= 1000).
Eigen::VectorXd noise_mean_check(const GradientOracle& oracle, const Eigen::VectorXd& w,
                                 long long n, RngStream& rng);

}  // namespace sscope
