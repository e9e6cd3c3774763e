#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sscope/analysis.hpp"
#include "sscope/oracles.hpp"
#include "sscope/optimizer.hpp"
#include "sscope/problems.hpp"

namespace sscope {

/// Classifier block of a config document. step_size comes from the run block
/// (or the sweep grid); delta defaults to the model's certified constant.
struct ClassifierConfig {
    double tau = 0.1;
    double pi = 0.5;
    double beta = 0.0;
    double sigma_sq = 1.0;
    std::optional<double> delta;
    std::optional<double> sigma_l_sq;  // saddle noise floor, used for predictions

    ClassifierParams resolve(double step_size, const CostModel& model) const;
};

struct SurfaceConfig {
    int grid_points = 101;
    double w_max = 2.0;
};

struct SweepConfig {
    std::vector<double> mu_list;
    long long seeds = 200;
    std::optional<long long> horizon;  // per-mu default: ceil(80/mu)
};

/// One experiment document. Parsing rejects unknown keys at every level with
/// path-qualified messages, and to_json() round-trips a fully specified
/// document unchanged.
struct ExperimentConfig {
    nlohmann::json model_json;
    std::optional<OracleConfig> oracle;
    RunConfig run;
    bool has_run = false;
    std::optional<Eigen::VectorXd> init;
    std::optional<ClassifierConfig> classifier;
    std::optional<SurfaceConfig> surface;
    std::optional<SweepConfig> sweep;

    std::unique_ptr<CostModel> make_model() const;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
};

/// Default seed root: the SADDLE_SCOPE_SEED environment variable when set,
/// otherwise 0.
std::uint64_t default_seed_root();

}  // namespace sscope
