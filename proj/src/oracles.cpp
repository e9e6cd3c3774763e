#include "sscope/oracles.hpp"

#include <cmath>

#include "sscope/errors.hpp"

namespace sscope {

const char* oracle_kind_name(OracleKind kind) {
    switch (kind) {
        case OracleKind::Exact: return "exact";
        case OracleKind::Stochastic: return "stochastic";
        case OracleKind::PerturbedExact: return "perturbed_exact";
        case OracleKind::PerturbedStochastic: return "perturbed_stochastic";
        case OracleKind::TargetedStochastic: return "targeted_stochastic";
    }
    return "?";
}

OracleKind oracle_kind_from_name(const std::string& name) {
    if (name == "exact") return OracleKind::Exact;
    if (name == "stochastic") return OracleKind::Stochastic;
    if (name == "perturbed_exact") return OracleKind::PerturbedExact;
    if (name == "perturbed_stochastic") return OracleKind::PerturbedStochastic;
    if (name == "targeted_stochastic") return OracleKind::TargetedStochastic;
    throw ConfigError("unknown oracle kind \"" + name + "\"");
}

nlohmann::json OracleConfig::to_json() const {
    nlohmann::json j;
    j["kind"] = oracle_kind_name(kind);
    j["perturbation_std"] = perturbation_std;
    if (direction) {
        j["direction"] = std::vector<double>(direction->data(), direction->data() + direction->size());
    } else {
        j["direction"] = nullptr;
    }
    j["minibatch"] = minibatch;
    if (gate_threshold) j["gate_threshold"] = *gate_threshold;
    else j["gate_threshold"] = nullptr;
    return j;
}

OracleConfig OracleConfig::from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "kind" && k != "perturbation_std" && k != "direction" && k != "minibatch" &&
            k != "gate_threshold") {
            throw ConfigError(path + "." + k + ": unknown field");
        }
    }
    OracleConfig cfg;
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError(path + ".kind: missing or not a string");
    cfg.kind = oracle_kind_from_name(j["kind"].get<std::string>());
    if (j.contains("perturbation_std")) {
        if (!j["perturbation_std"].is_number())
            throw ConfigError(path + ".perturbation_std: expected a number");
        cfg.perturbation_std = j["perturbation_std"].get<double>();
    }
    if (j.contains("direction") && !j["direction"].is_null()) {
        if (!j["direction"].is_array()) throw ConfigError(path + ".direction: expected an array");
        Eigen::VectorXd d(j["direction"].size());
        int i = 0;
        for (const auto& v : j["direction"]) {
            if (!v.is_number()) throw ConfigError(path + ".direction: expected an array of numbers");
            d[i++] = v.get<double>();
        }
        cfg.direction = std::move(d);
    }
    if (j.contains("minibatch")) {
        if (!j["minibatch"].is_number_integer())
            throw ConfigError(path + ".minibatch: expected an integer");
        cfg.minibatch = j["minibatch"].get<int>();
    }
    if (j.contains("gate_threshold") && !j["gate_threshold"].is_null()) {
        if (!j["gate_threshold"].is_number())
            throw ConfigError(path + ".gate_threshold: expected a number or null");
        cfg.gate_threshold = j["gate_threshold"].get<double>();
    }
    return cfg;
}

GradientOracle::GradientOracle(OracleConfig config, const CostModel& model)
    : config_(std::move(config)), model_(&model) {
    if (config_.perturbation_std < 0)
        throw ContractViolation("oracle: perturbation_std must be nonnegative");
    if (config_.minibatch < 1) throw ContractViolation("oracle: minibatch must be >= 1");
    if (config_.kind == OracleKind::TargetedStochastic) {
        if (!config_.direction)
            throw ContractViolation("oracle: targeted kind requires a direction");
        if (config_.direction->size() != model.dimension())
            throw ContractViolation("oracle: direction length does not match model dimension");
        if (std::abs(config_.direction->norm() - 1.0) > 1e-6)
            throw ContractViolation("oracle: targeted direction must be a unit vector");
    }
}

Eigen::VectorXd GradientOracle::draw_direction(const Eigen::VectorXd& w, RngStream& rng) const {
    const int m = model_->dimension();
    switch (config_.kind) {
        case OracleKind::Exact:
            return model_->gradient(w);
        case OracleKind::Stochastic: {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
            for (int b = 0; b < config_.minibatch; ++b) acc += model_->sample_gradient(w, rng);
            return acc / config_.minibatch;
        }
        case OracleKind::PerturbedExact:
            return model_->gradient(w) + rng.normal_vector(m, config_.perturbation_std);
        case OracleKind::PerturbedStochastic: {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
            for (int b = 0; b < config_.minibatch; ++b) acc += model_->sample_gradient(w, rng);
            acc /= config_.minibatch;
            return acc + rng.normal_vector(m, config_.perturbation_std);
        }
        case OracleKind::TargetedStochastic: {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
            for (int b = 0; b < config_.minibatch; ++b) acc += model_->sample_gradient(w, rng);
            acc /= config_.minibatch;
            // The scalar is always drawn so the stream layout does not depend
            // on the gate decision.
            double s = rng.normal(config_.perturbation_std);
            bool apply = !config_.gate_threshold || acc.squaredNorm() < *config_.gate_threshold;
            if (apply) acc += s * (*config_.direction);
            return acc;
        }
    }
    throw std::logic_error("unreachable oracle kind");
}

GradientEstimate GradientOracle::estimate(const Eigen::VectorXd& w, RngStream& rng) const {
    Eigen::VectorXd direction = draw_direction(w, rng);
    return GradientEstimate{direction, model_->gradient(w) - direction};
}

Eigen::VectorXd noise_mean_check(const GradientOracle& oracle, const Eigen::VectorXd& w,
                                 long long n, RngStream& rng) {
    if (n < 1000) throw ContractViolation("noise_mean_check: n must be >= 1000");
    Eigen::VectorXd grad = oracle.model().gradient(w);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(oracle.model().dimension());
    for (long long i = 0; i < n; ++i) {
        acc += grad - oracle.draw_direction(w, rng);
    }
    return acc / static_cast<double>(n);
}

}  // namespace sscope
