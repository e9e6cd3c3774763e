#include "sscope/config.hpp"

#include <cstdlib>
#include <fstream>

#include "sscope/errors.hpp"

namespace sscope {

namespace {

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known) throw ConfigError(path + "." + it.key() + ": unknown field");
    }
}

double get_number(const nlohmann::json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + "." + key + ": missing required field");
    if (!j[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

double number_or(const nlohmann::json& j, const std::string& key, double fallback,
                 const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw ConfigError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

long long integer_or(const nlohmann::json& j, const std::string& key, long long fallback,
                     const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
    return j[key].get<long long>();
}

}  // namespace

ClassifierParams ClassifierConfig::resolve(double step_size, const CostModel& model) const {
    ClassifierParams p;
    p.step_size = step_size;
    p.tau = tau;
    p.pi = pi;
    p.beta = beta;
    p.sigma_sq = sigma_sq;
    p.delta = delta.value_or(model.lipschitz_grad());
    return p;
}

std::unique_ptr<CostModel> ExperimentConfig::make_model() const {
    return model_from_json(model_json);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    check_keys(j, {"model", "oracle", "run", "init", "classifier", "surface", "sweep"}, "$");
    ExperimentConfig cfg;

    if (!j.contains("model")) throw ConfigError("$.model: missing required field");
    cfg.model_json = j["model"];
    cfg.make_model();  // validate eagerly so errors carry the right path

    if (j.contains("oracle")) cfg.oracle = OracleConfig::from_json(j["oracle"], "$.oracle");

    if (j.contains("run")) {
        const auto& r = j["run"];
        check_keys(r, {"step_size", "horizon", "seed", "record_stride"}, "$.run");
        cfg.run.step_size = get_number(r, "step_size", "$.run");
        cfg.run.horizon = integer_or(r, "horizon", cfg.run.horizon, "$.run");
        if (r.contains("seed")) {
            if (!r["seed"].is_number_integer()) throw ConfigError("$.run.seed: expected an integer");
            cfg.run.seed = r["seed"].get<std::uint64_t>();
        } else {
            cfg.run.seed = default_seed_root();
        }
        cfg.run.record_stride = integer_or(r, "record_stride", 1, "$.run");
        cfg.has_run = true;
    }

    if (j.contains("init")) {
        if (!j["init"].is_array() || j["init"].empty())
            throw ConfigError("$.init: expected a non-empty array of numbers");
        Eigen::VectorXd w(j["init"].size());
        int i = 0;
        for (const auto& v : j["init"]) {
            if (!v.is_number()) throw ConfigError("$.init: expected a non-empty array of numbers");
            w[i++] = v.get<double>();
        }
        cfg.init = std::move(w);
    }

    if (j.contains("classifier")) {
        const auto& c = j["classifier"];
        check_keys(c, {"tau", "pi", "beta", "sigma_sq", "delta", "sigma_l_sq"}, "$.classifier");
        ClassifierConfig cc;
        cc.tau = number_or(c, "tau", cc.tau, "$.classifier");
        cc.pi = number_or(c, "pi", cc.pi, "$.classifier");
        cc.beta = number_or(c, "beta", cc.beta, "$.classifier");
        cc.sigma_sq = number_or(c, "sigma_sq", cc.sigma_sq, "$.classifier");
        if (c.contains("delta") && !c["delta"].is_null())
            cc.delta = get_number(c, "delta", "$.classifier");
        if (c.contains("sigma_l_sq") && !c["sigma_l_sq"].is_null())
            cc.sigma_l_sq = get_number(c, "sigma_l_sq", "$.classifier");
        cfg.classifier = cc;
    }

    if (j.contains("surface")) {
        const auto& s = j["surface"];
        check_keys(s, {"grid_points", "w_max"}, "$.surface");
        SurfaceConfig sc;
        sc.grid_points = static_cast<int>(integer_or(s, "grid_points", sc.grid_points, "$.surface"));
        sc.w_max = number_or(s, "w_max", sc.w_max, "$.surface");
        if (sc.grid_points < 1) throw ConfigError("$.surface.grid_points: must be >= 1");
        if (sc.w_max <= 0) throw ConfigError("$.surface.w_max: must be positive");
        cfg.surface = sc;
    }

    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        check_keys(s, {"mu_list", "seeds", "horizon"}, "$.sweep");
        SweepConfig sw;
        if (s.contains("mu_list")) {
            if (!s["mu_list"].is_array()) throw ConfigError("$.sweep.mu_list: expected an array");
            for (const auto& v : s["mu_list"]) {
                if (!v.is_number() || v.get<double>() <= 0)
                    throw ConfigError("$.sweep.mu_list: expected positive numbers");
                sw.mu_list.push_back(v.get<double>());
            }
        }
        sw.seeds = integer_or(s, "seeds", sw.seeds, "$.sweep");
        if (s.contains("horizon")) sw.horizon = integer_or(s, "horizon", 0, "$.sweep");
        cfg.sweep = sw;
    }

    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["model"] = model_json;
    if (oracle) j["oracle"] = oracle->to_json();
    if (has_run) {
        j["run"] = {{"step_size", run.step_size},
                    {"horizon", run.horizon},
                    {"seed", run.seed},
                    {"record_stride", run.record_stride}};
    }
    if (init) j["init"] = std::vector<double>(init->data(), init->data() + init->size());
    if (classifier) {
        nlohmann::json c;
        c["tau"] = classifier->tau;
        c["pi"] = classifier->pi;
        c["beta"] = classifier->beta;
        c["sigma_sq"] = classifier->sigma_sq;
        if (classifier->delta) c["delta"] = *classifier->delta;
        if (classifier->sigma_l_sq) c["sigma_l_sq"] = *classifier->sigma_l_sq;
        j["classifier"] = c;
    }
    if (surface) j["surface"] = {{"grid_points", surface->grid_points}, {"w_max", surface->w_max}};
    if (sweep) {
        nlohmann::json s;
        s["mu_list"] = sweep->mu_list;
        s["seeds"] = sweep->seeds;
        if (sweep->horizon) s["horizon"] = *sweep->horizon;
        j["sweep"] = s;
    }
    return j;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return from_json(j);
}

std::uint64_t default_seed_root() {
    const char* env = std::getenv("SADDLE_SCOPE_SEED");
    if (!env) return 0;
    return std::strtoull(env, nullptr, 10);
}

}  // namespace sscope
