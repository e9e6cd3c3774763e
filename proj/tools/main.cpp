#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sscope/commands.hpp"
#include "sscope/config.hpp"
#include "sscope/errors.hpp"

namespace {

sscope::ExperimentConfig load_config_or_exit(const std::string& path, int& rc) {
    try {
        rc = 0;
        return sscope::ExperimentConfig::from_file(path);
    } catch (const sscope::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        rc = sscope::kExitBadConfig;
    } catch (const sscope::ContractViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        rc = sscope::kExitBadConfig;
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"saddle-scope: stochastic-gradient saddle-escape experiments"};
    app.require_subcommand(1);

    std::string config_path, out_path, suite = "all";
    std::vector<double> mu_list;
    std::optional<long long> seeds;
    std::optional<std::uint64_t> seed_flag;

    auto* run_cmd = app.add_subcommand("run", "run one trajectory and write its CSV");
    run_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    run_cmd->add_option("--out", out_path, "output CSV path")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "escape statistics across step sizes");
    sweep_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    sweep_cmd->add_option("--out", out_path, "output CSV path")->required();
    sweep_cmd->add_option("--mu-list", mu_list, "step sizes (comma separated)")->delimiter(',');
    sweep_cmd->add_option("--seeds", seeds, "seeds per step size");

    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->add_option("--config", config_path, "experiment config JSON (optional, seed only)");
    verify_cmd->add_option("--out", out_path, "output JSON path")->required();
    verify_cmd->add_option("--suite", suite, "descent|deviation|limits|escape|final|all");
    verify_cmd->add_option("--seed", seed_flag, "root seed override");

    auto* surface_cmd = app.add_subcommand("surface", "cost/region grid for plotting");
    surface_cmd->add_option("--config", config_path, "experiment config JSON")->required();
    surface_cmd->add_option("--out", out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : sscope::kExitBadConfig;
    }

    if (run_cmd->parsed()) {
        int rc = 0;
        auto cfg = load_config_or_exit(config_path, rc);
        if (rc != 0) return rc;
        return sscope::cmd_run(cfg, out_path);
    }
    if (sweep_cmd->parsed()) {
        int rc = 0;
        auto cfg = load_config_or_exit(config_path, rc);
        if (rc != 0) return rc;
        return sscope::cmd_sweep(cfg, mu_list, seeds, out_path);
    }
    if (verify_cmd->parsed()) {
        std::uint64_t root = sscope::default_seed_root();
        if (!config_path.empty()) {
            int rc = 0;
            auto cfg = load_config_or_exit(config_path, rc);
            if (rc != 0) return rc;
            if (cfg.has_run) root = cfg.run.seed;
        }
        if (seed_flag) root = *seed_flag;
        return sscope::cmd_verify(suite, root, out_path);
    }
    if (surface_cmd->parsed()) {
        int rc = 0;
        auto cfg = load_config_or_exit(config_path, rc);
        if (rc != 0) return rc;
        return sscope::cmd_surface(cfg, out_path);
    }
    return sscope::kExitBadConfig;
}
