#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sscope/config.hpp"

namespace sscope {

/// Exit codes shared by the CLI:
///   0 success, 2 invalid config/arguments, 3 divergence, 4 verify failures.
enum ExitCode : int {
    kExitOk = 0,
    kExitBadConfig = 2,
    kExitDiverged = 3,
    kExitVerifyFailed = 4,
};

int cmd_run(const ExperimentConfig& config, const std::string& out_path);
int cmd_sweep(const ExperimentConfig& config, const std::vector<double>& mu_override,
              std::optional<long long> seeds_override, const std::string& out_path);
int cmd_verify(const std::string& suite, std::uint64_t root_seed, const std::string& out_path);
int cmd_surface(const ExperimentConfig& config, const std::string& out_path);

}  // namespace sscope
