#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace sscope {

/// One verification check outcome. `note` is "skipped-premise" when the
/// theorem premise did not hold (counted as neither pass nor fail) and may
/// carry short context otherwise.
struct CheckReport {
    std::string check;
    bool passed = false;
    double statistic = 0.0;
    double threshold = 0.0;
    double stderr_stat = 0.0;
    long long n = 0;
    std::vector<std::uint64_t> seeds;
    std::string note;

    bool skipped() const { return note == "skipped-premise"; }
};

nlohmann::json reports_to_json(const std::vector<CheckReport>& reports);

/// Runs a named verification suite with presets pinned in code.
/// Suites: descent, deviation, limits, escape, final, all.
std::vector<CheckReport> run_verify_suite(const std::string& suite, std::uint64_t root_seed);

bool is_known_suite(const std::string& suite);

}  // namespace sscope
