#pragma once

#include <stdexcept>
#include <string>

namespace sscope {

/// Thrown when a caller violates a documented precondition.
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterate overflows or leaves the guarded region during a run.
struct DivergedError : std::runtime_error {
    long long last_finite_index;

    DivergedError(const std::string& msg, long long idx)
        : std::runtime_error(msg), last_finite_index(idx) {}
};

/// Thrown on malformed or out-of-schema configuration documents.
/// The message carries a $.path.to.field prefix.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sscope
