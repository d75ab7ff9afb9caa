#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pansde {

/// Failure categories surfaced by the toolkit. The CLI maps these to exit
/// codes (config -> 2, numerical -> 3).
enum class ErrorCode {
    InvalidArgument,
    ConfigError,
    ImplicitDiverged,
    StepTooLarge,
    NonfiniteState,
    NoRealRoot,
    ZeroError,
    ReferenceGap,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

/// Absolute tolerance used to identify two time points on a mesh (and to snap
/// Brownian sample times). Scales with the horizon so long runs keep headroom
/// over accumulated rounding.
inline double time_snap_tolerance(double horizon) {
    return 1e-12 * std::max(1.0, horizon);
}

inline bool nearly_equal_time(double s, double t, double tol) {
    return std::abs(s - t) <= tol;
}

}  // namespace pansde
