#pragma once

#include <stdexcept>
#include <string>

namespace upg {

// Error categories surfaced across the C API boundary and mapped to CLI
// exit codes. Keep the numeric values stable; they are part of the ABI.
enum class ErrorCode : int {
    invalid_argument = 1,
    parse = 2,
    not_planar = 3,
    not_biconnected = 4,
    horizon_exhausted = 5,
    unknown_oracle = 6,
    guard_exceeded = 7,
    io = 8,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

} // namespace upg
