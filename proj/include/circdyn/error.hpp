#pragma once

#include <stdexcept>
#include <string>

namespace circdyn {

// Domain error raised by library operations. `code` is a stable
// machine-readable tag ("covering relation violated", ...) that the CLI
// copies into its error record; `what()` carries the human detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(detail.empty() ? code : code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Malformed input descriptors (bad matrix, non-monotone breakpoints,
// unknown config keys). Mapped to exit status 2 by the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace circdyn
