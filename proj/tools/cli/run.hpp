#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace circdyn::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunOutput {
    Json result;
    std::string csv; // table dump, empty when the experiment has none
};

// Computes the experiment's result block. Deterministic for a fixed Config.
RunOutput run_experiment(const Config& config);

// Full report: config echo, versions, seed, result, timing.
Json make_report(const Config& config, const Json& result, double seconds);

// Entry point behind the executable. Exit codes: 0 ok, 1 domain error,
// 2 config error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace circdyn::cli
