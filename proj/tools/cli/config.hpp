#pragma once

#include <cstdint>
#include <string>

#include "circdyn/group_action.hpp"
#include "json.hpp"

namespace circdyn::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Parsed and normalized run configuration. `action` and `params` are kept
// as normalized JSON: every key present, defaults filled in, so the echo
// in a report parses back to an equal Config.
struct Config {
    int schema_version = kSchemaVersion;
    std::string experiment;
    Json action;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    Json params;
    std::string out; // report path; empty writes to stdout
    std::string csv; // optional table dump

    bool operator==(const Config&) const = default;
};

std::vector<std::string> experiments();

// Defaults for the experiment's params block.
Json default_params(const std::string& experiment);

// Validates and normalizes. Throws ConfigError on unknown keys, wrong
// types, unknown experiments or presets, and invalid generator data.
Config parse_config(const Json& j);
Config load_config(const std::string& path);
Json to_json(const Config& c);

// Normalized action descriptor: {"preset": name} or {"generators": [...]}.
Json normalize_action(const Json& action);
ActionSpec build_action(const Json& action);

} // namespace circdyn::cli
