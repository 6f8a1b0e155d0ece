#include "cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "circdyn/error.hpp"
#include "circdyn/presets.hpp"

namespace circdyn::cli {

namespace {

// Integers built in code are signed even when nonnegative.
bool nonnegative_integer(const Json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Element kinds for arrays whose default is empty.
const std::map<std::string, std::string>& element_kinds() {
    static const std::map<std::string, std::string> kinds = {
        {"weights", "number"}, {"words", "string"}, {"radii", "integer"}, {"seeds", "number"}, {"combination", "object"}};
    return kinds;
}

std::string type_name(const Json& j) {
    if (j.is_number_integer()) return "integer";
    if (j.is_number()) return "number";
    if (j.is_string()) return "string";
    if (j.is_boolean()) return "boolean";
    if (j.is_array()) return "array";
    if (j.is_object()) return "object";
    return "null";
}

bool matches(const std::string& want, const Json& j) {
    if (want == "number") return j.is_number();
    if (want == "integer") return j.is_number_integer();
    return type_name(j) == want;
}

void require_object(const Json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key " + where + "." + key);
    }
}

double number_at(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + "." + key + " is required");
    if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

Json matrix_at(const Json& g, const std::string& where) {
    if (!g.contains("matrix")) throw ConfigError(where + ".matrix is required");
    const Json& m = g.at("matrix");
    if (!m.is_array() || m.size() != 4 || !std::all_of(m.begin(), m.end(), [](const Json& v) { return v.is_number(); })) {
        throw ConfigError(where + ".matrix must be four numbers [a, b, c, d]");
    }
    return m;
}

Json normalize_generator(const Json& g, std::size_t index) {
    const std::string where = "action.generators[" + std::to_string(index) + "]";
    require_object(g, where);
    if (!g.contains("kind") || !g.at("kind").is_string()) throw ConfigError(where + ".kind must be a string");
    const std::string kind = g.at("kind").get<std::string>();
    Json out;
    out["label"] = g.contains("label") ? g.at("label") : Json("g" + std::to_string(index));
    if (!out["label"].is_string()) throw ConfigError(where + ".label must be a string");
    const std::string label = out["label"].get<std::string>();
    if (label.empty() || label == "e" || label.find_first_of(" ^") != std::string::npos) {
        throw ConfigError(where + ".label must be nonempty, not 'e', without spaces or '^'");
    }
    out["kind"] = kind;
    if (kind == "rotation") {
        reject_unknown(g, {"label", "kind", "angle"}, where);
        out["angle"] = number_at(g, "angle", where);
    } else if (kind == "moebius") {
        reject_unknown(g, {"label", "kind", "matrix"}, where);
        out["matrix"] = matrix_at(g, where);
    } else if (kind == "cover") {
        reject_unknown(g, {"label", "kind", "matrix", "k", "germ"}, where);
        out["matrix"] = matrix_at(g, where);
        if (!g.contains("k") || !g.at("k").is_number_integer() || g.at("k").get<int>() < 1) {
            throw ConfigError(where + ".k must be a positive integer");
        }
        out["k"] = g.at("k");
        out["germ"] = g.contains("germ") ? g.at("germ") : Json(0);
        if (!out["germ"].is_number_integer()) throw ConfigError(where + ".germ must be an integer");
    } else if (kind == "pl") {
        reject_unknown(g, {"label", "kind", "breakpoints"}, where);
        if (!g.contains("breakpoints") || !g.at("breakpoints").is_array()) {
            throw ConfigError(where + ".breakpoints must be an array of [x, y] pairs");
        }
        for (const auto& bp : g.at("breakpoints")) {
            if (!bp.is_array() || bp.size() != 2 || !bp[0].is_number() || !bp[1].is_number()) {
                throw ConfigError(where + ".breakpoints must be an array of [x, y] pairs");
            }
        }
        out["breakpoints"] = g.at("breakpoints");
    } else if (kind == "identity") {
        reject_unknown(g, {"label", "kind"}, where);
    } else {
        throw ConfigError(where + ".kind must be rotation, moebius, cover, pl or identity");
    }
    return out;
}

Homeo generator_map(const Json& g) {
    const std::string kind = g.at("kind").get<std::string>();
    auto matrix = [&] {
        const Json& m = g.at("matrix");
        return Matrix2{m[0].get<double>(), m[1].get<double>(), m[2].get<double>(), m[3].get<double>()};
    };
    if (kind == "rotation") return Homeo::rotation(g.at("angle").get<double>());
    if (kind == "moebius") return Homeo::moebius(matrix());
    if (kind == "cover") return Homeo(Lift::cyclic_cover(matrix(), g.at("k").get<int>(), g.at("germ").get<std::int64_t>()));
    if (kind == "pl") {
        std::vector<std::pair<double, double>> bps;
        for (const auto& bp : g.at("breakpoints")) bps.emplace_back(bp[0].get<double>(), bp[1].get<double>());
        return Homeo(Lift::piecewise_linear(bps));
    }
    return Homeo::identity();
}

Json normalize_combination(const Json& entries) {
    Json out = Json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string where = "params.combination[" + std::to_string(i) + "]";
        const Json& e = entries[i];
        require_object(e, where);
        reject_unknown(e, {"action", "coefficient"}, where);
        if (!e.contains("action")) throw ConfigError(where + ".action is required");
        if (!e.contains("coefficient") || !e.at("coefficient").is_number_integer()) {
            throw ConfigError(where + ".coefficient must be an integer");
        }
        out.push_back({{"action", normalize_action(e.at("action"))}, {"coefficient", e.at("coefficient")}});
    }
    return out;
}

Json normalize_params(const std::string& experiment, const Json& given) {
    Json params = default_params(experiment);
    require_object(given, "params");
    for (const auto& [key, value] : given.items()) {
        if (!params.contains(key)) throw ConfigError("unknown key params." + key + " for " + experiment);
        const Json& def = params.at(key);
        const std::string want = def.is_number_integer() ? "integer" : def.is_number() ? "number" : type_name(def);
        if (!matches(want, value)) throw ConfigError("params." + key + " must be of type " + want);
        if (def.is_number_unsigned() && value.get<std::int64_t>() < 0) {
            throw ConfigError("params." + key + " must be nonnegative");
        }
        if (value.is_array()) {
            const std::string elem = def.empty() ? element_kinds().at(key) : type_name(def[0]);
            for (const auto& v : value) {
                if (!matches(elem, v)) throw ConfigError("params." + key + " entries must be of type " + elem);
            }
        }
        params[key] = key == "combination" ? normalize_combination(value) : value;
    }
    return params;
}

} // namespace

std::vector<std::string> experiments() {
    return {"classify", "cocycle", "rotnum", "theta", "proximal", "reconstruct", "norm"};
}

Json default_params(const std::string& experiment) {
    if (experiment == "classify") {
        const ClassifyParams p;
        return {{"grid", p.grid},
                {"radius", p.radius},
                {"resolution", p.resolution},
                {"seeds", p.seeds},
                {"eps_orbit", p.eps_orbit},
                {"max_finite_orbit", p.max_finite_orbit},
                {"gap_min_cells", p.gap_min_cells}};
    }
    if (experiment == "cocycle") return {{"radius", 2}, {"audit_pairs", 1000u}, {"audit_length", 4}};
    if (experiment == "rotnum") return {{"words", Json::array()}, {"iterations", 100000u}};
    if (experiment == "theta") {
        const ThetaParams p;
        return {{"radius", p.radius},
                {"samples", p.samples},
                {"refine_iterations", p.refine_iterations},
                {"order_tol", p.order_tol},
                {"max_order", p.max_order},
                {"quotient", true},
                {"compare_preset", ""}};
    }
    if (experiment == "proximal") {
        return {{"walk_length", 60},        {"sample_count", 200u}, {"dirac_tol", 1e-3},
                {"weights", Json::array()}, {"nu_atoms", 64u},      {"stability", true},
                {"include_samples", false}};
    }
    if (experiment == "reconstruct") {
        return {{"sample_count", 4000u},         {"walk_length", 300},      {"move_tol", 1e-4},
                {"coverage_min", 0.5},           {"translates", "gap_fill"}, {"audit_tuples", 10000u},
                {"word_length", 3},              {"rotation_iterations", 100000u},
                {"grid", 512u},                  {"base_candidates", 8u},   {"graph_slack", 0.02}};
    }
    if (experiment == "norm") {
        return {{"radii", {1, 2, 3}}, {"primary_coefficient", 1}, {"combination", Json::array()}};
    }
    throw ConfigError("unknown experiment: " + experiment);
}

Json normalize_action(const Json& action) {
    require_object(action, "action");
    reject_unknown(action, {"preset", "generators"}, "action");
    if (action.contains("preset") == action.contains("generators")) {
        throw ConfigError("action needs exactly one of preset or generators");
    }
    Json out;
    if (action.contains("preset")) {
        if (!action.at("preset").is_string()) throw ConfigError("action.preset must be a string");
        const auto name = action.at("preset").get<std::string>();
        const auto names = presets::names();
        if (std::find(names.begin(), names.end(), name) == names.end()) throw ConfigError("unknown preset: " + name);
        out["preset"] = name;
        return out;
    }
    const Json& gens = action.at("generators");
    if (!gens.is_array() || gens.empty()) throw ConfigError("action.generators must be a nonempty array");
    out["generators"] = Json::array();
    std::set<std::string> labels;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        Json g = normalize_generator(gens[i], i);
        if (!labels.insert(g["label"].get<std::string>()).second) throw ConfigError("duplicate generator label");
        out["generators"].push_back(std::move(g));
    }
    build_action(out); // surfaces invalid matrices and breakpoints now
    return out;
}

ActionSpec build_action(const Json& action) {
    if (action.contains("preset")) return presets::by_name(action.at("preset").get<std::string>());
    std::vector<ActionSpec::Generator> gens;
    for (const auto& g : action.at("generators")) gens.push_back({g.at("label").get<std::string>(), generator_map(g)});
    return ActionSpec(std::move(gens));
}

Config parse_config(const Json& j) {
    require_object(j, "config");
    reject_unknown(j, {"schema_version", "experiment", "action", "seed", "workers", "params", "out", "csv"}, "config");
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer()) {
        throw ConfigError("config.schema_version is required");
    }
    Config c;
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != kSchemaVersion) {
        throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version));
    }
    if (!j.contains("experiment") || !j.at("experiment").is_string()) throw ConfigError("config.experiment is required");
    c.experiment = j.at("experiment").get<std::string>();
    const auto ex = experiments();
    if (std::find(ex.begin(), ex.end(), c.experiment) == ex.end()) {
        throw ConfigError("unknown experiment: " + c.experiment);
    }
    if (!j.contains("action")) throw ConfigError("config.action is required");
    c.action = normalize_action(j.at("action"));
    if (j.contains("seed")) {
        if (!nonnegative_integer(j.at("seed"))) throw ConfigError("config.seed must be a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("workers")) {
        if (!nonnegative_integer(j.at("workers")) || j.at("workers").get<std::uint64_t>() == 0) {
            throw ConfigError("config.workers must be a positive integer");
        }
        c.workers = j.at("workers").get<unsigned>();
    }
    c.params = normalize_params(c.experiment, j.contains("params") ? j.at("params") : Json::object());
    for (const char* key : {"out", "csv"}) {
        if (!j.contains(key)) continue;
        if (!j.at(key).is_string()) throw ConfigError(std::string("config.") + key + " must be a string");
    }
    c.out = j.value("out", "");
    c.csv = j.value("csv", "");
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

Json to_json(const Config& c) {
    return {{"schema_version", c.schema_version},
            {"experiment", c.experiment},
            {"action", c.action},
            {"seed", c.seed},
            {"workers", c.workers},
            {"params", c.params},
            {"out", c.out},
            {"csv", c.csv}};
}

} // namespace circdyn::cli
