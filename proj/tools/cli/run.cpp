#include "cli/run.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "circdyn/boundary.hpp"
#include "circdyn/cocycle_lab.hpp"
#include "circdyn/error.hpp"
#include "circdyn/norm_lp.hpp"
#include "circdyn/presets.hpp"
#include "circdyn/rng.hpp"

namespace circdyn::cli {

namespace {

template <class T>
T get(const Json& params, const char* key) {
    return params.at(key).get<T>();
}

template <class T>
T positive(const Json& params, const char* key) {
    const auto v = params.at(key).get<std::int64_t>();
    if (v <= 0) throw ConfigError(std::string("params.") + key + " must be positive");
    return static_cast<T>(v);
}

Json arc_json(const Arc& a) { return Json::array({a.left.value(), a.right.value()}); }

Json labels_json(const ActionSpec& spec) { return spec.labels(); }

RunOutput run_classify(const Config& c, const ActionSpec& spec) {
    ClassifyParams p;
    p.grid = positive<std::size_t>(c.params, "grid");
    p.radius = positive<int>(c.params, "radius");
    p.resolution = get<std::size_t>(c.params, "resolution");
    p.seeds = get<std::vector<double>>(c.params, "seeds");
    if (p.seeds.empty()) throw ConfigError("params.seeds must not be empty");
    p.eps_orbit = get<double>(c.params, "eps_orbit");
    p.max_finite_orbit = positive<std::size_t>(c.params, "max_finite_orbit");
    p.gap_min_cells = positive<std::size_t>(c.params, "gap_min_cells");

    const Classification cls = classify(spec, p);
    Json gaps = Json::array();
    for (const auto& g : cls.gaps) {
        gaps.push_back({{"first_cell", g.first_cell}, {"cells", g.cells}, {"arc", arc_json(g.arc(p.grid))}});
    }
    Json runs = Json::array();
    for (const auto& r : cls.evidence.runs) {
        runs.push_back({{"seed", r.seed}, {"radius", r.radius}, {"occupied", r.occupied}, {"largest_gap", r.largest_gap}});
    }
    RunOutput out;
    out.result = {{"kind", to_string(cls.kind)},
                  {"size", cls.orbit_size},
                  {"gaps", gaps},
                  {"evidence",
                   {{"radius_low", cls.evidence.radius_low},
                    {"radius_high", cls.evidence.radius_high},
                    {"runs", runs},
                    {"finite_orbit_sizes", cls.evidence.finite_orbit_sizes},
                    {"candidates_tested", cls.evidence.candidates_tested}}}};
    return out;
}

Word random_word(std::mt19937_64& rng, std::size_t generators, int max_length) {
    const auto length = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(max_length) + 1));
    std::vector<Letter> letters;
    while (static_cast<int>(letters.size()) < length) {
        const Letter l{static_cast<std::uint32_t>(uniform_index(rng, generators)),
                       static_cast<std::int8_t>(uniform_index(rng, 2) == 0 ? 1 : -1)};
        if (!letters.empty() && letters.back() == l.inverse()) continue;
        letters.push_back(l);
    }
    return Word(std::move(letters));
}

RunOutput run_cocycle(const Config& c, const ActionSpec& spec) {
    const int radius = positive<int>(c.params, "radius");
    const auto audit_pairs = get<std::size_t>(c.params, "audit_pairs");
    const int audit_length = positive<int>(c.params, "audit_length");

    const WordTree tree = WordTree::build(spec.generator_count(), radius);
    std::vector<Word> words;
    std::vector<Homeo> maps;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        words.push_back(tree.word(i));
        maps.push_back(spec.evaluate(words.back()));
    }
    Json table = Json::array();
    std::ostringstream csv;
    csv << "g,h,c,orient\n";
    std::size_t identity_failures_in_ball = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (std::size_t j = 0; j < words.size(); ++j) {
            const int value = euler_cocycle(maps[i], maps[j]);
            const int o = orient(0.0, maps[i](0.0), compose(maps[i], maps[j])(0.0));
            identity_failures_in_ball += euler_orientation_residual(maps[i], maps[j]) != 0;
            const std::string g = words[i].to_string(spec.labels()), h = words[j].to_string(spec.labels());
            table.push_back({{"g", g}, {"h", h}, {"c", value}, {"orient", o}});
            csv << g << ',' << h << ',' << value << ',' << o << '\n';
        }
    }

    // Random words beyond the ball: cocycle identity and Euler-orientation residual.
    std::size_t identity_failures = 0, residual_failures = 0;
    for (std::size_t t = 0; t < audit_pairs; ++t) {
        auto rng = stream_engine(c.seed, t);
        const Homeo f = spec.evaluate(random_word(rng, spec.generator_count(), audit_length));
        const Homeo g = spec.evaluate(random_word(rng, spec.generator_count(), audit_length));
        const Homeo h = spec.evaluate(random_word(rng, spec.generator_count(), audit_length));
        const int defect = euler_cocycle(g, h) - euler_cocycle(compose(f, g), h) + euler_cocycle(f, compose(g, h)) -
                           euler_cocycle(f, g);
        identity_failures += defect != 0;
        residual_failures += euler_orientation_residual(f, g) != 0;
    }
    RunOutput out;
    out.result = {{"labels", labels_json(spec)},
                  {"radius", radius},
                  {"table", table},
                  {"ball_residual_failures", identity_failures_in_ball},
                  {"audit", {{"pairs", audit_pairs}, {"identity_failures", identity_failures}, {"residual_failures", residual_failures}}}};
    out.csv = csv.str();
    return out;
}

RunOutput run_rotnum(const Config& c, const ActionSpec& spec) {
    auto texts = get<std::vector<std::string>>(c.params, "words");
    if (texts.empty()) texts = spec.labels();
    const auto iterations = positive<std::int64_t>(c.params, "iterations");
    std::vector<Word> words;
    for (const auto& t : texts) words.push_back(Word::parse(t, spec.labels()));
    Json rows = Json::array();
    for (std::size_t i = 0; i < words.size(); ++i) {
        const RotationNumber r = rotation_number(spec.evaluate(words[i]), iterations);
        rows.push_back({{"word", texts[i]}, {"rotation_number", r.value}, {"error_bound", r.error_bound}});
    }
    RunOutput out;
    out.result = {{"iterations", iterations}, {"rotation_numbers", rows}};
    return out;
}

RunOutput run_theta(const Config& c, const ActionSpec& spec) {
    ThetaParams p;
    p.radius = positive<int>(c.params, "radius");
    p.samples = positive<std::size_t>(c.params, "samples");
    p.refine_iterations = get<int>(c.params, "refine_iterations");
    p.order_tol = get<double>(c.params, "order_tol");
    p.max_order = positive<int>(c.params, "max_order");
    const bool quotient = get<bool>(c.params, "quotient");
    const auto compare = get<std::string>(c.params, "compare_preset");
    std::optional<ActionSpec> base;
    if (!compare.empty()) {
        base = presets::by_name(compare);
        if (base->generator_count() != spec.generator_count()) {
            throw ConfigError("compare_preset must have as many generators as the action");
        }
    }

    const ThetaResult r = detect_theta(spec, p);
    const Homeo rot = r.order > 1 ? Homeo::rotation(1.0 / r.order) : Homeo::identity();
    double commute = 0.0;
    for (const auto& g : spec.generators()) {
        commute = std::max(commute, sup_distance(compose(r.theta, g.map), compose(g.map, r.theta), p.grid));
    }
    RunOutput out;
    out.result = {{"order", r.order},
                  {"period_residual", r.period_residual},
                  {"refine_passes", r.refine_passes},
                  {"distance_to_rotation", sup_distance(r.theta, rot, p.grid)},
                  {"commute_distance", commute}};
    std::ostringstream csv;
    csv << "x,theta\n";
    for (const auto& [x, y] : r.samples) csv << x << ',' << y << '\n';
    out.csv = csv.str();
    if (!quotient || r.order == 1) return out;

    const ProximalQuotient q = proximal_quotient(spec, r.order, r.theta);
    double worst_contraction = 0.0;
    bool all_contract = true;
    for (double len : {0.1, 0.5, 0.9}) {
        for (int j = 0; j < 16; ++j) {
            const double a = j / 16.0;
            const Contraction ct = contracts(q.quotient, Arc::open(a, a + len), 8);
            all_contract = all_contract && ct.contracts;
            worst_contraction = std::max(worst_contraction, ct.min_length);
        }
    }
    Json qj = {{"alpha", q.alpha}, {"arcs_contract", all_contract}, {"worst_min_length", worst_contraction}};
    if (base) {
        Json d = Json::array();
        for (std::size_t i = 0; i < spec.generator_count(); ++i) {
            d.push_back(sup_distance(q.quotient.generators()[i].map, base->generators()[i].map, p.grid));
        }
        qj["distance_to_" + compare] = d;
    }
    out.result["quotient"] = qj;
    return out;
}

RunOutput run_proximal(const Config& c, const ActionSpec& spec) {
    WalkConfig cfg;
    cfg.walk_length = positive<int>(c.params, "walk_length");
    cfg.sample_count = positive<std::size_t>(c.params, "sample_count");
    cfg.dirac_tol = get<double>(c.params, "dirac_tol");
    cfg.weights = get<std::vector<double>>(c.params, "weights");
    cfg.seed = c.seed;
    cfg.record_diameters = false;
    cfg.resolved_weights(spec.letters().size());
    const auto atoms = positive<std::size_t>(c.params, "nu_atoms");
    const bool stability = get<bool>(c.params, "stability");
    const bool include_samples = get<bool>(c.params, "include_samples");

    const EmpiricalMeasure nu = EmpiricalMeasure::uniform_grid(atoms);
    const ProximalitySummary s = proximality_experiment(spec, cfg, nu, c.workers);
    RunOutput out;
    out.result = {{"fraction_converged", s.fraction_converged},
                  {"fraction_two_cluster", s.fraction_two_cluster},
                  {"median_final_diameter", s.median_final_diameter}};
    if (stability) {
        std::vector<Word> extra;
        for (const auto& l : spec.letters()) extra.push_back(Word({l}));
        double worst = 0.0;
        std::size_t checked = 0;
        for (const auto& sample : s.samples) {
            if (!sample.converged) continue;
            worst = std::max(worst, stability_check(sample, spec, extra, nu));
            ++checked;
        }
        out.result["stability"] = {{"checked", checked}, {"max_deviation", worst}};
    }
    std::ostringstream csv;
    csv << "id,converged,limit_point,final_diameter\n";
    Json samples = Json::array();
    for (const auto& sample : s.samples) {
        csv << sample.id << ',' << sample.converged << ',' << sample.limit_point.value() << ','
            << sample.final_diameter << '\n';
        if (include_samples) {
            samples.push_back({{"id", sample.id},
                               {"converged", sample.converged},
                               {"limit_point", sample.limit_point.value()},
                               {"final_diameter", sample.final_diameter}});
        }
    }
    if (include_samples) out.result["samples"] = samples;
    out.csv = csv.str();
    return out;
}

RunOutput run_reconstruct(const Config& c, const ActionSpec& spec) {
    RoundTripParams p;
    p.boundary.sample_count = positive<std::size_t>(c.params, "sample_count");
    p.boundary.walk_length = positive<int>(c.params, "walk_length");
    p.boundary.seed = c.seed;
    p.boundary.move_tol = get<double>(c.params, "move_tol");
    p.boundary.coverage_min = get<double>(c.params, "coverage_min");
    const auto translates = get<std::string>(c.params, "translates");
    if (translates == "none") {
        p.boundary.translates = Translates::none;
    } else if (translates == "letters") {
        p.boundary.translates = Translates::letters;
    } else if (translates == "gap_fill") {
        p.boundary.translates = Translates::gap_fill;
    } else {
        throw ConfigError("params.translates must be none, letters or gap_fill");
    }
    p.audit.tuples = positive<std::size_t>(c.params, "audit_tuples");
    p.audit.seed = c.seed;
    p.rebuild.seed = c.seed;
    p.rebuild.graph_slack = get<double>(c.params, "graph_slack");
    p.word_length = positive<int>(c.params, "word_length");
    p.rotation_iterations = positive<std::int64_t>(c.params, "rotation_iterations");
    p.grid = positive<std::size_t>(c.params, "grid");
    p.base_candidates = positive<std::size_t>(c.params, "base_candidates");
    p.workers = c.workers;

    const RoundTripReport r = round_trip(spec, p);
    Json audits = Json::array();
    bool audits_pass = true;
    for (const auto& a : r.audits) {
        audits.push_back({{"name", a.name}, {"checked", a.checked}, {"failures", a.failures}, {"skipped", a.skipped}});
        audits_pass = audits_pass && a.passed();
    }
    RunOutput out;
    out.result = {{"labels", labels_json(spec)},
                  {"samples", r.samples},
                  {"base_point", r.base_point},
                  {"coverage", r.coverage},
                  {"audits", audits},
                  {"audits_pass", audits_pass},
                  {"collision_fraction", r.collision_fraction},
                  {"rectified_max_gap", r.rectified_max_gap},
                  {"generator_distance", r.generator_distance},
                  {"sup_distance", r.max_generator_distance},
                  {"euler_match", r.euler_match},
                  {"euler_mismatches", r.euler_mismatches},
                  {"max_rotation_error", r.max_rotation_error},
                  {"worst_rotation_word", r.worst_rotation_word}};
    std::ostringstream csv;
    csv.precision(17);
    csv << "id,phi\n";
    for (std::size_t i = 0; i < r.phi.size(); ++i) csv << i << ',' << r.phi[i] << '\n';
    out.csv = csv.str();
    return out;
}

RunOutput run_norm(const Config& c, const ActionSpec& spec) {
    auto radii = get<std::vector<int>>(c.params, "radii");
    if (radii.empty()) throw ConfigError("params.radii must not be empty");
    for (int r : radii) {
        if (r < 1) throw ConfigError("params.radii entries must be at least 1");
    }
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    const int primary = get<int>(c.params, "primary_coefficient");
    std::vector<ActionSpec> others;
    std::vector<int> coefficients = {primary};
    for (const auto& e : c.params.at("combination")) {
        others.push_back(build_action(e.at("action")));
        coefficients.push_back(e.at("coefficient").get<int>());
    }

    constexpr double kCapSlack = 1e-9;
    Json sweep = Json::array(), combo = Json::array();
    bool monotone = true, capped = true, combo_monotone = true;
    double previous = -1.0, previous_combo = -1.0;
    std::ostringstream csv;
    csv << "g,h,c\n";
    for (int radius : radii) {
        const CocycleTable table = build_table(spec, radius);
        const NormBound b = solve_norm_lp(table);
        monotone = monotone && b.lower_bound + kCapSlack >= previous;
        capped = capped && b.lower_bound <= 0.5 + kCapSlack;
        previous = b.lower_bound;
        sweep.push_back({{"radius", radius},
                         {"ball_size", table.size()},
                         {"merged", table.merged},
                         {"pairs", b.pairs},
                         {"lower_bound", b.lower_bound},
                         {"certificate_excess", b.certificate_excess}});
        if (radius == radii.back()) {
            const auto names = table.word_strings();
            for (std::size_t g = 0; g < table.size(); ++g) {
                for (std::size_t h = 0; h < table.size(); ++h) {
                    if (table.mult(g, h) >= 0) csv << names[g] << ',' << names[h] << ',' << table.value(g, h) << '\n';
                }
            }
        }
        if (others.empty()) continue;
        std::vector<CocycleTable> tables = {table};
        for (const auto& o : others) tables.push_back(build_table(o, radius));
        const NormBound cb = norm_of_combination(tables, coefficients);
        combo_monotone = combo_monotone && cb.lower_bound + kCapSlack >= previous_combo;
        previous_combo = cb.lower_bound;
        combo.push_back({{"radius", radius}, {"lower_bound", cb.lower_bound}, {"certificate_excess", cb.certificate_excess}});
    }
    RunOutput out;
    out.result = {{"sweep", sweep}, {"nondecreasing", monotone}, {"within_half", capped}};
    if (!others.empty()) {
        out.result["combination"] = {{"coefficients", coefficients}, {"sweep", combo}, {"nondecreasing", combo_monotone}};
    }
    out.csv = csv.str();
    return out;
}

Json versions() {
    return {{"circdyn", kVersion}, {"config_schema", kSchemaVersion}, {"report_schema", 1}};
}

Json error_record(const std::string& kind, const std::string& code, const std::string& message) {
    return {{"status", "error"}, {"versions", versions()}, {"error", {{"kind", kind}, {"code", code}, {"message", message}}}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
}

} // namespace

RunOutput run_experiment(const Config& config) {
    const ActionSpec spec = build_action(config.action);
    const std::string& e = config.experiment;
    try {
        if (e == "classify") return run_classify(config, spec);
        if (e == "cocycle") return run_cocycle(config, spec);
        if (e == "rotnum") return run_rotnum(config, spec);
        if (e == "theta") return run_theta(config, spec);
        if (e == "proximal") return run_proximal(config, spec);
        if (e == "reconstruct") return run_reconstruct(config, spec);
        if (e == "norm") return run_norm(config, spec);
    } catch (const Json::exception& ex) {
        throw ConfigError(std::string("malformed params: ") + ex.what());
    }
    throw ConfigError("unknown experiment: " + e);
}

Json make_report(const Config& config, const Json& result, double seconds) {
    return {{"status", "ok"},
            {"experiment", config.experiment},
            {"versions", versions()},
            {"seed", config.seed},
            {"config", to_json(config)},
            {"result", result},
            {"timing", {{"seconds", seconds}}}};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Circle actions, bounded Euler classes and boundary reconstruction"};
    app.require_subcommand(1);
    std::string config_path, out_path;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    for (const auto& name : experiments()) {
        CLI::App* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--out", out_path, "Report path (default stdout)");
        sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        out << error_record("config", "usage", e.what()).dump(2) << '\n';
        err << e.what() << '\n';
        return 2;
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();

    try {
        Config config = load_config(config_path);
        if (config.experiment != subcommand) {
            throw ConfigError("config experiment '" + config.experiment + "' does not match subcommand '" + subcommand + "'");
        }
        if (app.get_subcommands().front()->count("--seed") > 0) config.seed = seed;
        if (workers > 0) config.workers = workers;
        if (!out_path.empty()) config.out = out_path;

        const auto t0 = std::chrono::steady_clock::now();
        const RunOutput run = run_experiment(config);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const std::string report = make_report(config, run.result, seconds).dump(2) + "\n";
        if (config.out.empty()) {
            out << report;
        } else {
            write_text(config.out, report);
        }
        if (!config.csv.empty() && !run.csv.empty()) write_text(config.csv, run.csv);
        return 0;
    } catch (const ConfigError& e) {
        out << error_record("config", "config error", e.what()).dump(2) << '\n';
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        out << error_record("domain", e.code(), e.what()).dump(2) << '\n';
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace circdyn::cli
