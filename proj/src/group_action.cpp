#include "circdyn/group_action.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "circdyn/error.hpp"

namespace circdyn {

Word::Word(std::vector<Letter> letters) {
    letters_.reserve(letters.size());
    for (const auto& l : letters) {
        if (l.exponent != 1 && l.exponent != -1) throw ConfigError("word letters must have exponent +1 or -1");
        if (!letters_.empty() && letters_.back() == l.inverse()) {
            letters_.pop_back();
        } else {
            letters_.push_back(l);
        }
    }
}

Word Word::inverse() const {
    std::vector<Letter> inv;
    inv.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) inv.push_back(it->inverse());
    return Word(std::move(inv));
}

Word operator*(const Word& u, const Word& v) {
    std::vector<Letter> all = u.letters_;
    all.insert(all.end(), v.letters_.begin(), v.letters_.end());
    return Word(std::move(all));
}

std::string Word::to_string(const std::vector<std::string>& labels) const {
    if (letters_.empty()) return "e";
    std::string out;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i) out += ' ';
        out += labels.at(letters_[i].generator);
        if (letters_[i].exponent < 0) out += "^-1";
    }
    return out;
}

Word Word::parse(const std::string& text, const std::vector<std::string>& labels) {
    std::istringstream in(text);
    std::string token;
    std::vector<Letter> letters;
    while (in >> token) {
        std::int8_t exp = 1;
        const std::string suffix = "^-1";
        if (token.size() > suffix.size() && token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0) {
            exp = -1;
            token.resize(token.size() - suffix.size());
        }
        auto it = std::find(labels.begin(), labels.end(), token);
        if (it == labels.end()) {
            if (token == "e" && exp == 1) continue;
            throw ConfigError("unknown generator label in word: " + token);
        }
        letters.push_back({static_cast<std::uint32_t>(it - labels.begin()), exp});
    }
    return Word(std::move(letters));
}

ActionSpec::ActionSpec(std::vector<Generator> generators) : generators_(std::move(generators)) {
    std::set<std::string> seen;
    for (const auto& g : generators_) {
        if (g.label.empty() || g.label == "e") throw ConfigError("generator label must be nonempty and not 'e'");
        if (g.label.find_first_of(" \t^") != std::string::npos) {
            throw ConfigError("generator label must not contain spaces or '^': " + g.label);
        }
        if (!seen.insert(g.label).second) throw ConfigError("duplicate generator label: " + g.label);
        inverses_.push_back(g.map.inverse());
        labels_.push_back(g.label);
    }
}

std::vector<Letter> ActionSpec::letters() const {
    std::vector<Letter> out;
    for (std::uint32_t i = 0; i < generators_.size(); ++i) {
        out.push_back({i, 1});
        out.push_back({i, -1});
    }
    return out;
}

Homeo ActionSpec::evaluate(const Word& w) const {
    Homeo result;
    for (const auto& l : w.letters()) result = compose(result, letter_map(l));
    return result;
}

double ActionSpec::apply(const Word& w, double x) const {
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) x = letter_map(*it)(x);
    return x;
}

std::uint64_t ball_size(std::size_t generators, int radius) {
    if (radius <= 0 || generators == 0) return 1;
    const std::uint64_t branching = 2 * generators - 1;
    std::uint64_t total = 1, level = 2 * generators;
    for (int r = 1; r <= radius; ++r) {
        total += level;
        if (total > (std::uint64_t{1} << 62)) return total;
        level *= branching;
    }
    return total;
}

Word WordTree::word(std::size_t node) const {
    std::vector<Letter> ls;
    for (std::int32_t i = static_cast<std::int32_t>(node); i > 0; i = parent[i]) ls.push_back(letter[i]);
    return Word(std::move(ls));
}

WordTree WordTree::build(std::size_t generators, int radius, std::size_t cap) {
    if (radius < 0) throw ConfigError("radius must be nonnegative");
    const std::uint64_t count = ball_size(generators, radius);
    if (count > cap) {
        throw Error("orbit explosion", std::to_string(count) + " words at radius " + std::to_string(radius) +
                                           " exceed the cap of " + std::to_string(cap));
    }
    WordTree t;
    t.parent.reserve(count);
    t.letter.reserve(count);
    t.depth.reserve(count);
    t.parent.push_back(-1);
    t.letter.push_back({});
    t.depth.push_back(0);
    std::size_t level_begin = 0, level_end = 1;
    for (int d = 1; d <= radius; ++d) {
        for (std::size_t node = level_begin; node < level_end; ++node) {
            for (std::uint32_t g = 0; g < generators; ++g) {
                for (std::int8_t e : {std::int8_t{1}, std::int8_t{-1}}) {
                    Letter s{g, e};
                    if (node != 0 && t.letter[node] == s.inverse()) continue;
                    t.parent.push_back(static_cast<std::int32_t>(node));
                    t.letter.push_back(s);
                    t.depth.push_back(static_cast<std::uint16_t>(d));
                }
            }
        }
        level_begin = level_end;
        level_end = t.parent.size();
    }
    return t;
}

std::vector<double> propagate(const ActionSpec& spec, const WordTree& tree, double x) {
    std::vector<double> pts(tree.size());
    pts[0] = wrap01(x);
    for (std::size_t i = 1; i < tree.size(); ++i) pts[i] = spec.letter_map(tree.letter[i])(pts[tree.parent[i]]);
    return pts;
}

double apply_inverse(const ActionSpec& spec, const WordTree& tree, std::size_t node, double q) {
    for (std::int32_t i = static_cast<std::int32_t>(node); i > 0; i = tree.parent[i]) {
        q = spec.letter_map(tree.letter[i].inverse())(q);
    }
    return q;
}

Arc Gap::arc(std::size_t grid) const {
    const double g = static_cast<double>(grid);
    return Arc::left_closed(static_cast<double>(first_cell) / g, static_cast<double>(first_cell + cells) / g);
}

std::size_t OrbitClosure::occupied_count() const {
    return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), true));
}

std::size_t OrbitClosure::largest_gap() const {
    std::size_t best = 0;
    for (const auto& g : gaps) best = std::max(best, g.cells);
    return best;
}

namespace {

std::vector<Gap> empty_runs(const std::vector<bool>& occupied) {
    const std::size_t n = occupied.size();
    std::vector<Gap> gaps;
    auto first_full = std::find(occupied.begin(), occupied.end(), true);
    if (first_full == occupied.end()) {
        gaps.push_back({0, n});
        return gaps;
    }
    const std::size_t start = static_cast<std::size_t>(first_full - occupied.begin());
    std::size_t i = 0;
    while (i < n) {
        std::size_t cell = (start + i) % n;
        if (occupied[cell]) {
            ++i;
            continue;
        }
        std::size_t run = 0;
        while (i < n && !occupied[(start + i) % n]) {
            ++run;
            ++i;
        }
        gaps.push_back({cell, run});
    }
    std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) { return a.first_cell < b.first_cell; });
    return gaps;
}

std::size_t cell_of(double x, std::size_t grid) {
    auto c = static_cast<std::size_t>(wrap01(x) * static_cast<double>(grid));
    return std::min(c, grid - 1);
}

} // namespace

OrbitClosure orbit_closure(const ActionSpec& spec, CirclePoint seed, int radius, std::size_t grid,
                           std::size_t resolution, std::size_t cap) {
    if (radius < 1) throw ConfigError("orbit closure radius must be at least 1");
    if (grid == 0) throw ConfigError("grid must be positive");
    const auto letters = spec.letters();
    OrbitClosure oc;
    oc.grid = grid;
    oc.occupied.assign(grid, false);

    std::vector<bool> fine(resolution, false);
    std::unordered_set<std::int64_t> keys;
    const double key_scale = 1.0 / kEpsOrbit;
    const auto key_count = static_cast<std::int64_t>(std::llround(key_scale));
    // True when y is new; marks it as known.
    auto admit = [&](double y) {
        if (resolution > 0) {
            const std::size_t c = cell_of(y, resolution);
            if (fine[c]) return false;
            fine[c] = true;
            return true;
        }
        const std::int64_t k = std::llround(y * key_scale) % key_count;
        for (std::int64_t d : {-1, 0, 1}) {
            if (keys.count((k + d + key_count) % key_count)) return false;
        }
        keys.insert(k);
        return true;
    };

    std::vector<double> frontier{seed.value()}, next;
    admit(seed.value());
    oc.occupied[cell_of(seed.value(), grid)] = true;
    oc.points = 1;
    for (int d = 1; d <= radius && !frontier.empty(); ++d) {
        next.clear();
        for (double x : frontier) {
            for (const auto& l : letters) {
                const double y = wrap01(spec.letter_map(l)(x));
                if (!admit(y)) continue;
                if (++oc.points > cap) {
                    throw Error("orbit explosion", "more than " + std::to_string(cap) + " orbit points by length " +
                                                       std::to_string(d));
                }
                oc.occupied[cell_of(y, grid)] = true;
                next.push_back(y);
            }
        }
        frontier.swap(next);
        oc.depth = d;
    }
    oc.gaps = empty_runs(oc.occupied);
    return oc;
}

std::string to_string(Classification::Kind kind) {
    switch (kind) {
    case Classification::Kind::FiniteOrbit:
        return "FiniteOrbit";
    case Classification::Kind::Minimal:
        return "Minimal";
    case Classification::Kind::ExceptionalMinimal:
        return "ExceptionalMinimal";
    }
    return "?";
}

std::optional<std::vector<double>> finite_orbit(const ActionSpec& spec, double x, std::size_t max_size, double eps) {
    std::vector<double> orbit{wrap01(x)};
    const auto letters = spec.letters();
    for (std::size_t next = 0; next < orbit.size(); ++next) {
        for (const auto& l : letters) {
            const double y = spec.letter_map(l)(orbit[next]);
            bool known = false;
            for (double p : orbit) {
                if (coincide(p, y, eps)) {
                    known = true;
                    break;
                }
            }
            if (known) continue;
            if (orbit.size() == max_size) return std::nullopt;
            orbit.push_back(y);
        }
    }
    // Points creeping toward an attractor merge at eps but not at eps / 100.
    const double strict = eps / 100.0;
    for (double p : orbit) {
        for (const auto& l : letters) {
            const double y = spec.letter_map(l)(p);
            if (std::none_of(orbit.begin(), orbit.end(), [&](double q) { return coincide(q, y, strict); })) {
                return std::nullopt;
            }
        }
    }
    std::sort(orbit.begin(), orbit.end());
    return orbit;
}

std::vector<double> fixed_points(const Homeo& f, std::size_t grid, double tol) {
    auto displacement = [&](double x) {
        double d = wrap01(f(x) - x);
        return d >= 0.5 ? d - 1.0 : d;
    };
    std::vector<double> absd(grid);
    for (std::size_t i = 0; i < grid; ++i) absd[i] = std::abs(displacement(static_cast<double>(i) / grid));
    std::vector<double> roots;
    const double step = 1.0 / static_cast<double>(grid);
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t i = 0; i < grid; ++i) {
        const double here = absd[i];
        if (here > absd[(i + grid - 1) % grid] || here > absd[(i + 1) % grid]) continue;
        double lo = static_cast<double>(i) * step - step, hi = static_cast<double>(i) * step + step;
        auto fa = [&](double x) { return std::abs(displacement(x)); };
        double a = hi - golden * (hi - lo), b = lo + golden * (hi - lo);
        double va = fa(a), vb = fa(b);
        for (int it = 0; it < 80; ++it) {
            if (va < vb) {
                hi = b;
                b = a;
                vb = va;
                a = hi - golden * (hi - lo);
                va = fa(a);
            } else {
                lo = a;
                a = b;
                va = vb;
                b = lo + golden * (hi - lo);
                vb = fa(b);
            }
        }
        double best = va < vb ? a : b;
        if (here <= fa(best)) best = static_cast<double>(i) * step;
        if (fa(best) > tol) continue;
        best = wrap01(best);
        bool dup = false;
        for (double r : roots) dup = dup || coincide(r, best, 1e-7);
        if (!dup) roots.push_back(best);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

Classification classify(const ActionSpec& spec, const ClassifyParams& params) {
    if (params.grid == 0 || params.seeds.empty()) throw ConfigError("classify needs a positive grid and seeds");
    Classification result;
    ClassifyEvidence& ev = result.evidence;

    // Finite orbits: seeds plus fixed points of short words.
    std::vector<double> candidates = params.seeds;
    std::size_t tree_radius = spec.generator_count() > 0 ? 2 : 0;
    const WordTree short_words = WordTree::build(spec.generator_count(), static_cast<int>(tree_radius), params.cap);
    for (std::size_t node = 1; node < short_words.size(); ++node) {
        const Homeo w = spec.evaluate(short_words.word(node));
        if (sup_distance(w, Homeo::identity(), 64) < 1e-9) continue;
        auto pts = fixed_points(w);
        if (pts.size() > 16) pts.resize(16);
        candidates.insert(candidates.end(), pts.begin(), pts.end());
    }
    ev.candidates_tested = candidates.size();
    for (double c : candidates) {
        if (auto orbit = finite_orbit(spec, c, params.max_finite_orbit, params.eps_orbit)) {
            ev.finite_orbit_sizes.push_back(orbit->size());
        }
    }
    if (!ev.finite_orbit_sizes.empty()) {
        const auto [lo, hi] = std::minmax_element(ev.finite_orbit_sizes.begin(), ev.finite_orbit_sizes.end());
        if (*lo != *hi) {
            throw Error("inconclusive", "finite orbits of different sizes " + std::to_string(*lo) + " and " +
                                            std::to_string(*hi));
        }
        result.kind = Classification::Kind::FiniteOrbit;
        result.orbit_size = *lo;
        return result;
    }

    if (params.radius < 1) throw ConfigError("classify radius must be at least 1");
    const int high = params.radius;
    const int low = std::max(1, high / 2);
    ev.radius_low = low;
    ev.radius_high = high;

    bool all_full = true, all_gapped = true;
    std::vector<bool> empty_everywhere(params.grid, true);
    for (int radius : {low, high}) {
        for (double seed : params.seeds) {
            const OrbitClosure oc = orbit_closure(spec, CirclePoint(seed), radius, params.grid, params.resolution, params.cap);
            ev.runs.push_back({seed, radius, oc.occupied_count(), oc.largest_gap()});
            all_full = all_full && oc.occupied_count() == params.grid;
            all_gapped = all_gapped && oc.largest_gap() >= params.gap_min_cells;
            if (radius == high) {
                for (std::size_t i = 0; i < params.grid; ++i) empty_everywhere[i] = empty_everywhere[i] && !oc.occupied[i];
            }
        }
    }
    if (all_full) {
        result.kind = Classification::Kind::Minimal;
        return result;
    }
    if (all_gapped) {
        std::vector<bool> occupied_somewhere(params.grid);
        for (std::size_t i = 0; i < params.grid; ++i) occupied_somewhere[i] = !empty_everywhere[i];
        for (const auto& g : empty_runs(occupied_somewhere)) {
            if (g.cells >= params.gap_min_cells) result.gaps.push_back(g);
        }
        if (!result.gaps.empty()) {
            result.kind = Classification::Kind::ExceptionalMinimal;
            return result;
        }
    }
    std::ostringstream msg;
    msg << "occupancy evidence is mixed at radii " << low << "/" << high << ": ";
    for (const auto& r : ev.runs) msg << "[seed " << r.seed << " r" << r.radius << " occ " << r.occupied << " gap " << r.largest_gap << "] ";
    throw Error("inconclusive", msg.str());
}

Contraction contracts(const ActionSpec& spec, const Arc& arc, int radius, double tol, std::size_t cap) {
    const double len = arc.length();
    if (arc.left.same_as(arc.right) || !(len > 0.0) || !(len < 1.0)) {
        throw Error("arc not proper", "contraction needs an arc of length strictly between 0 and 1");
    }
    const WordTree tree = WordTree::build(spec.generator_count(), radius, cap);
    const auto left = propagate(spec, tree, arc.left.value());
    const auto right = propagate(spec, tree, arc.right.value());
    Contraction out;
    std::size_t best = 0;
    out.min_length = len;
    for (std::size_t i = 1; i < tree.size(); ++i) {
        const double l = wrap01(right[i] - left[i]);
        if (l < out.min_length) {
            out.min_length = l;
            best = i;
        }
    }
    out.witness = tree.word(best);
    out.contracts = out.min_length < tol;
    return out;
}

double maximal_contractible_length(const ActionSpec& spec, const WordTree& tree, double x, double tol) {
    const auto images = propagate(spec, tree, x);
    double best = tol;
    for (std::size_t i = 1; i < tree.size(); ++i) {
        // Both endpoints go through the same lifts, so the difference is the
        // arc length without wrapping ambiguity.
        double lo = images[i], hi = images[i] + tol;
        for (std::int32_t k = static_cast<std::int32_t>(i); k > 0; k = tree.parent[k]) {
            const Lift& back = spec.letter_map(tree.letter[k].inverse()).canonical_lift();
            lo = back(lo);
            hi = back(hi);
        }
        best = std::max(best, std::min(1.0, hi - lo));
    }
    return best;
}

ThetaResult detect_theta(const ActionSpec& spec, const ThetaParams& params) {
    Classification cls;
    try {
        cls = classify(spec, params.classify);
    } catch (const Error& e) {
        throw Error("precondition", std::string("classification failed: ") + e.what());
    }
    if (cls.kind != Classification::Kind::Minimal) {
        throw Error("precondition", "theta detection needs a minimal action, got " + to_string(cls.kind));
    }
    const WordTree tree = WordTree::build(spec.generator_count(), params.radius, params.cap);
    const std::size_t n = params.samples;
    const double nd = static_cast<double>(n);
    std::vector<double> len(n);
    for (std::size_t j = 0; j < n; ++j) len[j] = maximal_contractible_length(spec, tree, j / nd, params.contract_tol);

    // If [s x, z) contracts then so does [x, s^{-1} z). The endpoint theta(s x)
    // is interpolated from the neighbouring samples.
    const auto letters = spec.letters();
    constexpr double kStep = 1e-9;
    ThetaResult out;
    for (int it = 0; it < params.refine_iterations; ++it) {
        double gain = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = j / nd;
            for (const auto& l : letters) {
                const double y = wrap01(spec.letter_map(l)(x));
                const std::size_t i = std::min(n - 1, static_cast<std::size_t>(y * nd));
                const double t = y * nd - static_cast<double>(i);
                const double lo = i / nd + len[i];
                const double hi = (i + 1) / nd + len[(i + 1) % n];
                const double end = lo + t * (hi - lo);
                if (!(end > y)) continue;
                const Lift& back = spec.letter_map(l.inverse()).canonical_lift();
                const double cand = back(end) - back(y);
                // Gains below the step are roundoff, which the expanding
                // directions would otherwise amplify pass after pass.
                if (cand > len[j] + kStep) {
                    gain = std::max(gain, std::min(1.0, cand) - len[j]);
                    len[j] = std::min(1.0, cand);
                }
            }
        }
        // [x_{j+1}, x_j + L_j) is a tail of a contractible arc.
        for (std::size_t pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < n; ++j) {
                const double tail = len[j] - 1.0 / nd;
                double& next = len[(j + 1) % n];
                if (tail > next + kStep) {
                    gain = std::max(gain, tail - next);
                    next = tail;
                }
            }
        }
        out.refine_passes = it + 1;
        if (gain == 0.0) break;
    }
    bool unbounded = false;
    for (std::size_t j = 0; j < n; ++j) {
        unbounded = unbounded || len[j] > 2.0 * params.contract_tol;
        out.samples.emplace_back(j / nd, wrap01(j / nd + len[j]));
    }
    if (!unbounded) throw Error("precondition", "no arc contracts at the working radius; action looks bounded");
    out.theta = piecewise_linear_through(out.samples);
    Homeo iterate;
    for (int k = 1; k <= params.max_order; ++k) {
        iterate = compose(out.theta, iterate);
        const double residual = sup_distance(iterate, Homeo::identity(), params.grid);
        if (residual < params.order_tol) {
            out.order = k;
            out.period_residual = residual;
            return out;
        }
    }
    throw Error("theta not periodic within tolerance",
                "no order up to " + std::to_string(params.max_order) + " within " + std::to_string(params.order_tol));
}

ProximalQuotient proximal_quotient(const ActionSpec& spec, int k, const Homeo& theta, const QuotientParams& params) {
    if (k < 1) throw ConfigError("quotient order must be positive");
    // theta-orbit average of uniform atoms.
    std::vector<Atom> atoms;
    atoms.reserve(params.measure_atoms * static_cast<std::size_t>(k));
    const double w = 1.0 / (static_cast<double>(params.measure_atoms) * k);
    for (std::size_t i = 0; i < params.measure_atoms; ++i) {
        double p = (static_cast<double>(i) + 0.5) / static_cast<double>(params.measure_atoms);
        for (int j = 0; j < k; ++j) {
            atoms.push_back({CirclePoint(p), w});
            p = theta(p);
        }
    }
    const EmpiricalMeasure mu = EmpiricalMeasure::normalized(std::move(atoms));
    std::vector<std::pair<double, double>> graph;
    graph.reserve(mu.size());
    double mass = 0.0;
    // Each atom sits at the midpoint of its own jump.
    for (const auto& a : mu.atoms()) {
        graph.emplace_back(a.point.value(), mass + 0.5 * a.weight);
        mass += a.weight;
    }
    ProximalQuotient out;
    out.k = k;
    out.conjugacy = piecewise_linear_through(std::move(graph));
    const Homeo h_inv = out.conjugacy.inverse();

    std::vector<ActionSpec::Generator> conj, quot;
    const double kd = k;
    for (const auto& g : spec.generators()) {
        const Homeo gc = compose(out.conjugacy, compose(g.map, h_inv));
        std::vector<std::pair<double, double>> pts;
        pts.reserve(params.fit_points);
        for (std::size_t i = 0; i < params.fit_points; ++i) {
            const double y = static_cast<double>(i) / static_cast<double>(params.fit_points);
            pts.emplace_back(y, wrap01(kd * gc(y / kd)));
        }
        Homeo q;
        try {
            q = piecewise_linear_through(std::move(pts));
        } catch (const Error& e) {
            throw Error("quotient inconsistent", g.label + ": " + e.what());
        }
        try {
            out.alpha.push_back(cover_alpha(gc, q, k, {params.check_grid, params.cover_tolerance}));
        } catch (const Error& e) {
            throw Error("quotient inconsistent", g.label + ": " + e.what());
        }
        conj.push_back({g.label, gc});
        quot.push_back({g.label, q});
    }
    out.conjugated = ActionSpec(std::move(conj));
    out.quotient = ActionSpec(std::move(quot));
    return out;
}

} // namespace circdyn
