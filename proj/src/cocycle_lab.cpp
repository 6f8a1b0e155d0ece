#include "circdyn/cocycle_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <set>

#include "circdyn/error.hpp"
#include "circdyn/parallel.hpp"
#include "circdyn/rng.hpp"

namespace circdyn {

double SampledBoundary::coverage(std::size_t generator) const {
    const auto& m = moves.at(generator);
    if (m.empty()) return 0.0;
    const auto hit = std::count_if(m.begin(), m.end(), [](std::int64_t v) { return v >= 0; });
    return static_cast<double>(hit) / static_cast<double>(m.size());
}

SampledBoundary make_boundary(const ActionSpec& spec, std::vector<CirclePoint> points, double move_tol,
                              std::vector<double> weights) {
    const std::size_t n = points.size();
    if (weights.empty()) weights.assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
    if (weights.size() != n) throw ConfigError("boundary weights must match the sample count");
    SampledBoundary sb;
    sb.points = std::move(points);
    sb.weights = std::move(weights);
    sb.labels = spec.labels();
    sb.move_tol = move_tol;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sb.points[a].value() < sb.points[b].value(); });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = sb.points[order[i]].value();

    // Nearest sample to q within move_tol; ties go to the lower id.
    auto nearest = [&](double q) -> std::int64_t {
        if (n == 0) return -1;
        const std::size_t pos = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), q) - sorted.begin());
        std::int64_t best = -1;
        double best_d = move_tol;
        auto consider = [&](std::size_t idx) {
            const double d = circle_distance(sorted[idx], q);
            if (d > move_tol) return false;
            const auto id = static_cast<std::int64_t>(order[idx]);
            if (best < 0 || d < best_d || (d == best_d && id < best)) {
                best = id;
                best_d = d;
            }
            return true;
        };
        // Walk outward from the insertion point while candidates stay close.
        for (std::size_t step = 0; step < n && consider((pos + step) % n); ++step) {}
        for (std::size_t step = 1; step <= n && consider((pos + n - step) % n); ++step) {}
        return best;
    };

    sb.moves.assign(spec.generator_count(), std::vector<std::int64_t>(n, -1));
    for (std::size_t g = 0; g < spec.generator_count(); ++g) {
        const Homeo& map = spec.generators()[g].map;
        for (std::size_t id = 0; id < n; ++id) sb.moves[g][id] = nearest(map(sb.points[id].value()));
    }
    return sb;
}

namespace {

// Grows the sample set to `count` points. Each step takes the widest gap
// between circularly adjacent samples that contains a letter image of some
// sample, and adds the image closest to the middle of that gap.
std::vector<CirclePoint> fill_gaps(const ActionSpec& spec, std::vector<CirclePoint> points, std::size_t count) {
    const auto letters = spec.letters();
    std::set<double> present;
    std::multiset<double> candidates;
    auto add_images = [&](double x) {
        for (const auto& l : letters) candidates.insert(spec.letter_map(l)(x));
    };
    for (const auto& p : points) {
        present.insert(p.value());
        add_images(p.value());
    }
    // Gaps as (length, left); right is the successor of left in `present`.
    std::priority_queue<std::pair<double, double>> gaps;
    auto successor = [&](double left) {
        auto it = present.upper_bound(left);
        return it == present.end() ? *present.begin() + 1.0 : *it;
    };
    auto push_gap_at = [&](double left) { gaps.emplace(successor(left) - left, left); };
    auto containing_left = [&](double q) {
        auto it = present.upper_bound(q);
        return it == present.begin() ? *present.rbegin() : *std::prev(it);
    };
    for (double v : present) push_gap_at(v);

    // Candidate strictly inside (lo, hi), hi possibly past 1, nearest mid.
    auto best_inside = [&](double lo, double hi) -> std::optional<double> {
        const double margin = kEpsCircle, mid = 0.5 * (lo + hi);
        std::optional<double> best;
        double best_d = 2.0;
        auto scan = [&](double from, double to, double shift) {
            // Closest candidates to mid sit around lower_bound(mid - shift).
            auto it = candidates.lower_bound(std::clamp(mid - shift, from, to));
            for (auto fwd = it; fwd != candidates.end() && *fwd < to; ++fwd) {
                if (*fwd <= from) continue;
                const double d = std::abs(*fwd + shift - mid);
                if (d < best_d) best_d = d, best = *fwd;
                break;
            }
            for (auto bwd = it; bwd != candidates.begin();) {
                --bwd;
                if (*bwd <= from) break;
                if (*bwd >= to) continue;
                const double d = std::abs(*bwd + shift - mid);
                if (d < best_d) best_d = d, best = *bwd;
                break;
            }
        };
        if (hi <= 1.0) {
            scan(lo + margin, hi - margin, 0.0);
        } else {
            scan(lo + margin, 1.0, 0.0);
            scan(-1.0, hi - 1.0 - margin, 1.0);
        }
        return best;
    };

    while (points.size() < count && !gaps.empty()) {
        const auto [length, left] = gaps.top();
        gaps.pop();
        if (!present.count(left) || std::abs(successor(left) - left - length) > 0.0) continue; // stale
        const auto pick = best_inside(left, left + length);
        if (!pick) continue; // revisited when an image lands in this gap
        const double q = *pick;
        candidates.erase(candidates.find(q));
        present.insert(q);
        points.push_back(CirclePoint(q));
        auto self = present.find(q);
        push_gap_at(self == present.begin() ? *present.rbegin() : *std::prev(self));
        push_gap_at(q);
        for (const auto& l : letters) {
            const double c = spec.letter_map(l)(q);
            candidates.insert(c);
            push_gap_at(containing_left(c));
        }
    }
    return points;
}

} // namespace

SampledBoundary sample_boundary(const ActionSpec& spec, const BoundaryParams& params, unsigned workers) {
    if (params.sample_count < 3) throw ConfigError("a sampled boundary needs at least three samples");
    const auto letters = spec.letters();
    const std::size_t per_walk = params.translates == Translates::none ? 1 : 1 + letters.size();
    const std::size_t target = (params.sample_count + per_walk - 1) / per_walk;

    WalkConfig cfg;
    cfg.walk_length = params.walk_length;
    cfg.seed = params.seed;
    cfg.dirac_tol = params.dirac_tol;
    cfg.record_diameters = false;
    const EmpiricalMeasure nu = EmpiricalMeasure::uniform_grid(kDefaultNuAtoms);

    std::vector<CirclePoint> base;
    std::size_t next_id = 0;
    const std::size_t max_walks = 8 * target;
    while (base.size() < target && next_id < max_walks) {
        const std::size_t batch = std::min(target, max_walks - next_id);
        std::vector<BoundarySample> walks(batch);
        parallel_for(batch, workers, [&](std::size_t i) { walks[i] = run_walk(spec, cfg, nu, next_id + i); });
        for (const auto& w : walks) {
            if (w.converged && base.size() < target) base.push_back(w.limit_point);
        }
        next_id += batch;
    }
    if (base.size() < target) {
        throw Error("degenerate boundary", "only " + std::to_string(base.size()) + " of " + std::to_string(next_id) +
                                               " walks converged; increase walk_length");
    }

    std::vector<CirclePoint> points;
    switch (params.translates) {
    case Translates::none:
        points = std::move(base);
        break;
    case Translates::letters:
        for (const auto& p : base) {
            points.push_back(p);
            for (const auto& l : letters) points.push_back(CirclePoint(spec.letter_map(l)(p.value())));
        }
        break;
    case Translates::gap_fill:
        points = fill_gaps(spec, std::move(base), params.sample_count);
        break;
    }
    points.resize(params.sample_count);
    SampledBoundary sb = make_boundary(spec, std::move(points), params.move_tol);
    for (std::size_t g = 0; g < spec.generator_count(); ++g) {
        if (sb.coverage(g) < params.coverage_min) {
            throw Error("insufficient coverage", "generator " + sb.labels[g] + " moves " +
                                                     std::to_string(sb.coverage(g)) + " of the samples");
        }
    }
    return sb;
}

namespace {

struct Triple {
    std::size_t x, y, z;
};

// k distinct ids drawn from [0, n).
std::vector<std::size_t> distinct_ids(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> out;
    while (out.size() < k) {
        const std::size_t id = uniform_index(rng, n);
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    return out;
}

// Marks z with omega(a, z, x) = +1.
void mark_interval(const SampledCocycle& omega, std::size_t a, std::size_t x, std::vector<char>& mark) {
    mark.assign(omega.size(), 0);
    for (std::size_t z = 0; z < omega.size(); ++z) mark[z] = omega(a, z, x) == 1;
}

double interval_mass(const SampledCocycle& omega, std::size_t a, std::size_t x, const std::vector<double>& w) {
    double m = 0.0;
    for (std::size_t z = 0; z < omega.size(); ++z) {
        if (omega(a, z, x) == 1) m += w[z];
    }
    return m;
}

// Runs `check` on params.tuples independent tuples, each with its own RNG
// stream. check returns 1 pass, 0 fail, -1 skip.
template <class Check>
AuditResult run_audit(const std::string& name, const AuditParams& params, Check&& check) {
    std::vector<int> outcome(params.tuples, 0);
    parallel_for(params.tuples, params.workers, [&](std::size_t i) {
        auto rng = stream_engine(params.seed, i);
        outcome[i] = check(rng);
    });
    AuditResult r;
    r.name = name;
    for (int o : outcome) {
        if (o < 0) {
            ++r.skipped;
        } else {
            ++r.checked;
            r.failures += o == 0;
        }
    }
    return r;
}

void require_samples(const SampledCocycle& omega, std::size_t k) {
    if (omega.size() < k) throw Error("precondition", "audit needs at least " + std::to_string(k) + " samples");
}

} // namespace

SampledCocycle extract_cocycle(const SampledBoundary& sb, std::size_t audit_triples, std::uint64_t seed) {
    if (sb.size() < 3) throw Error("precondition", "cocycle extraction needs at least three samples");
    SampledCocycle omega(sb.points);
    auto rng = stream_engine(seed, 0);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < audit_triples; ++i) {
        const auto t = distinct_ids(rng, sb.size(), 3);
        flagged += omega.flagged(t[0], t[1], t[2]);
    }
    if (audit_triples > 0 && 10 * flagged > audit_triples) {
        throw Error("degenerate boundary", std::to_string(flagged) + " of " + std::to_string(audit_triples) +
                                               " audit triples lie in the coincidence band");
    }
    return omega;
}

std::vector<std::size_t> interval_set(const SampledCocycle& omega, std::size_t a, std::size_t x) {
    if (a == x) throw Error("precondition", "interval endpoints must differ");
    std::vector<std::size_t> out;
    for (std::size_t z = 0; z < omega.size(); ++z) {
        if (omega(a, z, x) == 1) out.push_back(z);
    }
    return out;
}

std::vector<double> f_a_map(const SampledCocycle& omega, std::size_t a, const std::vector<double>& weights) {
    if (weights.size() != omega.size()) throw ConfigError("weights must match the sample count");
    std::vector<double> f(omega.size(), 0.0);
    for (std::size_t x = 0; x < omega.size(); ++x) f[x] = wrap01(interval_mass(omega, a, x, weights));
    return f;
}

double collision_fraction(const std::vector<double>& f) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    const double tol = 1.0 / (4.0 * static_cast<double>(n));
    std::vector<double> s = f;
    for (double& v : s) v = wrap01(v);
    std::sort(s.begin(), s.end());
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n && s[j] - s[i] < tol; ++j) ++pairs;
    }
    // Pairs straddling 0.
    for (std::size_t i = 0; i < n && s[i] < tol; ++i) {
        for (std::size_t j = n; j-- > i + 1 && s[i] + 1.0 - s[j] < tol;) ++pairs;
    }
    return static_cast<double>(pairs) / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

std::size_t choose_base_point(const SampledCocycle& omega, const std::vector<double>& weights,
                              std::size_t candidates) {
    const std::size_t n = omega.size();
    if (n == 0) throw Error("precondition", "no samples");
    candidates = std::max<std::size_t>(1, std::min(candidates, n));
    std::size_t best = 0;
    double best_score = 2.0;
    for (std::size_t c = 0; c < candidates; ++c) {
        const std::size_t a = c * n / candidates;
        const auto f = f_a_map(omega, a, weights);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return f[i] < f[j]; });
        double cum = 0.0, score = 0.0;
        for (std::size_t i : order) {
            score = std::max(score, std::abs(cum - f[i]));
            cum += weights[i];
            score = std::max(score, std::abs(cum - f[i]));
        }
        if (score < best_score) {
            best_score = score;
            best = a;
        }
    }
    return best;
}

std::vector<double> rectify(const std::vector<double>& f, const std::vector<double>& weights) {
    const std::size_t n = f.size();
    if (weights.size() != n) throw ConfigError("weights must match the sample count");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return wrap01(f[i]) < wrap01(f[j]); });
    std::vector<double> phi(n);
    double below = 0.0;
    for (std::size_t k = 0; k < n;) {
        // Equal values share the mass strictly below them.
        std::size_t e = k;
        double tie_mass = 0.0;
        while (e < n && wrap01(f[order[e]]) == wrap01(f[order[k]])) tie_mass += weights[order[e++]];
        for (std::size_t i = k; i < e; ++i) phi[order[i]] = wrap01(below);
        below += tie_mass;
        k = e;
    }
    return phi;
}

Homeo monotone_circle_fit(std::vector<std::pair<double, double>> graph, double min_step) {
    if (graph.size() < 2) throw Error("graph not a homeomorphism", "need at least two graph points");
    for (auto& [x, y] : graph) {
        x = wrap01(x);
        y = wrap01(y);
    }
    std::sort(graph.begin(), graph.end());
    auto signed_step = [](double from, double to) {
        double d = wrap01(to - from);
        return d > 0.5 ? d - 1.0 : d;
    };
    // Average targets of equal abscissae around the first of them.
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < graph.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < graph.size() && graph[j].first == graph[i].first) sum += signed_step(graph[i].second, graph[j++].second);
        xs.push_back(graph[i].first);
        ys.push_back(graph[i].second + sum / static_cast<double>(j - i));
        i = j;
    }
    const std::size_t m = xs.size();
    if (m < 2) throw Error("graph not a homeomorphism", "need at least two distinct abscissae");
    std::vector<double> lifted(m);
    lifted[0] = ys[0];
    for (std::size_t i = 1; i < m; ++i) lifted[i] = lifted[i - 1] + signed_step(ys[i - 1], ys[i]);
    const double winding = lifted[m - 1] + signed_step(ys[m - 1], ys[0]) - lifted[0];
    if (std::abs(winding - 1.0) > 1e-6) {
        throw Error("graph not a homeomorphism", "targets wind " + std::to_string(std::lround(winding)) + " times");
    }

    // Pool adjacent violators.
    std::vector<double> level, weight;
    std::vector<std::size_t> count;
    for (double v : lifted) {
        level.push_back(v);
        weight.push_back(1.0);
        count.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            const double w = weight[weight.size() - 2] + weight.back();
            const double merged = (level[level.size() - 2] * weight[weight.size() - 2] + level.back() * weight.back()) / w;
            const std::size_t c = count[count.size() - 2] + count.back();
            level.pop_back();
            weight.pop_back();
            count.pop_back();
            level.back() = merged;
            weight.back() = w;
            count.back() = c;
        }
    }
    std::vector<double> fitted;
    fitted.reserve(m);
    for (std::size_t b = 0; b < level.size(); ++b) fitted.insert(fitted.end(), count[b], level[b]);
    // The last value must stay below the first one plus a turn.
    for (std::size_t i = m; i-- > 0 && fitted[i] > fitted[0] + 1.0 - min_step;) fitted[i] = fitted[0] + 1.0 - min_step;

    std::vector<std::pair<double, double>> samples(m);
    for (std::size_t i = 0; i < m; ++i) samples[i] = {xs[i], fitted[i]};
    return piecewise_linear_through(std::move(samples), min_step);
}

ActionSpec rebuild_action(const std::vector<double>& phi, const SampledBoundary& sb, const RebuildParams& params,
                          double coverage_min) {
    if (phi.size() != sb.size()) throw ConfigError("phi must have one value per sample");
    std::vector<ActionSpec::Generator> gens;
    for (std::size_t g = 0; g < sb.moves.size(); ++g) {
        if (sb.coverage(g) < coverage_min) {
            throw Error("insufficient coverage", "generator " + sb.labels[g] + " moves " +
                                                     std::to_string(sb.coverage(g)) + " of the samples");
        }
        std::vector<std::pair<double, double>> graph;
        for (std::size_t id = 0; id < sb.size(); ++id) {
            if (sb.moves[g][id] >= 0) graph.emplace_back(phi[id], phi[static_cast<std::size_t>(sb.moves[g][id])]);
        }
        // Orientation audit on graph triples.
        if (graph.size() >= 3 && params.audit_triples > 0) {
            auto rng = stream_engine(params.seed, g);
            std::size_t checked = 0, reversed = 0;
            for (std::size_t t = 0; t < params.audit_triples; ++t) {
                const auto ids = distinct_ids(rng, graph.size(), 3);
                const int a = orient(CirclePoint(graph[ids[0]].first), CirclePoint(graph[ids[1]].first),
                                     CirclePoint(graph[ids[2]].first));
                const int b = orient(CirclePoint(graph[ids[0]].second), CirclePoint(graph[ids[1]].second),
                                     CirclePoint(graph[ids[2]].second));
                if (a == 0 || b == 0) continue;
                ++checked;
                reversed += a != b;
            }
            if (checked > 0 && static_cast<double>(reversed) > params.graph_slack * static_cast<double>(checked)) {
                throw Error("graph not a homeomorphism",
                            "generator " + sb.labels[g] + " reverses " + std::to_string(reversed) + " of " +
                                std::to_string(checked) + " graph triples");
            }
        }
        gens.push_back({sb.labels[g], monotone_circle_fit(std::move(graph))});
    }
    return ActionSpec(std::move(gens));
}

AuditResult audit_alternating(const SampledCocycle& omega, const AuditParams& params) {
    require_samples(omega, 3);
    return run_audit("alternating", params, [&](std::mt19937_64& rng) {
        const auto t = distinct_ids(rng, omega.size(), 3);
        const std::size_t x = t[0], y = t[1], z = t[2];
        const int v = omega(x, y, z);
        if (v == 0) return -1;
        const bool ok = omega(y, x, z) == -v && omega(x, z, y) == -v && omega(z, y, x) == -v && omega(y, z, x) == v &&
                        omega(z, x, y) == v;
        return ok ? 1 : 0;
    });
}

AuditResult audit_cocycle_identity(const SampledCocycle& omega, const AuditParams& params) {
    require_samples(omega, 4);
    return run_audit("cocycle identity", params, [&](std::mt19937_64& rng) {
        const auto t = distinct_ids(rng, omega.size(), 4);
        const std::size_t x = t[0], y = t[1], z = t[2], w = t[3];
        const int a = omega(y, z, w), b = omega(x, z, w), c = omega(x, y, w), d = omega(x, y, z);
        if (a == 0 || b == 0 || c == 0 || d == 0) return -1;
        return a - b + c - d == 0 ? 1 : 0;
    });
}

AuditResult audit_values(const SampledCocycle& omega, const AuditParams& params) {
    require_samples(omega, 3);
    return run_audit("values in {-1,+1}", params, [&](std::mt19937_64& rng) {
        const auto t = distinct_ids(rng, omega.size(), 3);
        const int v = omega(t[0], t[1], t[2]);
        if (v == 0) return -1;
        return v == 1 || v == -1 ? 1 : 0;
    });
}

AuditResult audit_invariance(const SampledCocycle& omega, const SampledBoundary& sb, const AuditParams& params) {
    require_samples(omega, 3);
    if (sb.size() != omega.size()) throw ConfigError("boundary and cocycle sizes differ");
    std::vector<std::vector<std::size_t>> movable(sb.moves.size());
    for (std::size_t g = 0; g < sb.moves.size(); ++g) {
        for (std::size_t id = 0; id < sb.size(); ++id) {
            if (sb.moves[g][id] >= 0) movable[g].push_back(id);
        }
    }
    // A match may sit move_tol away from the true image on either side.
    const double sep = 2.0 * sb.move_tol;
    auto apart = [&](std::size_t i, std::size_t j) { return circle_distance(sb.points[i].value(), sb.points[j].value()) > sep; };
    return run_audit("G-invariance", params, [&](std::mt19937_64& rng) {
        if (sb.moves.empty()) return -1;
        const std::size_t g = uniform_index(rng, sb.moves.size());
        if (movable[g].size() < 3) return -1;
        const auto pick = distinct_ids(rng, movable[g].size(), 3);
        const std::size_t x = movable[g][pick[0]], y = movable[g][pick[1]], z = movable[g][pick[2]];
        const auto gx = static_cast<std::size_t>(sb.moves[g][x]);
        const auto gy = static_cast<std::size_t>(sb.moves[g][y]);
        const auto gz = static_cast<std::size_t>(sb.moves[g][z]);
        if (!apart(x, y) || !apart(y, z) || !apart(x, z) || !apart(gx, gy) || !apart(gy, gz) || !apart(gx, gz)) return -1;
        return omega(gx, gy, gz) == omega(x, y, z) ? 1 : 0;
    });
}

AuditResult audit_interval_partition(const SampledCocycle& omega, const AuditParams& params) {
    require_samples(omega, 2);
    return run_audit("interval partition", params, [&](std::mt19937_64& rng) {
        const auto t = distinct_ids(rng, omega.size(), 2);
        const std::size_t a = t[0], x = t[1];
        if (coincide(omega.points()[a].value(), omega.points()[x].value())) return -1;
        for (std::size_t z = 0; z < omega.size(); ++z) {
            const bool in1 = omega(a, z, x) == 1, in2 = omega(x, z, a) == 1;
            const bool band = coincide(omega.points()[z].value(), omega.points()[a].value()) ||
                              coincide(omega.points()[z].value(), omega.points()[x].value());
            if (in1 && in2) return 0;
            if (!band && !in1 && !in2) return 0;
        }
        return 1;
    });
}

AuditResult audit_nesting(const SampledCocycle& omega, const AuditParams& params) {
    require_samples(omega, 3);
    return run_audit("interval nesting", params, [&](std::mt19937_64& rng) {
        const auto t = distinct_ids(rng, omega.size(), 2);
        const std::size_t a = t[0], c = t[1];
        if (coincide(omega.points()[a].value(), omega.points()[c].value())) return -1;
        std::vector<char> ac;
        mark_interval(omega, a, c, ac);
        std::vector<std::size_t> members;
        for (std::size_t z = 0; z < omega.size(); ++z) {
            if (ac[z]) members.push_back(z);
        }
        if (members.empty()) return -1;
        const std::size_t b = members[uniform_index(rng, members.size())];
        const double pb = omega.points()[b].value();
        for (std::size_t z = 0; z < omega.size(); ++z) {
            const bool ab = omega(a, z, b) == 1, bc = omega(b, z, c) == 1;
            if (ab && bc) return 0;
            if ((ab || bc) && !ac[z]) return 0;
            if (ac[z] && !ab && !bc && !coincide(omega.points()[z].value(), pb)) return 0;
        }
        return 1;
    });
}

AuditResult audit_dichotomy(const SampledCocycle& omega, const std::vector<double>& weights,
                            const AuditParams& params) {
    require_samples(omega, 3);
    if (weights.size() != omega.size()) throw ConfigError("weights must match the sample count");
    const double collision = 1.0 / (4.0 * static_cast<double>(omega.size()));
    return run_audit("interval dichotomy", params, [&](std::mt19937_64& rng) {
        const auto t = distinct_ids(rng, omega.size(), 3);
        const std::size_t a = t[0], x = t[1], y = t[2];
        if (omega.flagged(a, x, y)) return -1;
        const double mx = interval_mass(omega, a, x, weights);
        const double my = interval_mass(omega, a, y, weights);
        if (std::abs(mx - my) < collision) return -1;
        const bool first = omega(a, x, y) == 1 && mx < my;  // x in I(a,y)
        const bool second = omega(a, y, x) == 1 && my < mx; // y in I(a,x)
        return first != second ? 1 : 0;
    });
}

AuditResult audit_order(const SampledCocycle& omega, const std::vector<double>& f, const AuditParams& params) {
    require_samples(omega, 3);
    if (f.size() != omega.size()) throw ConfigError("f must have one value per sample");
    const double collision = 1.0 / (4.0 * static_cast<double>(omega.size()));
    return run_audit("order compatibility", params, [&](std::mt19937_64& rng) {
        const auto t = distinct_ids(rng, omega.size(), 3);
        const std::size_t x = t[0], y = t[1], z = t[2];
        const int v = omega(x, y, z);
        if (v == 0) return -1;
        if (circle_distance(f[x], f[y]) < collision || circle_distance(f[y], f[z]) < collision ||
            circle_distance(f[x], f[z]) < collision) {
            return -1;
        }
        return orient(CirclePoint(f[x]), CirclePoint(f[y]), CirclePoint(f[z])) == v ? 1 : 0;
    });
}

RoundTripReport round_trip(const ActionSpec& spec, const RoundTripParams& params) {
    RoundTripReport rep;
    const SampledBoundary sb = sample_boundary(spec, params.boundary, params.workers);
    rep.samples = sb.size();
    for (std::size_t g = 0; g < spec.generator_count(); ++g) rep.coverage.push_back(sb.coverage(g));

    const SampledCocycle omega = extract_cocycle(sb, params.audit.tuples, params.audit.seed);
    AuditParams ap = params.audit;
    ap.workers = params.workers;
    rep.audits.push_back(audit_alternating(omega, ap));
    rep.audits.push_back(audit_cocycle_identity(omega, ap));
    rep.audits.push_back(audit_values(omega, ap));
    rep.audits.push_back(audit_invariance(omega, sb, ap));
    rep.audits.push_back(audit_interval_partition(omega, ap));
    rep.audits.push_back(audit_nesting(omega, ap));
    rep.audits.push_back(audit_dichotomy(omega, sb.weights, ap));

    rep.base_point = choose_base_point(omega, sb.weights, params.base_candidates);
    const auto f = f_a_map(omega, rep.base_point, sb.weights);
    rep.collision_fraction = collision_fraction(f);
    rep.audits.push_back(audit_order(omega, f, ap));

    const auto phi = rectify(f, sb.weights);
    {
        std::vector<double> s = phi;
        std::sort(s.begin(), s.end());
        double gap = s.front() + 1.0 - s.back();
        for (std::size_t i = 1; i < s.size(); ++i) gap = std::max(gap, s[i] - s[i - 1]);
        rep.rectified_max_gap = gap;
    }
    rep.rebuilt = rebuild_action(phi, sb, params.rebuild, params.boundary.coverage_min);
    rep.phi = phi;

    std::vector<std::pair<double, double>> align;
    align.reserve(sb.size());
    for (std::size_t i = 0; i < sb.size(); ++i) align.emplace_back(phi[i], sb.points[i].value());
    rep.alignment = monotone_circle_fit(std::move(align));
    const Homeo h_inv = rep.alignment.inverse();

    for (std::size_t g = 0; g < spec.generator_count(); ++g) {
        const Homeo aligned = compose(rep.alignment, compose(rep.rebuilt.generators()[g].map, h_inv));
        const double d = sup_distance(aligned, spec.generators()[g].map, params.grid);
        rep.generator_distance.push_back(d);
        rep.max_generator_distance = std::max(rep.max_generator_distance, d);
    }

    // The rebuilt cocycle is based at phi = 0, which sits at h(0) in the
    // original coordinates; rotating h(0) to 0 moves the base point there.
    const double anchor = rep.alignment(0.0);
    const Homeo to_zero = Homeo::rotation(-anchor), from_zero = Homeo::rotation(anchor);
    for (std::size_t i = 0; i < spec.generator_count(); ++i) {
        for (std::size_t j = 0; j < spec.generator_count(); ++j) {
            const auto& gi = spec.generators()[i];
            const auto& gj = spec.generators()[j];
            const Homeo ri = compose(to_zero, compose(gi.map, from_zero));
            const Homeo rj = compose(to_zero, compose(gj.map, from_zero));
            const int expected = euler_cocycle(ri, rj);
            const int got = euler_cocycle(rep.rebuilt.generators()[i].map, rep.rebuilt.generators()[j].map);
            if (expected != got) {
                rep.euler_match = false;
                rep.euler_mismatches.push_back(gi.label + "," + gj.label);
            }
        }
    }

    const WordTree tree = WordTree::build(spec.generator_count(), params.word_length);
    std::vector<double> errors(tree.size(), 0.0);
    parallel_for(tree.size() - 1, params.workers, [&](std::size_t k) {
        const Word w = tree.word(k + 1);
        const double a = rotation_number(spec.evaluate(w), params.rotation_iterations).value;
        const double b = rotation_number(rep.rebuilt.evaluate(w), params.rotation_iterations).value;
        errors[k + 1] = circle_distance(a, b);
    });
    for (std::size_t k = 1; k < tree.size(); ++k) {
        if (errors[k] > rep.max_rotation_error || rep.worst_rotation_word.empty()) {
            rep.max_rotation_error = std::max(rep.max_rotation_error, errors[k]);
            if (errors[k] >= rep.max_rotation_error) rep.worst_rotation_word = tree.word(k).to_string(spec.labels());
        }
    }
    return rep;
}

} // namespace circdyn
