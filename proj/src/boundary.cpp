#include "circdyn/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "circdyn/error.hpp"
#include "circdyn/parallel.hpp"
#include "circdyn/rng.hpp"

namespace circdyn {

std::vector<double> WalkConfig::resolved_weights(std::size_t letters) const {
    if (letters == 0) throw ConfigError("random walk needs at least one generator");
    if (weights.empty()) return std::vector<double>(letters, 1.0 / static_cast<double>(letters));
    if (weights.size() != letters) {
        throw ConfigError("step distribution has " + std::to_string(weights.size()) + " weights for " +
                          std::to_string(letters) + " letters");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("step weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("step weights must sum to 1");
    return weights;
}

bool WalkConfig::symmetric(std::size_t letters) const {
    const auto w = resolved_weights(letters);
    for (std::size_t i = 0; i + 1 < w.size(); i += 2) {
        if (w[i] != w[i + 1]) return false;
    }
    return true;
}

std::vector<Letter> sample_steps(const ActionSpec& spec, const WalkConfig& cfg, std::size_t sample_id) {
    if (cfg.walk_length < 0) throw ConfigError("walk_length must be nonnegative");
    const auto letters = spec.letters();
    const auto w = cfg.resolved_weights(letters.size());
    std::vector<double> cumulative(w.size());
    std::partial_sum(w.begin(), w.end(), cumulative.begin());
    auto rng = stream_engine(cfg.seed, sample_id);
    std::vector<Letter> steps;
    steps.reserve(static_cast<std::size_t>(cfg.walk_length));
    for (int i = 0; i < cfg.walk_length; ++i) {
        const double u = uniform01(rng) * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        steps.push_back(letters[std::min<std::size_t>(it - cumulative.begin(), letters.size() - 1)]);
    }
    return steps;
}

namespace {

std::vector<double> atom_points(const EmpiricalMeasure& m) {
    std::vector<double> pts;
    pts.reserve(m.size());
    for (const auto& a : m.atoms()) pts.push_back(a.point.value());
    return pts;
}

// Applies s_1 ... s_m to every point, s_m first.
std::vector<double> apply_prefix(const ActionSpec& spec, const std::vector<Letter>& steps, std::size_t m,
                                 std::vector<double> pts) {
    for (double& p : pts) {
        for (std::size_t i = m; i-- > 0;) p = spec.letter_map(steps[i])(p);
    }
    return pts;
}

} // namespace

std::vector<EmpiricalMeasure> push_measure(const ActionSpec& spec, const std::vector<Letter>& steps,
                                           const EmpiricalMeasure& nu) {
    // Products of long walks are ill conditioned as single maps, so every
    // prefix is applied letter by letter.
    std::vector<EmpiricalMeasure> out;
    out.reserve(steps.size());
    for (std::size_t m = 1; m <= steps.size(); ++m) {
        out.push_back(nu.pushforward([&](double x) {
            for (std::size_t i = m; i-- > 0;) x = spec.letter_map(steps[i])(x);
            return x;
        }));
    }
    return out;
}

BoundarySample run_walk(const ActionSpec& spec, const WalkConfig& cfg, const EmpiricalMeasure& nu, std::size_t id) {
    BoundarySample s;
    s.id = id;
    s.steps = sample_steps(spec, cfg, id);
    const auto base = atom_points(nu);
    if (cfg.record_diameters) {
        s.diameters.reserve(s.steps.size());
        for (std::size_t m = 1; m < s.steps.size(); ++m) {
            s.diameters.push_back(smallest_covering_arc(apply_prefix(spec, s.steps, m, base)).length);
        }
    }
    const std::vector<double> pts = apply_prefix(spec, s.steps, s.steps.size(), base);
    const CoveringArc arc = smallest_covering_arc(pts);
    s.final_diameter = arc.length;
    if (cfg.record_diameters && !s.steps.empty()) s.diameters.push_back(arc.length);
    s.final_two_cluster_diameter = two_cluster_diameter(pts);
    s.limit_point = CirclePoint(arc.midpoint());
    s.converged = s.final_diameter < cfg.dirac_tol;
    return s;
}

ProximalitySummary proximality_experiment(const ActionSpec& spec, const WalkConfig& cfg, const EmpiricalMeasure& nu,
                                          unsigned workers) {
    if (nu.empty()) throw ConfigError("pushed measure needs at least one atom");
    ProximalitySummary out;
    out.samples.resize(cfg.sample_count);
    parallel_for(cfg.sample_count, workers, [&](std::size_t i) { out.samples[i] = run_walk(spec, cfg, nu, i); });
    if (cfg.sample_count == 0) return out;
    std::size_t converged = 0, paired = 0;
    std::vector<double> diameters;
    diameters.reserve(out.samples.size());
    for (const auto& s : out.samples) {
        converged += s.converged;
        paired += s.final_two_cluster_diameter < cfg.dirac_tol;
        diameters.push_back(s.final_diameter);
    }
    const double n = static_cast<double>(out.samples.size());
    out.fraction_converged = static_cast<double>(converged) / n;
    out.fraction_two_cluster = static_cast<double>(paired) / n;
    std::sort(diameters.begin(), diameters.end());
    const std::size_t mid = diameters.size() / 2;
    out.median_final_diameter = diameters.size() % 2 ? diameters[mid] : 0.5 * (diameters[mid - 1] + diameters[mid]);
    return out;
}

double stability_check(const BoundarySample& sample, const ActionSpec& spec, const std::vector<Word>& extra_elements,
                       const EmpiricalMeasure& nu) {
    if (!sample.converged) throw Error("precondition", "stability check needs a converged sample");
    const auto base = atom_points(nu);
    double worst = 0.0;
    for (const auto& e : extra_elements) {
        std::vector<double> pts = base;
        for (double& p : pts) p = spec.apply(e, p);
        pts = apply_prefix(spec, sample.steps, sample.steps.size(), std::move(pts));
        const CirclePoint mid(smallest_covering_arc(pts).midpoint());
        worst = std::max(worst, circle_distance(mid.value(), sample.limit_point.value()));
    }
    return worst;
}

} // namespace circdyn
