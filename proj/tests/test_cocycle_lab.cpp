#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "circdyn/cocycle_lab.hpp"
#include "circdyn/error.hpp"
#include "circdyn/presets.hpp"
#include "circdyn/rng.hpp"

using namespace circdyn;

namespace {

std::string error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

std::vector<CirclePoint> random_points(std::size_t n, std::uint64_t seed) {
    auto rng = stream_engine(seed, 0);
    std::vector<CirclePoint> pts(n);
    for (auto& p : pts) p = CirclePoint(uniform01(rng));
    return pts;
}

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

double collision_oracle(const std::vector<double>& f) {
    const double tol = 1.0 / (4.0 * static_cast<double>(f.size()));
    std::size_t hits = 0, pairs = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            ++pairs;
            if (circle_distance(f[i], f[j]) < tol) ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(pairs);
}

// Least-squares isotonic fit by the max-min formula.
std::vector<double> isotonic_oracle(const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1e300;
        for (std::size_t j = 0; j <= i; ++j) {
            double lowest = 1e300, sum = 0.0;
            for (std::size_t k = j; k < n; ++k) {
                sum += y[k];
                if (k >= i) lowest = std::min(lowest, sum / static_cast<double>(k - j + 1));
            }
            best = std::max(best, lowest);
        }
        out[i] = best;
    }
    return out;
}

// Samples closed under one letter step: P plus its letter images.
SampledBoundary closed_boundary(const ActionSpec& spec, std::size_t n, std::uint64_t seed) {
    std::vector<CirclePoint> pts = random_points(n, seed);
    const std::size_t base = pts.size();
    for (const auto& l : spec.letters()) {
        for (std::size_t i = 0; i < base; ++i) pts.push_back(CirclePoint(spec.letter_map(l)(pts[i].value())));
    }
    return make_boundary(spec, std::move(pts), 1e-9);
}

} // namespace

TEST(Boundary, MakeBoundaryMatchesExactImages) {
    const ActionSpec spec = presets::rotations({0.125});
    std::vector<CirclePoint> pts;
    for (int i = 0; i < 64; ++i) pts.emplace_back(i / 64.0);
    const SampledBoundary sb = make_boundary(spec, pts);
    for (std::size_t i = 0; i < sb.size(); ++i) EXPECT_EQ(sb.moves[0][i], static_cast<std::int64_t>((i + 8) % 64));
    EXPECT_DOUBLE_EQ(sb.coverage(0), 1.0);
    EXPECT_NEAR(sb.weights[5], 1.0 / 64, 1e-15);
}

TEST(Boundary, UnmatchedImagesAreMissing) {
    const ActionSpec spec = presets::rotations({0.3});
    const SampledBoundary sb = make_boundary(spec, {CirclePoint(0.0), CirclePoint(0.5)});
    EXPECT_EQ(sb.moves[0][0], -1);
    EXPECT_DOUBLE_EQ(sb.coverage(0), 0.0);
}

TEST(Boundary, SamplingErrors) {
    BoundaryParams p;
    p.sample_count = 40;
    p.walk_length = 30;
    EXPECT_EQ(error_code([&] { sample_boundary(presets::rotations({0.1, 0.37}), p); }), "degenerate boundary");
    p.walk_length = 300;
    p.translates = Translates::none;
    p.coverage_min = 0.9;
    EXPECT_EQ(error_code([&] { sample_boundary(presets::psl2z(), p); }), "insufficient coverage");
    p.sample_count = 2;
    EXPECT_THROW(sample_boundary(presets::psl2z(), p), ConfigError);
}

TEST(Boundary, GapFillKeepsRequestedSize) {
    BoundaryParams p;
    p.sample_count = 300;
    // Small boundaries match fewer images within move_tol.
    p.coverage_min = 0.3;
    const SampledBoundary sb = sample_boundary(presets::psl2z(), p);
    EXPECT_EQ(sb.size(), 300u);
    for (std::size_t g = 0; g < sb.moves.size(); ++g) EXPECT_GE(sb.coverage(g), p.coverage_min);
}

TEST(Cocycle, IntervalSetMatchesArcMembership) {
    const auto pts = random_points(200, 51);
    const SampledCocycle omega(pts);
    for (std::size_t a : {0u, 17u}) {
        for (std::size_t x : {3u, 99u, 150u}) {
            const auto set = interval_set(omega, a, x);
            std::vector<std::size_t> expected;
            const Arc arc = Arc::open(pts[a].value(), pts[x].value());
            for (std::size_t z = 0; z < pts.size(); ++z) {
                if (arc.contains(pts[z])) expected.push_back(z);
            }
            EXPECT_EQ(set, expected);
        }
    }
    EXPECT_EQ(error_code([&] { interval_set(omega, 4, 4); }), "precondition");
}

TEST(Cocycle, FaOnEvenlySpacedPointsCountsStrictlyBetween) {
    const std::size_t n = 32;
    std::vector<CirclePoint> pts;
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(static_cast<double>(i) / n);
    const SampledCocycle omega(pts);
    const std::size_t a = 5;
    const auto f = f_a_map(omega, a, uniform_weights(n));
    EXPECT_EQ(f[a], 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == a) continue;
        const double between = static_cast<double>((j + n - a - 1) % n);
        EXPECT_NEAR(f[j], between / n, 1e-12);
    }
}

TEST(Cocycle, CollisionFractionMatchesPairCount) {
    auto rng = stream_engine(52, 0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> f(50 + t);
        for (double& v : f) v = uniform01(rng) < 0.3 ? 0.999 + 0.002 * uniform01(rng) : uniform01(rng);
        EXPECT_NEAR(collision_fraction(f), collision_oracle(f), 1e-15);
    }
}

TEST(Cocycle, RectifyIsRankTransform) {
    const std::vector<double> f = {0.5, 0.1, 0.5, 0.9, 0.3};
    const std::vector<double> w = {0.1, 0.2, 0.3, 0.15, 0.25};
    const auto phi = rectify(f, w);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double below = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            if (f[j] < f[i]) below += w[j];
        }
        EXPECT_NEAR(phi[i], below, 1e-15);
    }
}

TEST(Cocycle, MonotoneFitMatchesIsotonicRegression) {
    auto rng = stream_engine(53, 0);
    const std::size_t n = 64;
    std::vector<std::pair<double, double>> graph;
    std::vector<double> lifted;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / n;
        const double noise = (i == 0 || i + 1 == n) ? 0.0 : 0.03 * (uniform01(rng) - 0.5);
        lifted.push_back(x + 0.2 + noise);
        graph.emplace_back(x, wrap01(lifted.back()));
    }
    const auto iso = isotonic_oracle(lifted);
    const Homeo fit = monotone_circle_fit(graph);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(circle_distance(fit(graph[i].first), iso[i]), 0.0, 1e-9);
}

TEST(Cocycle, MonotoneFitRejectsWrongDegree) {
    std::vector<std::pair<double, double>> graph;
    for (int i = 0; i < 32; ++i) graph.emplace_back(i / 32.0, wrap01(2.0 * i / 32.0));
    EXPECT_EQ(error_code([&] { monotone_circle_fit(graph); }), "graph not a homeomorphism");
}

TEST(Audits, ExactCocyclePassesEveryAudit) {
    const ActionSpec spec = presets::psl2z();
    const SampledBoundary sb = closed_boundary(spec, 300, 54);
    const SampledCocycle omega = extract_cocycle(sb);
    AuditParams ap;
    ap.tuples = 3000;
    const auto f = f_a_map(omega, 0, sb.weights);
    for (const AuditResult& r :
         {audit_alternating(omega, ap), audit_cocycle_identity(omega, ap), audit_values(omega, ap),
          audit_invariance(omega, sb, ap), audit_interval_partition(omega, ap), audit_nesting(omega, ap),
          audit_dichotomy(omega, sb.weights, ap), audit_order(omega, f, ap)}) {
        EXPECT_TRUE(r.passed()) << r.name << ": " << r.failures << " failures";
        EXPECT_GT(r.checked, 0u) << r.name;
    }
}

TEST(Audits, InvarianceDetectsReversedMoves) {
    const ActionSpec spec = presets::rotations({0.0});
    std::vector<CirclePoint> pts;
    for (int i = 0; i < 100; ++i) pts.emplace_back(i / 100.0);
    SampledBoundary sb = make_boundary(spec, pts);
    // A reflection reverses orientation on every nondegenerate triple.
    for (std::size_t i = 0; i < sb.size(); ++i) sb.moves[0][i] = static_cast<std::int64_t>((100 - i) % 100);
    const SampledCocycle omega(pts);
    const AuditResult r = audit_invariance(omega, sb, {1000, 3, 1});
    EXPECT_GT(r.failures, 0u);
}

TEST(Audits, ResultsDoNotDependOnWorkers) {
    const SampledCocycle omega(random_points(500, 55));
    AuditParams one{2000, 9, 1}, four{2000, 9, 4};
    const auto a = audit_nesting(omega, one), b = audit_nesting(omega, four);
    EXPECT_EQ(a.checked, b.checked);
    EXPECT_EQ(a.skipped, b.skipped);
    EXPECT_EQ(a.failures, b.failures);
}

TEST(Cocycle, ExtractionRejectsCoincidentSamples) {
    const ActionSpec spec = presets::psl2z();
    const SampledBoundary sb = make_boundary(spec, std::vector<CirclePoint>(10, CirclePoint(0.25)));
    EXPECT_EQ(error_code([&] { extract_cocycle(sb); }), "degenerate boundary");
}

TEST(Rebuild, ExactCoordinatesRecoverGenerators) {
    const ActionSpec spec = presets::psl2z();
    const SampledBoundary sb = closed_boundary(spec, 1500, 56);
    std::vector<double> phi;
    for (const auto& p : sb.points) phi.push_back(p.value());
    const ActionSpec rebuilt = rebuild_action(phi, sb, {}, 0.2);
    for (std::size_t g = 0; g < spec.generator_count(); ++g) {
        EXPECT_LT(sup_distance(rebuilt.generators()[g].map, spec.generators()[g].map), 2e-2);
    }
}

TEST(Rebuild, RotationsRebuildExactly) {
    const ActionSpec spec = presets::rotations({0.125});
    std::vector<CirclePoint> pts;
    for (int i = 0; i < 64; ++i) pts.emplace_back(i / 64.0);
    const SampledBoundary sb = make_boundary(spec, pts);
    std::vector<double> phi;
    for (const auto& p : pts) phi.push_back(p.value());
    const ActionSpec rebuilt = rebuild_action(phi, sb);
    EXPECT_LT(sup_distance(rebuilt.generators()[0].map, Homeo::rotation(0.125)), 1e-9);
}

TEST(RoundTrip, SmallModularBoundary) {
    RoundTripParams p;
    p.boundary.sample_count = 1200;
    p.boundary.coverage_min = 0.3;
    p.audit.tuples = 2000;
    p.rotation_iterations = 20000;
    const RoundTripReport r = round_trip(presets::psl2z(), p);
    EXPECT_EQ(r.samples, 1200u);
    for (const auto& a : r.audits) EXPECT_TRUE(a.passed()) << a.name;
    EXPECT_LT(r.collision_fraction, 0.02);
    EXPECT_LT(r.max_generator_distance, 2e-2);
    EXPECT_TRUE(r.euler_match);
}
