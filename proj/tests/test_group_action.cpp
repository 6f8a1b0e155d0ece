#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "circdyn/error.hpp"
#include "circdyn/group_action.hpp"
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

// Reduced words of length <= radius, counted by brute force over all
// letter strings.
std::uint64_t reduced_count_oracle(std::size_t generators, int radius) {
    const std::size_t letters = 2 * generators;
    std::uint64_t count = 1;
    std::vector<std::vector<int>> level = {{}};
    for (int r = 1; r <= radius; ++r) {
        std::vector<std::vector<int>> next;
        for (const auto& w : level) {
            for (std::size_t l = 0; l < letters; ++l) {
                if (!w.empty() && static_cast<std::size_t>(w.back()) == (l ^ 1u)) continue;
                auto v = w;
                v.push_back(static_cast<int>(l));
                next.push_back(v);
            }
        }
        count += next.size();
        level = std::move(next);
    }
    return count;
}

} // namespace

TEST(Word, ReducesFreelyAndInverts) {
    const Letter a{0, 1}, b{1, 1};
    const Word w({a, b, b.inverse(), a, a.inverse(), b});
    EXPECT_EQ(w.letters(), (std::vector<Letter>{a, b}));
    EXPECT_TRUE((w * w.inverse()).empty());
    EXPECT_EQ((w * Word({b.inverse()})).length(), 1u);
}

TEST(Word, StringRoundTrip) {
    const std::vector<std::string> labels = {"S", "T"};
    const Word w = Word::parse("S T^-1 T^-1 S", labels);
    EXPECT_EQ(w.length(), 4u);
    EXPECT_EQ(w.to_string(labels), "S T^-1 T^-1 S");
    EXPECT_EQ(Word().to_string(labels), "e");
    EXPECT_TRUE(Word::parse("e", labels).empty());
    EXPECT_THROW(Word::parse("S U", labels), ConfigError);
}

TEST(Word, EvaluationReadsRightToLeft) {
    const ActionSpec spec = presets::psl2z();
    const Word st = Word::parse("S T", spec.labels());
    const Homeo expected = compose(spec.generators()[0].map, spec.generators()[1].map);
    EXPECT_LT(sup_distance(spec.evaluate(st), expected), 1e-12);
    EXPECT_NEAR(circle_distance(spec.apply(st, 0.3), expected(0.3)), 0.0, 1e-12);
}

TEST(ActionSpec, RejectsBadLabels) {
    EXPECT_THROW(ActionSpec({{"a", Homeo()}, {"a", Homeo()}}), ConfigError);
    EXPECT_THROW(ActionSpec({{"e", Homeo()}}), ConfigError);
    EXPECT_THROW(ActionSpec({{"a b", Homeo()}}), ConfigError);
}

TEST(WordTree, SizesMatchBruteForceCount) {
    for (std::size_t n : {1u, 2u, 3u}) {
        for (int r = 0; r <= 5; ++r) {
            EXPECT_EQ(ball_size(n, r), reduced_count_oracle(n, r));
            EXPECT_EQ(WordTree::build(n, r).size(), reduced_count_oracle(n, r));
        }
    }
    EXPECT_EQ(error_code([] { WordTree::build(2, 12, 1000); }), "orbit explosion");
}

TEST(WordTree, WordsAreDistinctAndReduced) {
    const WordTree tree = WordTree::build(2, 4);
    const std::vector<std::string> labels = {"a", "b"};
    std::set<std::string> seen;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const Word w = tree.word(i);
        EXPECT_EQ(w.length(), tree.depth[i]);
        EXPECT_EQ(Word(w.letters()), w);
        seen.insert(w.to_string(labels));
    }
    EXPECT_EQ(seen.size(), tree.size());
}

TEST(Orbit, RotationByThirdOccupiesThreeCells) {
    const ActionSpec spec = presets::rotations({1.0 / 3.0});
    for (double seed : {0.01, 0.4, 0.77}) {
        const OrbitClosure oc = orbit_closure(spec, CirclePoint(seed), 8);
        EXPECT_EQ(oc.occupied_count(), 3u);
        EXPECT_EQ(oc.points, 3u);
        EXPECT_EQ(oc.gaps.size(), 3u);
    }
}

TEST(Orbit, ExplosionIsReported) {
    EXPECT_EQ(error_code([] { orbit_closure(presets::gamma2(), CirclePoint(0.1), 20, 512, 0, 5000); }),
              "orbit explosion");
}

TEST(Orbit, FiniteOrbitsShareOneCardinality) {
    const ActionSpec spec = presets::rotations({0.2, 0.4});
    auto rng = stream_engine(41, 0);
    for (int i = 0; i < 8; ++i) {
        const auto orbit = finite_orbit(spec, uniform01(rng), 64);
        ASSERT_TRUE(orbit.has_value());
        EXPECT_EQ(orbit->size(), 5u);
    }
    EXPECT_FALSE(finite_orbit(presets::rotations({std::sqrt(2.0) - 1.0}), 0.1, 64).has_value());
}

TEST(Orbit, FixedPointsOfHyperbolic) {
    const auto fp = fixed_points(Homeo::moebius({2, 0, 0, 0.5}));
    ASSERT_EQ(fp.size(), 2u);
    EXPECT_NEAR(circle_distance(fp[0], 0.0), 0.0, 1e-8);
    EXPECT_NEAR(circle_distance(fp[1], 0.5), 0.0, 1e-8);
    EXPECT_TRUE(fixed_points(Homeo::rotation(0.3)).empty());
}

TEST(Classify, CannedSuite) {
    const auto fifth = classify(presets::rotations({0.2}));
    EXPECT_EQ(fifth.kind, Classification::Kind::FiniteOrbit);
    EXPECT_EQ(fifth.orbit_size, 5u);
    EXPECT_EQ(classify(presets::rotations({std::sqrt(2.0) - 1.0})).kind, Classification::Kind::Minimal);
    const auto schottky = classify(presets::schottky());
    EXPECT_EQ(schottky.kind, Classification::Kind::ExceptionalMinimal);
    EXPECT_FALSE(schottky.gaps.empty());
    EXPECT_EQ(classify(presets::psl2z()).kind, Classification::Kind::Minimal);
}

TEST(Classify, ExceptionalGapsPersistAcrossRadii) {
    const auto c = classify(presets::schottky());
    for (const auto& run : c.evidence.runs) EXPECT_GT(run.largest_gap, 3u);
    EXPECT_LT(c.evidence.radius_low, c.evidence.radius_high);
}

TEST(Contracts, RotationsNeverContract) {
    const ActionSpec spec = presets::rotations({0.1, std::sqrt(2.0) - 1.0});
    const Contraction c = contracts(spec, Arc::open(0.2, 0.5), 6);
    EXPECT_FALSE(c.contracts);
    EXPECT_NEAR(c.min_length, 0.3, 1e-9);
}

TEST(Contracts, HyperbolicPowersContract) {
    const ActionSpec spec = presets::hyperbolic();
    const Contraction c = contracts(spec, Arc::open(0.3, 0.7), 10);
    ASSERT_TRUE(c.contracts);
    ASSERT_FALSE(c.witness.empty());
    for (const Letter& l : c.witness.letters()) EXPECT_EQ(l, c.witness.letters().front());
}

TEST(Contracts, ImproperArcRejected) {
    EXPECT_EQ(error_code([] { contracts(presets::hyperbolic(), Arc::open(0.3, 0.3), 4); }), "arc not proper");
}

TEST(Rotation, WordRotationNumbersAreAdditive) {
    const ActionSpec spec = presets::rotations({0.137, std::sqrt(2.0) - 1.0});
    const std::int64_t n = 100000;
    const WordTree tree = WordTree::build(2, 2);
    for (std::size_t i = 0; i < tree.size(); ++i) {
        for (std::size_t j = 0; j < tree.size(); ++j) {
            const Word u = tree.word(i), v = tree.word(j);
            const double sum = rotation_number(spec.evaluate(u), n).value + rotation_number(spec.evaluate(v), n).value;
            EXPECT_LE(circle_distance(rotation_number(spec.evaluate(u * v), n).value, sum), 4.0 / n);
        }
    }
}

TEST(Theta, ModularGroupIsStronglyProximal) {
    const ThetaResult r = detect_theta(presets::psl2z());
    EXPECT_EQ(r.order, 1);
    EXPECT_LT(sup_distance(r.theta, Homeo::identity()), 1e-3);
}

TEST(Theta, IdentityActionRejected) {
    EXPECT_EQ(error_code([] { detect_theta(presets::identity_action()); }), "precondition");
}

class DoubleCover : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        spec_ = new ActionSpec(presets::gamma2_cover(2));
        theta_ = new ThetaResult(detect_theta(*spec_));
    }
    static void TearDownTestSuite() {
        delete spec_;
        delete theta_;
    }
    static ActionSpec* spec_;
    static ThetaResult* theta_;
};
ActionSpec* DoubleCover::spec_ = nullptr;
ThetaResult* DoubleCover::theta_ = nullptr;

TEST_F(DoubleCover, ThetaIsHalfTurn) {
    EXPECT_EQ(theta_->order, 2);
    EXPECT_LT(sup_distance(theta_->theta, Homeo::rotation(0.5), 512), 1e-3);
    EXPECT_LT(theta_->period_residual, 1e-3);
}

TEST_F(DoubleCover, ThetaCommutesWithGenerators) {
    for (const auto& g : spec_->generators()) {
        EXPECT_LT(sup_distance(compose(theta_->theta, g.map), compose(g.map, theta_->theta), 512), 1e-3);
    }
}

TEST_F(DoubleCover, QuotientRecoversBaseAction) {
    const ProximalQuotient q = proximal_quotient(*spec_, 2, theta_->theta);
    const ActionSpec base = presets::gamma2();
    for (std::size_t i = 0; i < base.generator_count(); ++i) {
        EXPECT_LT(sup_distance(q.quotient.generators()[i].map, base.generators()[i].map, 512), 5e-3);
        EXPECT_LE(std::abs(q.alpha[i]), 3);
    }
    for (double len : {0.1, 0.5, 0.9}) {
        for (int j = 0; j < 8; ++j) {
            const double a = j / 8.0;
            EXPECT_TRUE(contracts(q.quotient, Arc::open(a, a + len), 8).contracts) << a << " " << len;
        }
    }
}

TEST_F(DoubleCover, QuotientEulerRelation) {
    const ProximalQuotient q = proximal_quotient(*spec_, 2, theta_->theta);
    const WordTree tree = WordTree::build(2, 2);
    std::vector<Homeo> m1, m0;
    std::vector<std::int64_t> alpha;
    for (std::size_t i = 0; i < tree.size(); ++i) {
        m1.push_back(q.conjugated.evaluate(tree.word(i)));
        m0.push_back(q.quotient.evaluate(tree.word(i)));
        alpha.push_back(cover_alpha(m1.back(), m0.back(), 2, {64, 5e-3}));
    }
    for (std::size_t g = 0; g < tree.size(); ++g) {
        for (std::size_t h = 0; h < tree.size(); ++h) {
            const std::int64_t a_gh = cover_alpha(compose(m1[g], m1[h]), compose(m0[g], m0[h]), 2, {64, 5e-3});
            EXPECT_EQ(euler_cocycle(m0[g], m0[h]), 2 * euler_cocycle(m1[g], m1[h]) + a_gh - alpha[g] - alpha[h]);
        }
    }
}
