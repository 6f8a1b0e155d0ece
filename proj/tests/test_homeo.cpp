#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "circdyn/error.hpp"
#include "circdyn/group_action.hpp"
#include "circdyn/homeo.hpp"
#include "circdyn/presets.hpp"
#include "support.hpp"

using namespace circdyn;
using circdyn::fixtures::kAllKinds;
using circdyn::fixtures::random_homeo;
using circdyn::fixtures::random_lift;

namespace {

// Direction-vector action of a matrix on lines through the origin.
double moebius_oracle(const Matrix2& m, double x) {
    const double c = std::cos(std::numbers::pi * x), s = std::sin(std::numbers::pi * x);
    return wrap01(std::atan2(m.c * c + m.d * s, m.a * c + m.b * s) / std::numbers::pi);
}

int error_code_is(const std::function<void()>& fn, const std::string& code) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code ? 1 : -1;
    }
    return 0;
}

} // namespace

TEST(Homeo, CanonicalLiftExamples) {
    EXPECT_NEAR(canonical_lift(Homeo::rotation(0.25))(0.0), 0.25, 1e-15);
    EXPECT_NEAR(canonical_lift(Homeo::rotation(-0.25))(0.0), 0.75, 1e-15);
    EXPECT_NEAR(canonical_lift(Homeo::rotation(-0.25))(0.4), 1.15, 1e-15);
    const Homeo id = Homeo::moebius({1, 0, 0, 1});
    for (double x : {0.0, 0.3, 0.9}) EXPECT_NEAR(canonical_lift(id)(x), x, 1e-12);
}

TEST(Homeo, CanonicalLiftIsIdempotentAndInUnitInterval) {
    auto rng = stream_engine(21, 0);
    for (auto kind : kAllKinds) {
        for (int i = 0; i < 50; ++i) {
            const Lift l = random_lift(rng, kind).shifted(static_cast<std::int64_t>(uniform_index(rng, 7)) - 3);
            const Lift c = canonical_lift(l);
            EXPECT_GE(c(0.0), 0.0);
            EXPECT_LT(c(0.0), 1.0);
            EXPECT_NEAR(canonical_lift(c)(0.37), c(0.37), 1e-15);
            EXPECT_NEAR(circle_distance(c(0.61), l(0.61)), 0.0, 1e-12);
        }
    }
}

TEST(Homeo, LiftsCommuteWithTranslationAndIncrease) {
    auto rng = stream_engine(22, 0);
    for (auto kind : kAllKinds) {
        for (int i = 0; i < 40; ++i) {
            const Lift l = random_lift(rng, kind);
            for (int j = 0; j < 25; ++j) {
                const double x = fixtures::uniform(rng, -3, 3);
                EXPECT_NEAR(l(x + 1.0) - l(x) - 1.0, 0.0, 1e-12);
                const double y = x + fixtures::uniform(rng, 1e-6, 1.0);
                EXPECT_LT(l(x), l(y));
            }
        }
    }
}

TEST(Homeo, InverseUndoesEveryKind) {
    auto rng = stream_engine(23, 0);
    for (auto kind : kAllKinds) {
        for (int i = 0; i < 20; ++i) {
            const Lift l = random_lift(rng, kind);
            const Lift inv = l.inverse();
            for (int j = 0; j < 20; ++j) {
                const double x = fixtures::uniform(rng, -2, 2);
                EXPECT_NEAR(inv(l(x)), x, 1e-9);
            }
        }
    }
}

TEST(Homeo, MoebiusMatchesDirectionVectorAction) {
    auto rng = stream_engine(24, 0);
    for (int i = 0; i < 100; ++i) {
        const Matrix2 m = fixtures::random_sl2(rng);
        const Homeo f = Homeo::moebius(m);
        for (int j = 0; j < 20; ++j) {
            const double x = uniform01(rng);
            EXPECT_NEAR(circle_distance(f(x), moebius_oracle(m, x)), 0.0, 1e-10);
        }
    }
}

TEST(Homeo, MoebiusCompositionIsMatrixProduct) {
    auto rng = stream_engine(25, 0);
    for (int i = 0; i < 50; ++i) {
        const Matrix2 m = fixtures::random_sl2(rng), n = fixtures::random_sl2(rng);
        const Homeo f = compose(Homeo::moebius(m), Homeo::moebius(n));
        const Homeo g = Homeo::moebius(m * n);
        EXPECT_LT(sup_distance(f, g, 128), 1e-10);
    }
}

TEST(Homeo, RejectsDegenerateDescriptors) {
    EXPECT_THROW(Matrix2({1, 2, 2, 1}).normalized(), ConfigError);
    EXPECT_THROW(Lift::piecewise_linear(std::vector<double>{0.0, 0.5, 0.5, 1.0}, {0.0, 0.2, 0.4, 1.0}), ConfigError);
    EXPECT_THROW(Lift::piecewise_linear(std::vector<double>{0.0, 0.5, 1.0}, {0.0, 0.2, 0.9}), ConfigError);
}

TEST(Homeo, EulerCocycleOfRotations) {
    EXPECT_EQ(euler_cocycle(Homeo::rotation(0.7), Homeo::rotation(0.6)), 1);
    EXPECT_EQ(euler_cocycle(Homeo::rotation(0.3), Homeo::rotation(0.6)), 0);
    auto rng = stream_engine(26, 0);
    for (int i = 0; i < 500; ++i) {
        const double a = uniform01(rng), b = uniform01(rng);
        if (std::abs(a + b - 1.0) < 1e-6) continue;
        EXPECT_EQ(euler_cocycle(Homeo::rotation(a), Homeo::rotation(b)), a + b >= 1.0 ? 1 : 0);
    }
}

TEST(Homeo, EulerCocycleWithIdentityVanishes) {
    auto rng = stream_engine(27, 0);
    for (auto kind : kAllKinds) {
        const Homeo f = random_homeo(rng, kind);
        EXPECT_EQ(euler_cocycle(Homeo::identity(), f), 0);
        EXPECT_EQ(euler_cocycle(f, Homeo::identity()), 0);
    }
}

TEST(Homeo, EulerCocycleValuesAndIdentityOnRandomTriples) {
    auto rng = stream_engine(28, 0);
    for (auto kind : kAllKinds) {
        for (int i = 0; i < 200; ++i) {
            const Homeo g = random_homeo(rng, kind), h = random_homeo(rng, kind), k = random_homeo(rng, kind);
            const int c_gh = euler_cocycle(g, h);
            EXPECT_TRUE(c_gh == 0 || c_gh == 1);
            const int lhs = euler_cocycle(h, k) - euler_cocycle(compose(g, h), k) + euler_cocycle(g, compose(h, k)) - c_gh;
            EXPECT_EQ(lhs, 0);
        }
    }
}

TEST(Homeo, EulerOrientationHandExamples) {
    EXPECT_EQ(euler_orientation_residual(Homeo::identity(), Homeo::identity()), 0);
    const Homeo half = Homeo::rotation(0.5);
    EXPECT_EQ(euler_cocycle(half, half), 1);
    EXPECT_EQ(euler_orientation_residual(half, half), 0);
}

TEST(Homeo, EulerOrientationResidualVanishesOnRandomPairs) {
    auto rng = stream_engine(29, 0);
    for (auto kind : kAllKinds) {
        for (int i = 0; i < 200; ++i) {
            const Homeo f = random_homeo(rng, kind), g = random_homeo(rng, kind);
            EXPECT_EQ(euler_orientation_residual(f, g), 0);
        }
    }
}

TEST(Homeo, EulerOrientationResidualVanishesOnBandCases) {
    auto rng = stream_engine(30, 0);
    for (int i = 0; i < 100; ++i) {
        // Upper triangular matrices fix the point 0.
        const double a = fixtures::uniform(rng, 0.3, 3.0);
        const Homeo fix0 = Homeo::moebius({a, fixtures::uniform(rng, -2, 2), 0.0, 1.0 / a});
        const Homeo f = random_homeo(rng, fixtures::Kind::moebius);
        EXPECT_EQ(euler_orientation_residual(fix0, f), 0);
        EXPECT_EQ(euler_orientation_residual(f, fix0), 0);
        EXPECT_EQ(euler_orientation_residual(f, f.inverse()), 0);
        EXPECT_EQ(euler_orientation_residual(fix0, fix0), 0);
        const Homeo p = random_homeo(rng, fixtures::Kind::pl);
        EXPECT_EQ(euler_orientation_residual(p, p.inverse()), 0);
        EXPECT_EQ(euler_orientation_residual(p.inverse(), p), 0);
    }
}

TEST(Homeo, RotationNumberOfRotationsAndParabolics) {
    const std::int64_t n = 100000;
    for (double a : {0.0, 0.1, 0.25, std::sqrt(2.0) - 1.0, 0.9}) {
        const auto r = rotation_number(Homeo::rotation(a), n);
        EXPECT_NEAR(circle_distance(r.value, a), 0.0, 1.0 / n);
        EXPECT_DOUBLE_EQ(r.error_bound, 1.0 / n);
    }
    for (const Matrix2& m : {Matrix2{1, 1, 0, 1}, Matrix2{1, 0, -3, 1}, Matrix2{2, 0, 0, 0.5}}) {
        EXPECT_LE(circle_distance(rotation_number(Homeo::moebius(m), n).value, 0.0), 1.0 / n);
    }
}

TEST(Homeo, RotationNumberIsConjugationInvariant) {
    auto rng = stream_engine(31, 0);
    const std::int64_t n = 20000;
    for (int i = 0; i < 20; ++i) {
        const Homeo f = random_homeo(rng, i % 2 == 0 ? fixtures::Kind::pl : fixtures::Kind::rotation);
        const Homeo h = random_homeo(rng, fixtures::Kind::pl);
        const Homeo conj = compose(h, compose(f, h.inverse()));
        EXPECT_LE(circle_distance(rotation_number(conj, n).value, rotation_number(f, n).value), 2.0 / n);
    }
}

TEST(Homeo, RotationNumberOfPowers) {
    auto rng = stream_engine(32, 0);
    const std::int64_t n = 20000;
    for (int i = 0; i < 10; ++i) {
        const Homeo f = random_homeo(rng, fixtures::Kind::pl);
        const double r = rotation_number(f, n).value;
        for (int p = 2; p <= 4; ++p) {
            Homeo fp = f;
            for (int j = 1; j < p; ++j) fp = compose(fp, f);
            EXPECT_LE(circle_distance(rotation_number(fp, n).value, wrap01(p * r)), p * 2.0 / n);
        }
    }
}

TEST(Homeo, CoverAlphaExamples) {
    EXPECT_EQ(cover_alpha(Homeo::rotation(0.7), Homeo::rotation(0.4), 2), 1);
    for (int k : {1, 2, 5}) EXPECT_EQ(cover_alpha(Homeo::identity(), Homeo::identity(), k), 0);
    EXPECT_EQ(error_code_is([] { cover_alpha(Homeo::rotation(0.7), Homeo::rotation(0.5), 2); },
                            "covering relation violated"),
              1);
}

TEST(Homeo, CoverAlphaBoundAndDegreeRelation) {
    for (int k : {2, 3}) {
        const ActionSpec cover = presets::gamma2_cover(k);
        const ActionSpec base = presets::gamma2();
        const WordTree tree = WordTree::build(cover.generator_count(), 2);
        std::vector<Homeo> m1, m0;
        std::vector<std::int64_t> alpha;
        for (std::size_t i = 0; i < tree.size(); ++i) {
            const Word w = tree.word(i);
            m1.push_back(cover.evaluate(w));
            m0.push_back(base.evaluate(w));
            alpha.push_back(cover_alpha(m1.back(), m0.back(), k));
            EXPECT_LE(std::abs(alpha.back()), k + 1);
        }
        for (std::size_t g = 0; g < tree.size(); ++g) {
            for (std::size_t h = 0; h < tree.size(); ++h) {
                const Homeo gh1 = compose(m1[g], m1[h]), gh0 = compose(m0[g], m0[h]);
                const std::int64_t a_gh = cover_alpha(gh1, gh0, k);
                EXPECT_EQ(euler_cocycle(m0[g], m0[h]), k * euler_cocycle(m1[g], m1[h]) + a_gh - alpha[g] - alpha[h]);
            }
        }
    }
}

TEST(Homeo, SupDistanceAndPiecewiseFit) {
    EXPECT_NEAR(sup_distance(Homeo::rotation(0.1), Homeo::rotation(0.35)), 0.25, 1e-12);
    EXPECT_NEAR(sup_distance(Homeo::rotation(0.1), Homeo::rotation(0.9)), 0.2, 1e-12);
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 16; ++i) samples.emplace_back(i / 16.0, wrap01(i / 16.0 + 0.3));
    const Homeo fit = piecewise_linear_through(samples);
    EXPECT_LT(sup_distance(fit, Homeo::rotation(0.3)), 1e-9);
}
