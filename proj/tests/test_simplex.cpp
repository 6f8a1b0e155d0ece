#include <gtest/gtest.h>

#include <cmath>
#include <optional>

#include "circdyn/rng.hpp"
#include "circdyn/simplex.hpp"

using namespace circdyn;

namespace {

// Solves B x = rhs for the chosen columns; nullopt when singular.
std::optional<std::vector<double>> basic_solution(const LinearProgram& lp, const std::vector<std::size_t>& basis) {
    const std::size_t m = lp.rows;
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t k = 0; k < m; ++k) a[r][k] = lp.at(r, basis[k]);
        a[r][m] = lp.rhs[r];
    }
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < m; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        }
        if (std::abs(a[p][c]) < 1e-10) return std::nullopt;
        std::swap(a[p], a[c]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= m; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> x(lp.cols, 0.0);
    for (std::size_t k = 0; k < m; ++k) x[basis[k]] = a[k][m] / a[k][k];
    return x;
}

// Best objective over all basic feasible solutions.
std::optional<double> vertex_oracle(const LinearProgram& lp) {
    std::optional<double> best;
    std::vector<std::size_t> basis(lp.rows);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
        if (depth == lp.rows) {
            const auto x = basic_solution(lp, basis);
            if (!x) return;
            double v = 0.0;
            for (std::size_t j = 0; j < lp.cols; ++j) {
                if ((*x)[j] < -1e-9) return;
                v += lp.objective[j] * (*x)[j];
            }
            if (!best || v > *best) best = v;
            return;
        }
        for (std::size_t j = start; j < lp.cols; ++j) {
            basis[depth] = j;
            rec(depth + 1, j + 1);
        }
    };
    rec(0, 0);
    return best;
}

// Random bounded LP: `ineq` rows A x + s = b with A, b >= 0, plus one
// equality row tying the first variables together.
LinearProgram random_lp(std::mt19937_64& rng, std::size_t vars, std::size_t ineq) {
    LinearProgram lp;
    lp.rows = ineq + 1;
    lp.cols = vars + ineq;
    lp.a.assign(lp.rows * lp.cols, 0.0);
    lp.rhs.assign(lp.rows, 0.0);
    lp.objective.assign(lp.cols, 0.0);
    for (std::size_t r = 0; r < ineq; ++r) {
        for (std::size_t j = 0; j < vars; ++j) lp.at(r, j) = 0.1 + uniform01(rng);
        lp.at(r, vars + r) = 1.0;
        lp.rhs[r] = 1.0 + 4.0 * uniform01(rng);
    }
    lp.at(ineq, 0) = 1.0;
    lp.at(ineq, 1) = -1.0;
    lp.at(ineq, 2) = 1.0;
    lp.rhs[ineq] = 0.5 * uniform01(rng);
    for (std::size_t j = 0; j < vars; ++j) lp.objective[j] = uniform01(rng) * 2.0 - 0.5;
    return lp;
}

LinearProgram make_lp(std::size_t rows, std::size_t cols, std::vector<double> a, std::vector<double> rhs,
                      std::vector<double> objective) {
    return {rows, cols, std::move(a), std::move(rhs), std::move(objective)};
}

} // namespace

TEST(Simplex, TextbookProblem) {
    // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18.
    const auto lp = make_lp(3, 5, {1, 0, 1, 0, 0, 0, 2, 0, 1, 0, 3, 2, 0, 0, 1}, {4, 12, 18}, {3, 5, 0, 0, 0});
    const auto r = solve_simplex(lp);
    ASSERT_EQ(r.status, SimplexResult::Status::optimal);
    EXPECT_NEAR(r.value, 36.0, 1e-9);
    EXPECT_NEAR(r.x[0], 2.0, 1e-9);
    EXPECT_NEAR(r.x[1], 6.0, 1e-9);
}

TEST(Simplex, MatchesVertexEnumeration) {
    auto rng = stream_engine(61, 0);
    for (int t = 0; t < 200; ++t) {
        const LinearProgram lp = random_lp(rng, 3 + t % 3, 2 + t % 2);
        const auto oracle = vertex_oracle(lp);
        const auto r = solve_simplex(lp);
        if (!oracle) {
            EXPECT_EQ(r.status, SimplexResult::Status::infeasible);
            continue;
        }
        ASSERT_EQ(r.status, SimplexResult::Status::optimal);
        EXPECT_NEAR(r.value, *oracle, 1e-8);
    }
}

TEST(Simplex, SolutionAndDualsCertifyOptimality) {
    auto rng = stream_engine(62, 0);
    for (int t = 0; t < 100; ++t) {
        const LinearProgram lp = random_lp(rng, 5, 3);
        const auto r = solve_simplex(lp);
        if (r.status != SimplexResult::Status::optimal) continue;
        double primal = 0.0, dual = 0.0;
        for (std::size_t j = 0; j < lp.cols; ++j) {
            EXPECT_GE(r.x[j], -1e-9);
            primal += lp.objective[j] * r.x[j];
            double reduced = -lp.objective[j];
            for (std::size_t i = 0; i < lp.rows; ++i) reduced += lp.at(i, j) * r.duals[i];
            EXPECT_GE(reduced, -1e-8);
        }
        for (std::size_t i = 0; i < lp.rows; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < lp.cols; ++j) row += lp.at(i, j) * r.x[j];
            EXPECT_NEAR(row, lp.rhs[i], 1e-9);
            dual += lp.rhs[i] * r.duals[i];
        }
        EXPECT_NEAR(primal, r.value, 1e-9);
        EXPECT_NEAR(dual, r.value, 1e-8);
    }
}

TEST(Simplex, DetectsInfeasibility) {
    const auto lp = make_lp(2, 2, {1, 1, 1, 1}, {1, 2}, {1, 1});
    EXPECT_EQ(solve_simplex(lp).status, SimplexResult::Status::infeasible);
}

TEST(Simplex, DetectsUnboundedness) {
    const auto lp = make_lp(1, 2, {1, -1}, {1}, {1, 0});
    EXPECT_EQ(solve_simplex(lp).status, SimplexResult::Status::unbounded);
}

TEST(Simplex, RedundantRowsAreHandled) {
    // The second row repeats the first; an artificial stays basic at zero.
    const auto lp = make_lp(2, 3, {1, 1, 1, 1, 1, 1}, {2, 2}, {1, 2, 0});
    const auto r = solve_simplex(lp);
    ASSERT_EQ(r.status, SimplexResult::Status::optimal);
    EXPECT_NEAR(r.value, 4.0, 1e-9);
}

TEST(Simplex, DegenerateCyclingExample) {
    // Beale's example cycles under the textbook rule without anti-cycling.
    const auto lp = make_lp(3, 7,
                            {0.25, -60, -1.0 / 25, 9, 1, 0, 0, 0.5, -90, -1.0 / 50, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1},
                            {0, 0, 1}, {0.75, -150, 1.0 / 50, -6, 0, 0, 0});
    const auto r = solve_simplex(lp);
    ASSERT_EQ(r.status, SimplexResult::Status::optimal);
    EXPECT_NEAR(r.value, 0.05, 1e-9);
}
