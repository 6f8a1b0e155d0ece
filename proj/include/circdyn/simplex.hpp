#pragma once

#include <cstddef>
#include <vector>

namespace circdyn {

// maximize objective . x  subject to  A x = rhs, x >= 0, with rhs >= 0.
// A is dense and row-major.
struct LinearProgram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;
    std::vector<double> rhs;
    std::vector<double> objective;

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

struct SimplexOptions {
    double pivot_tol = 1e-9;
    double feasibility_tol = 1e-9;
    std::size_t max_iterations = 1000000;
    // Consecutive degenerate pivots before switching from the steepest
    // reduced profit to Bland's rule.
    std::size_t stall_limit = 50;
};

struct SimplexResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit };
    Status status = Status::iteration_limit;
    std::vector<double> x;
    // Multipliers pi with A^T pi >= objective and rhs . pi = value at the
    // optimum.
    std::vector<double> duals;
    double value = 0.0;
    std::size_t iterations = 0;
};

// Two-phase tableau simplex with artificial starting basis. Deterministic.
SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options = {});

} // namespace circdyn
