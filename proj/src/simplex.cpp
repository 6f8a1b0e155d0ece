#include "circdyn/simplex.hpp"

#include <cmath>
#include <limits>

#include "circdyn/error.hpp"

namespace circdyn {

namespace {

class Tableau {
public:
    Tableau(const LinearProgram& lp)
        : m_(lp.rows), n_(lp.cols), width_(lp.cols + lp.rows + 1), t_((m_ + 1) * width_, 0.0), basis_(m_) {
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t c = 0; c < n_; ++c) at(r, c) = lp.at(r, c);
            at(r, n_ + r) = 1.0;
            at(r, width_ - 1) = lp.rhs[r];
            basis_[r] = n_ + r;
        }
    }

    double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }
    double& z(std::size_t c) { return at(m_, c); }
    double rhs(std::size_t r) const { return at(r, width_ - 1); }
    std::size_t rhs_col() const { return width_ - 1; }
    std::size_t basic(std::size_t r) const { return basis_[r]; }
    bool is_artificial(std::size_t c) const { return c >= n_ && c < n_ + m_; }

    void pivot(std::size_t row, std::size_t col) {
        const double p = at(row, col);
        for (std::size_t c = 0; c < width_; ++c) at(row, c) /= p;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == row) continue;
            const double f = at(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < width_; ++c) at(r, c) -= f * at(row, c);
            at(r, col) = 0.0;
        }
        basis_[row] = col;
    }

    // z_j = c_B B^-1 A_j - c_j for column costs `cost`.
    void set_objective(const std::vector<double>& cost) {
        for (std::size_t c = 0; c < width_; ++c) {
            double v = c < cost.size() ? -cost[c] : 0.0;
            if (c == rhs_col()) v = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const std::size_t b = basis_[r];
                const double cb = b < cost.size() ? cost[b] : 0.0;
                if (cb != 0.0) v += cb * at(r, c);
            }
            z(c) = v;
        }
    }

    // Maximizes over columns [0, limit); returns the final status.
    SimplexResult::Status optimize(std::size_t limit, const SimplexOptions& opt, std::size_t& iterations) {
        std::size_t stalled = 0;
        while (true) {
            if (iterations >= opt.max_iterations) return SimplexResult::Status::iteration_limit;
            const bool bland = stalled >= opt.stall_limit;
            std::size_t enter = limit;
            double best = -opt.pivot_tol;
            for (std::size_t c = 0; c < limit; ++c) {
                if (z(c) < best) {
                    enter = c;
                    if (bland) break;
                    best = z(c);
                }
            }
            if (enter == limit) return SimplexResult::Status::optimal;
            std::size_t leave = m_;
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a <= opt.pivot_tol) continue;
                const double q = rhs(r) / a;
                if (q < ratio || (q == ratio && basis_[r] < basis_[leave])) {
                    ratio = q;
                    leave = r;
                }
            }
            if (leave == m_) return SimplexResult::Status::unbounded;
            stalled = ratio * at(leave, enter) <= opt.feasibility_tol ? stalled + 1 : 0;
            pivot(leave, enter);
            ++iterations;
        }
    }

    // Pivots basic artificials out where their row allows it.
    void drive_out_artificials(double tol) {
        for (std::size_t r = 0; r < m_; ++r) {
            if (!is_artificial(basis_[r])) continue;
            for (std::size_t c = 0; c < n_; ++c) {
                if (std::abs(at(r, c)) > tol) {
                    pivot(r, c);
                    break;
                }
            }
        }
    }

    std::size_t m_, n_, width_;

private:
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

} // namespace

SimplexResult solve_simplex(const LinearProgram& lp, const SimplexOptions& options) {
    if (lp.a.size() != lp.rows * lp.cols || lp.rhs.size() != lp.rows || lp.objective.size() != lp.cols) {
        throw ConfigError("linear program dimensions are inconsistent");
    }
    for (double b : lp.rhs) {
        if (b < 0.0) throw ConfigError("linear program right-hand side must be nonnegative");
    }
    Tableau t(lp);
    SimplexResult res;

    std::vector<double> phase1(lp.cols + lp.rows, 0.0);
    for (std::size_t r = 0; r < lp.rows; ++r) phase1[lp.cols + r] = -1.0;
    t.set_objective(phase1);
    res.status = t.optimize(lp.cols, options, res.iterations);
    if (res.status == SimplexResult::Status::iteration_limit) return res;
    if (t.z(t.rhs_col()) < -options.feasibility_tol) {
        res.status = SimplexResult::Status::infeasible;
        return res;
    }
    t.drive_out_artificials(options.pivot_tol);

    t.set_objective(lp.objective);
    res.status = t.optimize(lp.cols, options, res.iterations);
    if (res.status != SimplexResult::Status::optimal) return res;

    res.x.assign(lp.cols, 0.0);
    for (std::size_t r = 0; r < lp.rows; ++r) {
        if (t.basic(r) < lp.cols) res.x[t.basic(r)] = t.rhs(r);
    }
    res.duals.resize(lp.rows);
    for (std::size_t r = 0; r < lp.rows; ++r) res.duals[r] = t.z(lp.cols + r);
    res.value = t.z(t.rhs_col());
    return res;
}

} // namespace circdyn
