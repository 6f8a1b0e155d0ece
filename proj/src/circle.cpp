#include "circdyn/circle.hpp"

#include <algorithm>
#include <numeric>

#include "circdyn/error.hpp"

namespace circdyn {

int orient(double x, double y, double z, double eps) {
    if (coincide(x, y, eps) || coincide(y, z, eps) || coincide(x, z, eps)) return 0;
    return wrap01(y - x) < wrap01(z - x) ? 1 : -1;
}

bool Arc::contains(CirclePoint z, double eps) const {
    if (left.same_as(right, eps)) return closed_left && closed_right && z.same_as(left, eps);
    if (z.same_as(left, eps)) return closed_left;
    if (z.same_as(right, eps)) return closed_right;
    return orient(left, z, right, eps) == 1;
}

namespace {

std::vector<Atom> sort_and_merge(std::vector<Atom> atoms) {
    for (auto& a : atoms) a.point = CirclePoint(a.point.value());
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.point.value() < b.point.value(); });
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (a.weight == 0.0) continue;
        if (!merged.empty() && merged.back().point.same_as(a.point)) {
            merged.back().weight += a.weight;
        } else {
            merged.push_back(a);
        }
    }
    // First and last atoms may coincide across 0.
    if (merged.size() > 1 && merged.front().point.same_as(merged.back().point)) {
        merged.front().weight += merged.back().weight;
        merged.pop_back();
    }
    return merged;
}

} // namespace

EmpiricalMeasure::EmpiricalMeasure(std::vector<Atom> atoms) {
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.weight >= 0.0)) throw ConfigError("empirical measure: negative or NaN weight");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("empirical measure: weights do not sum to 1");
    atoms_ = sort_and_merge(std::move(atoms));
}

EmpiricalMeasure EmpiricalMeasure::normalized(std::vector<Atom> atoms) {
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.weight >= 0.0)) throw ConfigError("empirical measure: negative or NaN weight");
        total += a.weight;
    }
    if (!(total > 0.0)) throw ConfigError("empirical measure: zero total mass");
    for (auto& a : atoms) a.weight /= total;
    EmpiricalMeasure m;
    m.atoms_ = sort_and_merge(std::move(atoms));
    return m;
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::span<const double> points) {
    std::vector<Atom> atoms;
    atoms.reserve(points.size());
    for (double p : points) atoms.push_back({CirclePoint(p), 1.0});
    return normalized(std::move(atoms));
}

EmpiricalMeasure EmpiricalMeasure::uniform_grid(std::size_t n, double offset) {
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = (static_cast<double>(i) + offset) / static_cast<double>(n);
    return uniform(pts);
}

double EmpiricalMeasure::mass_left_closed(CirclePoint b, CirclePoint x) const {
    if (b.same_as(x)) return 0.0;
    double mass = 0.0;
    for (const auto& a : atoms_) {
        if (a.point.same_as(x)) continue;
        if (a.point.same_as(b) || orient(b, a.point, x) == 1) mass += a.weight;
    }
    return mass;
}

EmpiricalMeasure EmpiricalMeasure::pushforward(const std::function<double(double)>& map) const {
    std::vector<Atom> moved;
    moved.reserve(atoms_.size());
    for (const auto& a : atoms_) moved.push_back({CirclePoint(map(a.point.value())), a.weight});
    EmpiricalMeasure m;
    m.atoms_ = sort_and_merge(std::move(moved));
    return m;
}

CirclePoint quasi_conjugacy_eval(CirclePoint b, const EmpiricalMeasure& mu, CirclePoint x) {
    return CirclePoint(mu.mass_left_closed(b, x));
}

CoveringArc smallest_covering_arc(std::vector<double> points) {
    if (points.size() < 2) return {points.empty() ? 0.0 : wrap01(points.front()), 0.0};
    for (auto& p : points) p = wrap01(p);
    std::sort(points.begin(), points.end());
    const std::size_t n = points.size();
    double best_gap = 1.0 - points.back() + points.front();
    std::size_t best_next = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double gap = points[i + 1] - points[i];
        if (gap > best_gap) {
            best_gap = gap;
            best_next = i + 1;
        }
    }
    return {points[best_next], 1.0 - best_gap};
}

double two_cluster_diameter(std::vector<double> points) {
    if (points.size() < 3) return 0.0;
    for (auto& p : points) p = wrap01(p);
    std::sort(points.begin(), points.end());
    const std::size_t n = points.size();
    std::vector<double> gaps(n);
    for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = points[i + 1] - points[i];
    gaps[n - 1] = 1.0 - points.back() + points.front();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + 2, order.end(),
                      [&](std::size_t a, std::size_t b) { return gaps[a] > gaps[b]; });
    std::size_t g1 = std::min(order[0], order[1]);
    std::size_t g2 = std::max(order[0], order[1]);
    double inner = 0.0;
    for (std::size_t i = g1 + 1; i < g2; ++i) inner += gaps[i];
    double outer = 1.0 - inner - gaps[g1] - gaps[g2];
    return std::max(inner, outer);
}

MonotoneSample::MonotoneSample(std::vector<double> grid, std::vector<std::vector<double>> rows)
    : grid_(std::move(grid)), rows_(std::move(rows)) {
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (!(grid_[i] > grid_[i - 1])) throw ConfigError("monotone sample: grid must be strictly increasing");
    }
    for (const auto& row : rows_) {
        if (row.size() != grid_.size()) throw ConfigError("monotone sample: row length differs from grid");
        for (std::size_t i = 1; i < row.size(); ++i) {
            if (row[i] < row[i - 1] - 1e-12) throw ConfigError("monotone sample: row is not nondecreasing");
        }
    }
}

MonotoneSample MonotoneSample::on_uniform_grid(std::size_t points,
                                               std::span<const std::function<double(double)>> maps) {
    if (points < 2) throw ConfigError("monotone sample: need at least two grid points");
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    std::vector<std::vector<double>> rows;
    rows.reserve(maps.size());
    for (const auto& f : maps) {
        std::vector<double> row(points);
        for (std::size_t i = 0; i < points; ++i) row[i] = f(grid[i]);
        rows.push_back(std::move(row));
    }
    return MonotoneSample(std::move(grid), std::move(rows));
}

std::vector<std::size_t> helly_subsequence(const MonotoneSample& sample, const HellyOptions& options) {
    const auto& rows = sample.rows();
    if (rows.size() < options.min_length) {
        throw Error("no convergent subsequence at tolerance", "sample has fewer rows than the requested minimum");
    }
    std::vector<std::size_t> current(rows.size());
    std::iota(current.begin(), current.end(), 0);
    const double tol = options.tolerance;

    for (std::size_t g = 0; g < sample.grid().size() && current.size() > 1; ++g) {
        const std::size_t half = current.size() / 2;
        std::vector<double> tail;
        tail.reserve(current.size() - half);
        for (std::size_t i = half; i < current.size(); ++i) tail.push_back(rows[current[i]][g]);
        std::sort(tail.begin(), tail.end());
        if (tail.back() - tail.front() <= tol) continue;

        // Densest window of width tol among the tail values; ties go to the
        // lowest window.
        std::size_t best_start = 0, best_count = 0, hi = 0;
        for (std::size_t lo = 0; lo < tail.size(); ++lo) {
            hi = std::max(hi, lo);
            while (hi + 1 < tail.size() && tail[hi + 1] - tail[lo] <= tol) ++hi;
            if (hi - lo + 1 > best_count) {
                best_count = hi - lo + 1;
                best_start = lo;
            }
        }
        const double lo_value = tail[best_start];
        std::vector<std::size_t> kept;
        for (std::size_t idx : current) {
            double v = rows[idx][g];
            if (v >= lo_value && v <= lo_value + tol) kept.push_back(idx);
        }
        current = std::move(kept);
    }
    if (current.size() < options.min_length) {
        throw Error("no convergent subsequence at tolerance", "extracted subsequence is shorter than the minimum");
    }
    return current;
}

} // namespace circdyn
