#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace circdyn {

// Coincidence band for circle points. orient() returns 0 inside it and
// canonical lift values this close to an integer are snapped.
inline constexpr double kEpsCircle = 1e-9;

// Representative of x in [0,1).
inline double wrap01(double x) {
    double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

// Length of the shortest arc between two circle points, in [0, 1/2].
inline double circle_distance(double a, double b) {
    double d = wrap01(a - b);
    return d > 0.5 ? 1.0 - d : d;
}

inline bool coincide(double a, double b, double eps = kEpsCircle) { return circle_distance(a, b) < eps; }

// A coset of Z in R, stored as its representative in [0,1).
class CirclePoint {
public:
    constexpr CirclePoint() = default;
    explicit CirclePoint(double x) : value_(wrap01(x)) {}

    double value() const { return value_; }

    // Equality modulo 1 inside the coincidence band.
    bool same_as(CirclePoint other, double eps = kEpsCircle) const { return coincide(value_, other.value_, eps); }

private:
    double value_ = 0.0;
};

// Orientation cocycle: +1 for positively ordered x -> y -> z, -1 for the
// reverse, 0 if two of the points coincide.
int orient(double x, double y, double z, double eps = kEpsCircle);
inline int orient(CirclePoint x, CirclePoint y, CirclePoint z, double eps = kEpsCircle) {
    return orient(x.value(), y.value(), z.value(), eps);
}

// Arc from `left` to `right` in the positive direction. left == right
// denotes the empty arc (or the circle minus a point when both ends are
// open; arcs are never used that way here).
struct Arc {
    CirclePoint left;
    CirclePoint right;
    bool closed_left = false;
    bool closed_right = false;

    static Arc open(double l, double r) { return {CirclePoint(l), CirclePoint(r), false, false}; }
    static Arc left_closed(double l, double r) { return {CirclePoint(l), CirclePoint(r), true, false}; }

    // (right - left) mod 1.
    double length() const { return wrap01(right.value() - left.value()); }
    bool contains(CirclePoint z, double eps = kEpsCircle) const;
};

struct Atom {
    CirclePoint point;
    double weight = 0.0;
};

// Probability measure with finitely many atoms: sorted by position, atoms
// closer than the coincidence band merged, weights summing to one.
class EmpiricalMeasure {
public:
    EmpiricalMeasure() = default;

    // Throws ConfigError on negative weights or a total that is not 1 within
    // 1e-12; use `normalized` to rescale arbitrary nonnegative weights.
    explicit EmpiricalMeasure(std::vector<Atom> atoms);
    static EmpiricalMeasure normalized(std::vector<Atom> atoms);
    static EmpiricalMeasure uniform(std::span<const double> points);
    // n equal atoms at (i + offset)/n.
    static EmpiricalMeasure uniform_grid(std::size_t n, double offset = 0.5);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    // Mass of [b, x): includes an atom at b, excludes one at x. Zero when
    // x coincides with b.
    double mass_left_closed(CirclePoint b, CirclePoint x) const;

    // Image measure under a circle map.
    EmpiricalMeasure pushforward(const std::function<double(double)>& map) const;

private:
    std::vector<Atom> atoms_;
};

// h_{b,mu}(x) = mu([b,x)) mod 1. Weakly order preserving and left
// continuous, with h(b) = 0.
CirclePoint quasi_conjugacy_eval(CirclePoint b, const EmpiricalMeasure& mu, CirclePoint x);

// Smallest arc containing every point, reported as (start, length).
// Empty input gives length 0; a single point gives length 0.
struct CoveringArc {
    double start = 0.0;
    double length = 0.0;
    double midpoint() const { return wrap01(start + 0.5 * length); }
};
CoveringArc smallest_covering_arc(std::vector<double> points);

// Largest of the two arcs left after removing the two widest gaps between
// sorted points. Measures concentration on a pair of clusters.
double two_cluster_diameter(std::vector<double> points);

// Monotone maps of [0,1] sampled on a common grid, one row per map.
class MonotoneSample {
public:
    MonotoneSample(std::vector<double> grid, std::vector<std::vector<double>> rows);

    // Samples each map on `points` equally spaced grid points k/(points-1).
    static MonotoneSample on_uniform_grid(std::size_t points, std::span<const std::function<double(double)>> maps);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }
    std::size_t row_count() const { return rows_.size(); }

private:
    std::vector<double> grid_;
    std::vector<std::vector<double>> rows_;
};

inline constexpr std::size_t kHellyDefaultGrid = 257;

struct HellyOptions {
    double tolerance = 1e-3;
    std::size_t min_length = 2;
};

// Diagonal extraction of a pointwise convergent subsequence. Grid points are
// processed in order; at each one the current index list is kept when the
// values on its second half agree within the tolerance, and otherwise
// narrowed to the indices whose value lies within the tolerance of the most
// populated cluster of that half. Throws Error("no convergent subsequence at
// tolerance") when fewer than `min_length` indices survive.
std::vector<std::size_t> helly_subsequence(const MonotoneSample& sample, const HellyOptions& options = {});

} // namespace circdyn
