#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "circdyn/circle.hpp"

namespace circdyn {

// 2x2 real matrix acting on column vectors.
struct Matrix2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Matrix2 inverse() const;
    // Rescaled to determinant one. Throws ConfigError unless det > 0.
    Matrix2 normalized() const;

    friend Matrix2 operator*(const Matrix2& m, const Matrix2& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
};

// Chart for PSL(2,R) acting on the circle: x in [0,1) is the line through
// (cos(pi x), sin(pi x)), and a matrix acts linearly on that direction
// vector. In upper half-plane terms the boundary point is t = cot(pi x)
// and the action is t -> (a t + b)/(c t + d). The lift used is
// x -> x + D(pi x)/pi with D from the polar decomposition M = R(phi) P:
// D(theta) = phi + angle(u, P u), phi = atan2(c - b, a + d) in (-pi, pi].
double moebius_lift_core(const Matrix2& m, double x);

// An increasing homeomorphism of R commuting with x -> x + 1.
//
// The kinds mirror the ways actions are described in configs:
//   Rotation         x -> x + angle
//   Moebius          the chart lift above
//   CyclicCover      x -> (F_M(k x) + germ) / k, the degree-k cover of a
//                    Moebius map; `germ` selects the branch at 0
//   PiecewiseLinear  interpolation through breakpoints over one period
//   Composition      f_1 o f_2 o ... o f_n
// Every kind carries an integer offset: eval(x) = core(x) + offset.
class Lift {
public:
    enum class Kind { Rotation, Moebius, CyclicCover, PiecewiseLinear, Composition };

    struct Rotation {
        double angle = 0.0;
    };
    struct Moebius {
        Matrix2 matrix;
    };
    struct CyclicCover {
        Matrix2 matrix;
        int k = 1;
        std::int64_t germ = 0;
    };
    struct PiecewiseLinear {
        // xs[0] = x0, xs.back() = x0 + 1, ys.back() = ys[0] + 1; both
        // strictly increasing.
        std::shared_ptr<const std::vector<double>> xs;
        std::shared_ptr<const std::vector<double>> ys;
    };
    struct Composition {
        std::shared_ptr<const std::vector<Lift>> factors;
    };

    Lift() : core_(Rotation{0.0}) {}

    static Lift identity() { return Lift(); }
    static Lift rotation(double angle);
    static Lift moebius(const Matrix2& m);
    static Lift cyclic_cover(const Matrix2& base, int k, std::int64_t germ = 0);
    // Breakpoints (x, f(x)) over one period: first x is the period start,
    // last x is start + 1 with f(last) = f(first) + 1. Both coordinates
    // strictly increasing.
    static Lift piecewise_linear(std::span<const std::pair<double, double>> breakpoints);
    static Lift piecewise_linear(std::vector<double> xs, std::vector<double> ys);
    static Lift composition(std::vector<Lift> factors);

    double operator()(double x) const { return eval_core(x) + static_cast<double>(offset_); }

    Kind kind() const { return static_cast<Kind>(core_.index()); }
    std::int64_t offset() const { return offset_; }
    Lift shifted(std::int64_t n) const {
        Lift r = *this;
        r.offset_ += n;
        return r;
    }

    const Rotation& as_rotation() const { return std::get<Rotation>(core_); }
    const Moebius& as_moebius() const { return std::get<Moebius>(core_); }
    const CyclicCover& as_cover() const { return std::get<CyclicCover>(core_); }
    const PiecewiseLinear& as_piecewise() const { return std::get<PiecewiseLinear>(core_); }
    const Composition& as_composition() const { return std::get<Composition>(core_); }

    Lift inverse() const;

    // f o g. Rotations, Moebius maps and covers of equal degree are merged
    // into a single factor of the same kind.
    friend Lift compose(const Lift& f, const Lift& g);

private:
    using Core = std::variant<Rotation, Moebius, CyclicCover, PiecewiseLinear, Composition>;
    explicit Lift(Core core, std::int64_t offset = 0) : core_(std::move(core)), offset_(offset) {}

    double eval_core(double x) const;

    Core core_;
    std::int64_t offset_ = 0;
};

// Orientation preserving circle homeomorphism. The stored lift is the
// canonical one: its value at 0 lies in [0,1), with values inside the
// coincidence band below 1 snapped to the integer.
class Homeo {
public:
    Homeo() = default;
    explicit Homeo(const Lift& lift);

    static Homeo identity() { return Homeo(); }
    static Homeo rotation(double angle) { return Homeo(Lift::rotation(angle)); }
    static Homeo moebius(const Matrix2& m) { return Homeo(Lift::moebius(m)); }

    const Lift& canonical_lift() const { return lift_; }
    double operator()(double x) const { return wrap01(lift_(x)); }
    CirclePoint operator()(CirclePoint x) const { return CirclePoint(lift_(x.value())); }

    Homeo inverse() const { return Homeo(lift_.inverse()); }
    friend Homeo compose(const Homeo& f, const Homeo& g) { return Homeo(compose(f.lift_, g.lift_)); }

private:
    Lift lift_;
};

// Canonical-lift normalization of an arbitrary lift.
Lift canonical_lift(const Lift& lift);
inline const Lift& canonical_lift(const Homeo& f) { return f.canonical_lift(); }

// Euler cocycle: the integer c with canonical(fg) + c = canonical(f) o
// canonical(g). Throws Error("non-integer cocycle residue") when the
// evaluated defect is further than 1e-6 from an integer.
int euler_cocycle(const Homeo& f, const Homeo& g);

// 2c(f,g) + o(0, f(0), fg(0)) - 1 - (delta(fg(0)) - delta(f(0)) - delta(g(0))),
// where delta is the indicator of the coincidence band around 0. Zero for
// every pair.
int euler_orientation_residual(const Homeo& f, const Homeo& g);

struct RotationNumber {
    double value = 0.0;      // in [0,1)
    double error_bound = 0.0; // 1 / iterations
};

// Birkhoff quotient canonical(f)^n(0) / n mod 1.
RotationNumber rotation_number(const Homeo& f, std::int64_t iterations);

struct CoverCheck {
    std::size_t grid = 64;
    double tolerance = kEpsCircle;
};

// alpha(g) = k * canonical(rho1_g)(0) - canonical(rho0_g)(0), rounded.
// Verifies rho0_g(k z) = k rho1_g(z) on the check grid first.
// Errors: "covering relation violated", "alpha out of bound".
std::int64_t cover_alpha(const Homeo& rho1_g, const Homeo& rho0_g, int k, const CoverCheck& check = {});

// max over x_i = i / grid of the circular distance between f(x_i) and g(x_i).
double sup_distance(const Homeo& f, const Homeo& g, std::size_t grid = 512);

// Monotone PL homeomorphism through circle samples (x_i, y_i). The x_i must
// be distinct; the y_i are unwrapped along increasing x into a lift with
// total increase one. Consecutive values closer than `min_step` are
// separated so the result is strictly increasing.
Homeo piecewise_linear_through(std::vector<std::pair<double, double>> samples, double min_step = 1e-9);

} // namespace circdyn
