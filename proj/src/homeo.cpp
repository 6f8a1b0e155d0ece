#include "circdyn/homeo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "circdyn/error.hpp"

namespace circdyn {

Matrix2 Matrix2::inverse() const {
    double det_inv = 1.0 / det();
    return {d * det_inv, -b * det_inv, -c * det_inv, a * det_inv};
}

Matrix2 Matrix2::normalized() const {
    double dt = det();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("moebius matrix must have positive determinant");
    double s = 1.0 / std::sqrt(dt);
    return {a * s, b * s, c * s, d * s};
}

double moebius_lift_core(const Matrix2& m, double x) {
    const double phi = std::atan2(m.c - m.b, m.a + m.d);
    const double cp = std::cos(phi), sp = std::sin(phi);
    // P = R(-phi) M is symmetric positive definite.
    const double p11 = cp * m.a + sp * m.c;
    const double p12 = cp * m.b + sp * m.d;
    const double p21 = -sp * m.a + cp * m.c;
    const double p22 = -sp * m.b + cp * m.d;
    const double theta = std::numbers::pi * x;
    const double ux = std::cos(theta), uy = std::sin(theta);
    const double vx = p11 * ux + p12 * uy;
    const double vy = p21 * ux + p22 * uy;
    const double turn = std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    return x + (phi + turn) / std::numbers::pi;
}

namespace {

// Integer n with F_{MN} + n = F_M o F_N.
std::int64_t moebius_product_defect(const Matrix2& m, const Matrix2& n) {
    double composed = moebius_lift_core(m, moebius_lift_core(n, 0.0));
    double direct = moebius_lift_core(m * n, 0.0);
    return std::llround(composed - direct);
}

// Integer n with F_M^{-1} = F_{M^{-1}} + n.
std::int64_t moebius_inverse_shift(const Matrix2& m) {
    return -std::llround(moebius_lift_core(m.inverse(), moebius_lift_core(m, 0.0)));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace

Lift Lift::rotation(double angle) {
    if (!std::isfinite(angle)) throw ConfigError("rotation angle must be finite");
    return Lift(Rotation{angle});
}

Lift Lift::moebius(const Matrix2& m) { return Lift(Moebius{m.normalized()}); }

Lift Lift::cyclic_cover(const Matrix2& base, int k, std::int64_t germ) {
    if (k < 1) throw ConfigError("cyclic cover degree must be positive");
    std::int64_t shift = floor_div(germ, k);
    return Lift(CyclicCover{base.normalized(), k, germ - shift * k}, shift);
}

Lift Lift::piecewise_linear(std::span<const std::pair<double, double>> breakpoints) {
    std::vector<double> xs, ys;
    xs.reserve(breakpoints.size());
    ys.reserve(breakpoints.size());
    for (const auto& [x, y] : breakpoints) {
        xs.push_back(x);
        ys.push_back(y);
    }
    return piecewise_linear(std::move(xs), std::move(ys));
}

Lift Lift::piecewise_linear(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ConfigError("piecewise linear map needs at least two breakpoints");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1]) || !(ys[i] > ys[i - 1])) {
            throw ConfigError("piecewise linear breakpoints must be strictly increasing in both coordinates");
        }
    }
    if (std::abs(xs.back() - xs.front() - 1.0) > 1e-12 || std::abs(ys.back() - ys.front() - 1.0) > 1e-12) {
        throw ConfigError("piecewise linear breakpoints must span exactly one period in both coordinates");
    }
    xs.back() = xs.front() + 1.0;
    ys.back() = ys.front() + 1.0;
    return Lift(PiecewiseLinear{std::make_shared<const std::vector<double>>(std::move(xs)),
                                std::make_shared<const std::vector<double>>(std::move(ys))});
}

Lift Lift::composition(std::vector<Lift> factors) {
    Lift result;
    for (const auto& f : factors) result = compose(result, f);
    return result;
}

double Lift::eval_core(double x) const {
    switch (core_.index()) {
    case 0:
        return x + std::get<Rotation>(core_).angle;
    case 1:
        return moebius_lift_core(std::get<Moebius>(core_).matrix, x);
    case 2: {
        const auto& cov = std::get<CyclicCover>(core_);
        const double k = cov.k;
        return (moebius_lift_core(cov.matrix, k * x) + static_cast<double>(cov.germ)) / k;
    }
    case 3: {
        const auto& pl = std::get<PiecewiseLinear>(core_);
        const auto& xs = *pl.xs;
        const auto& ys = *pl.ys;
        const double periods = std::floor(x - xs.front());
        double t = x - periods;
        if (t >= xs.back()) t = xs.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), t);
        std::size_t hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - xs.begin(), 1, xs.size() - 1));
        std::size_t lo = hi - 1;
        double s = (t - xs[lo]) / (xs[hi] - xs[lo]);
        return ys[lo] + s * (ys[hi] - ys[lo]) + periods;
    }
    default: {
        const auto& fs = *std::get<Composition>(core_).factors;
        for (auto it = fs.rbegin(); it != fs.rend(); ++it) x = (*it)(x);
        return x;
    }
    }
}

Lift Lift::inverse() const {
    const std::int64_t off = -offset_;
    switch (core_.index()) {
    case 0:
        return Lift(Rotation{-std::get<Rotation>(core_).angle}, off);
    case 1: {
        const auto& m = std::get<Moebius>(core_).matrix;
        return Lift(Moebius{m.inverse()}, off + moebius_inverse_shift(m));
    }
    case 2: {
        const auto& cov = std::get<CyclicCover>(core_);
        return Lift::cyclic_cover(cov.matrix.inverse(), cov.k, moebius_inverse_shift(cov.matrix) - cov.germ)
            .shifted(off);
    }
    case 3: {
        const auto& pl = std::get<PiecewiseLinear>(core_);
        return Lift(PiecewiseLinear{pl.ys, pl.xs}, off);
    }
    default: {
        const auto& fs = *std::get<Composition>(core_).factors;
        std::vector<Lift> inv;
        inv.reserve(fs.size());
        for (auto it = fs.rbegin(); it != fs.rend(); ++it) inv.push_back(it->inverse());
        return Lift(Composition{std::make_shared<const std::vector<Lift>>(std::move(inv))}, off);
    }
    }
}

namespace {

bool is_identity_core(const Lift& f) {
    return f.kind() == Lift::Kind::Rotation && f.as_rotation().angle == 0.0;
}

// Merge two offset-free single factors when their kinds allow it.
bool try_merge(const Lift& f, const Lift& g, Lift& out) {
    using K = Lift::Kind;
    if (f.kind() == K::Rotation && g.kind() == K::Rotation) {
        out = Lift::rotation(f.as_rotation().angle + g.as_rotation().angle);
        return true;
    }
    if (f.kind() == K::Moebius && g.kind() == K::Moebius) {
        const auto& m = f.as_moebius().matrix;
        const auto& n = g.as_moebius().matrix;
        out = Lift::moebius(m * n).shifted(moebius_product_defect(m, n));
        return true;
    }
    if (f.kind() == K::CyclicCover && g.kind() == K::CyclicCover && f.as_cover().k == g.as_cover().k) {
        const auto& p = f.as_cover();
        const auto& q = g.as_cover();
        std::int64_t germ = moebius_product_defect(p.matrix, q.matrix) + p.germ + q.germ;
        out = Lift::cyclic_cover(p.matrix * q.matrix, p.k, germ);
        return true;
    }
    return false;
}

} // namespace

Lift compose(const Lift& f, const Lift& g) {
    const std::int64_t off = f.offset_ + g.offset_;
    Lift fc = f.shifted(-f.offset_);
    Lift gc = g.shifted(-g.offset_);
    if (is_identity_core(fc)) return gc.shifted(off);
    if (is_identity_core(gc)) return fc.shifted(off);
    Lift merged;
    if (try_merge(fc, gc, merged)) return merged.shifted(off);

    std::vector<Lift> factors;
    auto append = [&](const Lift& h) {
        if (h.kind() == Lift::Kind::Composition) {
            for (const auto& x : *h.as_composition().factors) factors.push_back(x);
        } else {
            factors.push_back(h);
        }
    };
    append(fc);
    // Try to fuse the seam between the two factor lists.
    std::vector<Lift> tail;
    if (gc.kind() == Lift::Kind::Composition) {
        tail = *gc.as_composition().factors;
    } else {
        tail.push_back(gc);
    }
    std::int64_t extra = 0;
    std::size_t start = 0;
    while (!factors.empty() && start < tail.size()) {
        Lift fused;
        if (!try_merge(factors.back(), tail[start], fused)) break;
        extra += fused.offset();
        fused = fused.shifted(-fused.offset());
        factors.pop_back();
        ++start;
        if (!is_identity_core(fused)) {
            factors.push_back(fused);
            break;
        }
    }
    for (std::size_t i = start; i < tail.size(); ++i) factors.push_back(tail[i]);
    if (factors.empty()) return Lift().shifted(off + extra);
    if (factors.size() == 1) return factors.front().shifted(off + extra);
    return Lift(Lift::Composition{std::make_shared<const std::vector<Lift>>(std::move(factors))}, off + extra);
}

Lift canonical_lift(const Lift& lift) {
    const double v = lift(0.0);
    double n = std::floor(v);
    if (v - n > 1.0 - kEpsCircle) n += 1.0;
    return lift.shifted(-static_cast<std::int64_t>(n));
}

Homeo::Homeo(const Lift& lift) : lift_(circdyn::canonical_lift(lift)) {}

int euler_cocycle(const Homeo& f, const Homeo& g) {
    const Lift& fb = f.canonical_lift();
    const Lift& gb = g.canonical_lift();
    const Homeo fg = compose(f, g);
    const double defect = fb(gb(0.0)) - fg.canonical_lift()(0.0);
    const double c = std::round(defect);
    if (std::abs(defect - c) > 1e-6) throw Error("non-integer cocycle residue", std::to_string(defect));
    return static_cast<int>(c);
}

int euler_orientation_residual(const Homeo& f, const Homeo& g) {
    const double base = 0.0;
    const double f0 = f(base);
    const double g0 = g(base);
    const double fg0 = compose(f, g)(base);
    auto delta = [&](double p) { return coincide(p, base) ? 1 : 0; };
    const int c = euler_cocycle(f, g);
    return 2 * c + orient(base, f0, fg0) - 1 - (delta(fg0) - delta(f0) - delta(g0));
}

RotationNumber rotation_number(const Homeo& f, std::int64_t iterations) {
    if (iterations < 1) throw ConfigError("rotation number needs at least one iteration");
    const Lift& lift = f.canonical_lift();
    double x = 0.0;
    for (std::int64_t i = 0; i < iterations; ++i) x = lift(x);
    const double n = static_cast<double>(iterations);
    return {wrap01(x / n), 1.0 / n};
}

std::int64_t cover_alpha(const Homeo& rho1_g, const Homeo& rho0_g, int k, const CoverCheck& check) {
    if (k < 1) throw ConfigError("cover degree must be positive");
    const double kd = k;
    for (std::size_t i = 0; i < check.grid; ++i) {
        const double z = static_cast<double>(i) / static_cast<double>(check.grid);
        const double lhs = rho0_g(kd * z);
        const double rhs = kd * rho1_g(z);
        if (!coincide(lhs, rhs, check.tolerance)) {
            throw Error("covering relation violated", "at z=" + std::to_string(z));
        }
    }
    const double raw = kd * rho1_g.canonical_lift()(0.0) - rho0_g.canonical_lift()(0.0);
    const std::int64_t alpha = std::llround(raw);
    if (std::llabs(alpha) > k + 1) throw Error("alpha out of bound", std::to_string(alpha));
    return alpha;
}

double sup_distance(const Homeo& f, const Homeo& g, std::size_t grid) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(grid);
        worst = std::max(worst, circle_distance(f(x), g(x)));
    }
    return worst;
}

Homeo piecewise_linear_through(std::vector<std::pair<double, double>> samples, double min_step) {
    if (samples.size() < 2) throw Error("graph not a homeomorphism", "need at least two samples");
    for (auto& s : samples) {
        s.first = wrap01(s.first);
        s.second = wrap01(s.second);
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    std::vector<double> xs(n + 1), ys(n + 1);
    double total = 0.0;
    std::vector<double> steps(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double next = samples[(i + 1) % n].second;
        steps[i] = wrap01(next - samples[i].second);
        total += steps[i];
    }
    if (std::abs(total - 1.0) > 1e-6) throw Error("graph not a homeomorphism", "samples are not circularly monotone");
    xs[0] = samples[0].first;
    ys[0] = samples[0].second;
    for (std::size_t i = 1; i < n; ++i) {
        if (!(samples[i].first > samples[i - 1].first)) throw Error("graph not a homeomorphism", "repeated abscissa");
        xs[i] = samples[i].first;
        ys[i] = std::max(ys[i - 1] + steps[i - 1], ys[i - 1] + min_step);
    }
    xs[n] = xs[0] + 1.0;
    ys[n] = ys[0] + 1.0;
    if (!(ys[n] > ys[n - 1])) {
        // Pull interior values back below the closing value.
        for (std::size_t i = n - 1; i >= 1 && !(ys[i + 1] > ys[i]); --i) ys[i] = ys[i + 1] - min_step;
    }
    return Homeo(Lift::piecewise_linear(std::move(xs), std::move(ys)));
}

} // namespace circdyn
