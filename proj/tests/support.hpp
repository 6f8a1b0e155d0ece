#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "circdyn/homeo.hpp"
#include "circdyn/rng.hpp"

namespace circdyn::fixtures {

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// det-one matrix with entries of moderate size.
inline Matrix2 random_sl2(std::mt19937_64& rng) {
    for (;;) {
        Matrix2 m{uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)};
        if (m.det() > 0.05) return m.normalized();
    }
}

inline Lift random_pl_lift(std::mt19937_64& rng, std::size_t pieces = 6) {
    std::vector<double> xs(pieces - 1), ys(pieces - 1);
    for (double& x : xs) x = uniform01(rng);
    for (double& y : ys) y = uniform01(rng);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double x0 = uniform(rng, -0.5, 0.5), y0 = uniform(rng, -0.5, 0.5);
    std::vector<double> bx = {x0}, by = {y0};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        bx.push_back(x0 + 0.02 + 0.96 * xs[i]);
        by.push_back(y0 + 0.02 + 0.96 * ys[i]);
    }
    bx.push_back(x0 + 1.0);
    by.push_back(y0 + 1.0);
    return Lift::piecewise_linear(bx, by);
}

enum class Kind { rotation, moebius, cover, pl, composition };
inline constexpr Kind kAllKinds[] = {Kind::rotation, Kind::moebius, Kind::cover, Kind::pl, Kind::composition};

inline Lift random_lift(std::mt19937_64& rng, Kind kind) {
    switch (kind) {
    case Kind::rotation:
        return Lift::rotation(uniform(rng, -2, 2));
    case Kind::moebius:
        return Lift::moebius(random_sl2(rng));
    case Kind::cover:
        return Lift::cyclic_cover(random_sl2(rng), 2 + static_cast<int>(uniform_index(rng, 2)));
    case Kind::pl:
        return random_pl_lift(rng);
    case Kind::composition:
        return Lift::composition({random_pl_lift(rng), Lift::moebius(random_sl2(rng)), Lift::rotation(0.3)});
    }
    return Lift::identity();
}

inline Homeo random_homeo(std::mt19937_64& rng, Kind kind) { return Homeo(random_lift(rng, kind)); }

} // namespace circdyn::fixtures
