#include "circdyn/presets.hpp"

#include <cmath>
#include <numbers>

#include "circdyn/error.hpp"

namespace circdyn::presets {

namespace {

ActionSpec moebius_pair(const Matrix2& a, const Matrix2& b, const char* la, const char* lb) {
    return ActionSpec({{la, Homeo::moebius(a)}, {lb, Homeo::moebius(b)}});
}

} // namespace

ActionSpec psl2z() { return moebius_pair({0, -1, 1, 0}, {1, 1, 0, 1}, "S", "T"); }

ActionSpec gamma2() { return moebius_pair({1, 2, 0, 1}, {1, 0, 2, 1}, "A", "B"); }

ActionSpec gamma2_cover(int k) {
    return ActionSpec({{"A", Homeo(Lift::cyclic_cover({1, 2, 0, 1}, k))},
                       {"B", Homeo(Lift::cyclic_cover({1, 0, 2, 1}, k))}});
}

ActionSpec schottky(double lambda) {
    const Matrix2 a{lambda, 0, 0, 1.0 / lambda};
    // Rotation of the plane by pi/4 moves the fixed lines 0, 1/2 of A to
    // 1/4, 3/4 on the circle.
    const double c = std::cos(std::numbers::pi / 4), s = std::sin(std::numbers::pi / 4);
    const Matrix2 r{c, -s, s, c};
    const Matrix2 b = r * a * r.inverse();
    return moebius_pair(a, b, "A", "B");
}

ActionSpec rotations(const std::vector<double>& angles) {
    std::vector<ActionSpec::Generator> gens;
    for (std::size_t i = 0; i < angles.size(); ++i) gens.push_back({"r" + std::to_string(i), Homeo::rotation(angles[i])});
    return ActionSpec(std::move(gens));
}

ActionSpec hyperbolic(double lambda) { return ActionSpec({{"H", Homeo::moebius({lambda, 0, 0, 1.0 / lambda})}}); }

ActionSpec identity_action() { return ActionSpec({{"I", Homeo::identity()}}); }

std::vector<std::string> names() {
    return {"psl2z", "gamma2", "gamma2_cover2", "gamma2_cover3", "schottky", "hyperbolic", "identity",
            "rotation_third", "rotation_fifth", "rotation_irrational"};
}

ActionSpec by_name(const std::string& name) {
    if (name == "psl2z") return psl2z();
    if (name == "gamma2") return gamma2();
    if (name == "gamma2_cover2") return gamma2_cover(2);
    if (name == "gamma2_cover3") return gamma2_cover(3);
    if (name == "schottky") return schottky();
    if (name == "hyperbolic") return hyperbolic();
    if (name == "identity") return identity_action();
    if (name == "rotation_third") return rotations({1.0 / 3.0});
    if (name == "rotation_fifth") return rotations({1.0 / 5.0});
    if (name == "rotation_irrational") return rotations({std::sqrt(2.0) - 1.0});
    throw ConfigError("unknown preset: " + name);
}

} // namespace circdyn::presets
