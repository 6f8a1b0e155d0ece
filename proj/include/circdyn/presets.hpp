#pragma once

#include <string>
#include <vector>

#include "circdyn/group_action.hpp"

namespace circdyn::presets {

// S = [[0,-1],[1,0]], T = [[1,1],[0,1]].
ActionSpec psl2z();

// Level-two congruence generators A = [[1,2],[0,1]], B = [[1,0],[2,1]];
// they generate a free, torsion free, non-uniform lattice.
ActionSpec gamma2();

// gamma2() lifted to the degree-k cyclic cover (germ 0 for each generator).
// For k = 2 this is the linear action on rays.
ActionSpec gamma2_cover(int k);

// Ping-pong pair with multiplier `lambda`: A = diag(lambda, 1/lambda) and
// B = R A R^{-1} for the quarter-turn R of RP^1. Gaps persist for lambda
// large enough (4 by default).
ActionSpec schottky(double lambda = 4.0);

// Rotations by the given angles, labelled r0, r1, ...
ActionSpec rotations(const std::vector<double>& angles);

// A single hyperbolic Moebius map diag(lambda, 1/lambda).
ActionSpec hyperbolic(double lambda = 2.0);

// One generator acting trivially.
ActionSpec identity_action();

// Names accepted by `by_name`.
std::vector<std::string> names();
ActionSpec by_name(const std::string& name);

} // namespace circdyn::presets
