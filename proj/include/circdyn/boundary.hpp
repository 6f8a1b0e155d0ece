#pragma once

#include <cstdint>
#include <vector>

#include "circdyn/circle.hpp"
#include "circdyn/group_action.hpp"

namespace circdyn {

inline constexpr double kDiracTol = 1e-3;
inline constexpr std::size_t kDefaultNuAtoms = 64;

struct WalkConfig {
    // One weight per letter in ActionSpec::letters() order; empty means
    // uniform over all generators and inverses.
    std::vector<double> weights;
    int walk_length = 60;
    std::size_t sample_count = 200;
    std::uint64_t seed = 1;
    double dirac_tol = kDiracTol;
    // Covering arc length after every step; quadratic in walk_length.
    bool record_diameters = true;

    // Validated weights for `letters` letters: positive and summing to one.
    std::vector<double> resolved_weights(std::size_t letters) const;
    // True when each generator and its inverse carry equal weight.
    bool symmetric(std::size_t letters) const;
};

// Increments s_1, ..., s_n of one walk. The walk at time n is the product
// s_1 s_2 ... s_n, so s_n acts first.
std::vector<Letter> sample_steps(const ActionSpec& spec, const WalkConfig& cfg, std::size_t sample_id);

// (s_1 ... s_m) nu for m = 1, ..., n.
std::vector<EmpiricalMeasure> push_measure(const ActionSpec& spec, const std::vector<Letter>& steps,
                                           const EmpiricalMeasure& nu);

struct BoundarySample {
    std::size_t id = 0;
    std::vector<Letter> steps;
    CirclePoint limit_point;
    bool converged = false;
    double final_diameter = 1.0;
    double final_two_cluster_diameter = 1.0;
    std::vector<double> diameters; // after each step, if recorded

    Word trajectory() const { return Word(steps); }
};

// One walk pushed to the end; limit_point is the covering arc midpoint.
BoundarySample run_walk(const ActionSpec& spec, const WalkConfig& cfg, const EmpiricalMeasure& nu, std::size_t id);

struct ProximalitySummary {
    double fraction_converged = 0.0;
    double fraction_two_cluster = 0.0; // two-cluster diameter below dirac_tol
    double median_final_diameter = 1.0;
    std::vector<BoundarySample> samples;
};

// sample_count independent walks. Results do not depend on `workers`.
ProximalitySummary proximality_experiment(const ActionSpec& spec, const WalkConfig& cfg,
                                          const EmpiricalMeasure& nu = EmpiricalMeasure::uniform_grid(kDefaultNuAtoms),
                                          unsigned workers = 1);

// Largest distance between sample.limit_point and the covering arc
// midpoint of (s_1 ... s_n e) nu over the extra elements e. Throws
// Error("precondition") for a sample that did not converge.
double stability_check(const BoundarySample& sample, const ActionSpec& spec, const std::vector<Word>& extra_elements,
                       const EmpiricalMeasure& nu = EmpiricalMeasure::uniform_grid(kDefaultNuAtoms));

} // namespace circdyn
