#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circdyn/boundary.hpp"
#include "circdyn/group_action.hpp"

namespace circdyn {

inline constexpr double kMoveTol = 1e-4;

// How walk limit points are supplemented by their translates s w, which
// are limit points of the walks s w and keep the moves of w exact.
enum class Translates {
    none,
    letters,  // every letter image of every walk
    gap_fill, // letter images of samples, placed into the widest gaps first
};

struct BoundaryParams {
    std::size_t sample_count = 4000;
    int walk_length = 300;
    std::uint64_t seed = 1;
    double dirac_tol = kDiracTol;
    double move_tol = kMoveTol;
    Translates translates = Translates::gap_fill;
    double coverage_min = 0.5;
};

// Boundary samples realized by their limit points, with the generator
// action read off by matching images against the sample set.
struct SampledBoundary {
    std::vector<CirclePoint> points;
    std::vector<double> weights; // nu_B
    // moves[g][id]: sample matching generator g applied to `id`, or -1.
    std::vector<std::vector<std::int64_t>> moves;
    std::vector<std::string> labels;
    double move_tol = kMoveTol;

    std::size_t size() const { return points.size(); }
    double coverage(std::size_t generator) const;
};

// Builds moves by nearest-point matching within move_tol. Weights default
// to uniform.
SampledBoundary make_boundary(const ActionSpec& spec, std::vector<CirclePoint> points, double move_tol = kMoveTol,
                              std::vector<double> weights = {});

// Limit points of converged walks and their translates. With letters or
// gap_fill, sample_count / (1 + letters) samples come from walks.
// Throws Error("insufficient coverage") when a generator move map covers
// less than coverage_min of the samples, and Error("degenerate boundary")
// when too few walks converge.
SampledBoundary sample_boundary(const ActionSpec& spec, const BoundaryParams& params, unsigned workers = 1);

// omega(x, y, z) = orient of the three limit points.
class SampledCocycle {
public:
    SampledCocycle() = default;
    explicit SampledCocycle(std::vector<CirclePoint> points) : points_(std::move(points)) {}

    int operator()(std::size_t x, std::size_t y, std::size_t z) const {
        return orient(points_[x], points_[y], points_[z]);
    }
    // In the coincidence band: some pair of the three points coincides.
    bool flagged(std::size_t x, std::size_t y, std::size_t z) const { return (*this)(x, y, z) == 0; }
    std::size_t size() const { return points_.size(); }
    const std::vector<CirclePoint>& points() const { return points_; }

private:
    std::vector<CirclePoint> points_;
};

// Needs at least three samples. Throws Error("degenerate boundary") when
// more than 10% of `audit_triples` random triples of distinct ids are
// flagged.
SampledCocycle extract_cocycle(const SampledBoundary& sb, std::size_t audit_triples = 1000, std::uint64_t seed = 1);

// {z : omega(a, z, x) = +1}, ascending ids.
std::vector<std::size_t> interval_set(const SampledCocycle& omega, std::size_t a, std::size_t x);

// f_a(x) = nu(I(a, x)) mod 1 for every id.
std::vector<double> f_a_map(const SampledCocycle& omega, std::size_t a, const std::vector<double>& weights);

// Fraction of unordered pairs with |f_a(x) - f_a(y)| < 1/(4N) on the circle.
double collision_fraction(const std::vector<double>& f);

// Sample whose f_a values are closest to uniform (Kolmogorov distance)
// among `candidates` evenly spaced ids.
std::size_t choose_base_point(const SampledCocycle& omega, const std::vector<double>& weights,
                              std::size_t candidates = 8);

// phi(x) = xi([0, f(x))) with xi the pushforward of the weights under f.
std::vector<double> rectify(const std::vector<double>& f, const std::vector<double>& weights);

// Monotone degree-one circle map through noisy graph points: ties in x
// averaged, targets unwrapped, then isotonic regression. Throws
// Error("graph not a homeomorphism") when the targets do not wind once.
Homeo monotone_circle_fit(std::vector<std::pair<double, double>> graph, double min_step = 1e-12);

struct RebuildParams {
    double graph_slack = 0.02;
    std::size_t audit_triples = 20000;
    std::uint64_t seed = 1;
};

// PL generator g fitted through (phi(x), phi(g x)). Throws
// Error("graph not a homeomorphism") when more than graph_slack of random
// graph triples reverse orientation, and Error("insufficient coverage")
// below the boundary's coverage requirement.
ActionSpec rebuild_action(const std::vector<double>& phi, const SampledBoundary& sb, const RebuildParams& params = {},
                          double coverage_min = 0.5);

struct AuditResult {
    std::string name;
    std::size_t checked = 0;
    std::size_t failures = 0;
    std::size_t skipped = 0; // coincidence band or collisions
    bool passed() const { return failures == 0; }
};

struct AuditParams {
    std::size_t tuples = 10000;
    std::uint64_t seed = 7;
    unsigned workers = 1;
};

// Transposition sign flips and cyclic invariance.
AuditResult audit_alternating(const SampledCocycle& omega, const AuditParams& params);
// Coboundary of omega vanishes on 4-tuples.
AuditResult audit_cocycle_identity(const SampledCocycle& omega, const AuditParams& params);
// Values in {-1, +1} off the band; band hits are counted as skipped.
AuditResult audit_values(const SampledCocycle& omega, const AuditParams& params);
// omega(gx, gy, gz) = omega(x, y, z) over the move maps. Triples whose
// points or images lie within move_tol of each other are skipped: a
// nearest-point match cannot resolve their order.
AuditResult audit_invariance(const SampledCocycle& omega, const SampledBoundary& sb, const AuditParams& params);
// I(a,x) and I(x,a) partition the ids off the band and are disjoint.
AuditResult audit_interval_partition(const SampledCocycle& omega, const AuditParams& params);
// For b in I(a,c): I(a,b), I(b,c) are disjoint, contained in I(a,c), and
// exhaust it up to b and band points.
AuditResult audit_nesting(const SampledCocycle& omega, const AuditParams& params);
// Exactly one of x in I(a,y) with nu(I(a,x)) < nu(I(a,y)), or the mirrored
// statement, holds.
AuditResult audit_dichotomy(const SampledCocycle& omega, const std::vector<double>& weights,
                            const AuditParams& params);
// o(f(x), f(y), f(z)) = omega(x, y, z) off collisions.
AuditResult audit_order(const SampledCocycle& omega, const std::vector<double>& f, const AuditParams& params);

struct RoundTripParams {
    BoundaryParams boundary;
    AuditParams audit;
    RebuildParams rebuild;
    std::size_t base_candidates = 8;
    std::size_t grid = kDefaultGrid;
    int word_length = 3;
    std::int64_t rotation_iterations = 100000;
    unsigned workers = 1;
};

struct RoundTripReport {
    std::size_t samples = 0;
    std::size_t base_point = 0;
    std::vector<double> coverage;
    std::vector<AuditResult> audits;
    double collision_fraction = 0.0;
    double rectified_max_gap = 0.0;
    std::vector<double> generator_distance; // after alignment, per generator
    double max_generator_distance = 0.0;
    bool euler_match = true;
    std::vector<std::string> euler_mismatches;
    double max_rotation_error = 0.0;
    std::string worst_rotation_word;
    std::vector<double> phi; // rectified coordinate per sample id
    ActionSpec rebuilt;
    Homeo alignment; // h with h(phi(x)) close to the limit point of x
};

// Sample, extract, audit, rectify, rebuild, align, compare.
RoundTripReport round_trip(const ActionSpec& spec, const RoundTripParams& params);

} // namespace circdyn
