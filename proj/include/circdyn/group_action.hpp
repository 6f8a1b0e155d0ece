#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "circdyn/circle.hpp"
#include "circdyn/homeo.hpp"

namespace circdyn {

struct Letter {
    std::uint32_t generator = 0;
    std::int8_t exponent = 1; // +1 or -1

    Letter inverse() const { return {generator, static_cast<std::int8_t>(-exponent)}; }
    bool operator==(const Letter&) const = default;
};

// Freely reduced word l_1 l_2 ... l_n, read as the composition
// rho(l_1) o rho(l_2) o ... o rho(l_n).
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Letter> letters); // reduces freely

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t length() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }

    Word inverse() const;
    friend Word operator*(const Word& u, const Word& v);
    bool operator==(const Word&) const = default;

    // Space separated labels, inverses written as `label^-1`; "e" for the
    // empty word.
    std::string to_string(const std::vector<std::string>& labels) const;
    static Word parse(const std::string& text, const std::vector<std::string>& labels);

private:
    std::vector<Letter> letters_;
};

// Finitely many labelled generators; inverses are available implicitly.
class ActionSpec {
public:
    struct Generator {
        std::string label;
        Homeo map;
    };

    ActionSpec() = default;
    explicit ActionSpec(std::vector<Generator> generators);

    std::size_t generator_count() const { return generators_.size(); }
    const std::vector<Generator>& generators() const { return generators_; }
    const std::vector<std::string>& labels() const { return labels_; }

    const Homeo& letter_map(Letter l) const {
        return l.exponent > 0 ? generators_[l.generator].map : inverses_[l.generator];
    }
    // All 2n letters: generator i at 2i, its inverse at 2i+1.
    std::vector<Letter> letters() const;

    Homeo evaluate(const Word& w) const;
    double apply(const Word& w, double x) const;

private:
    std::vector<Generator> generators_;
    std::vector<Homeo> inverses_;
    std::vector<std::string> labels_;
};

inline constexpr double kEpsOrbit = 1e-7;
inline constexpr std::size_t kDefaultGrid = 512;
inline constexpr int kDefaultRadius = 8;
inline constexpr std::size_t kWordCap = 200000;

// Number of freely reduced words of length <= radius on n generators.
std::uint64_t ball_size(std::size_t generators, int radius);

// All freely reduced words of length <= radius in breadth-first order.
// Node i has word letter[i] * word(parent[i]); node 0 is the empty word.
struct WordTree {
    std::vector<std::int32_t> parent;
    std::vector<Letter> letter;
    std::vector<std::uint16_t> depth;

    std::size_t size() const { return parent.size(); }
    Word word(std::size_t node) const;

    // Throws Error("orbit explosion") when the ball exceeds `cap` words.
    static WordTree build(std::size_t generators, int radius, std::size_t cap = kWordCap);
};

// Images of x under every word of the tree.
std::vector<double> propagate(const ActionSpec& spec, const WordTree& tree, double x);
// w^{-1}(q) for the word at `node`.
double apply_inverse(const ActionSpec& spec, const WordTree& tree, std::size_t node, double q);

struct Gap {
    std::size_t first_cell = 0; // inclusive
    std::size_t cells = 0;      // run length, wrapping past the last cell
    Arc arc(std::size_t grid) const;
};

struct OrbitClosure {
    std::size_t grid = 0;
    std::size_t points = 0; // distinct orbit points explored
    int depth = 0;          // word length at which exploration stopped
    std::vector<bool> occupied;
    std::vector<Gap> gaps; // maximal runs of empty cells
    std::size_t occupied_count() const;
    std::size_t largest_gap() const;
};

// Breadth-first orbit of `seed` under words of length <= radius. Images
// within eps_orbit of a known point are not expanded again. With
// resolution > 0 the circle is cut into that many cells and only the
// first point landing in each cell is expanded, so the search can run
// deep at bounded cost. Throws Error("orbit explosion") past `cap` points.
OrbitClosure orbit_closure(const ActionSpec& spec, CirclePoint seed, int radius, std::size_t grid = kDefaultGrid,
                           std::size_t resolution = 0, std::size_t cap = kWordCap);

struct ClassifyParams {
    std::size_t grid = kDefaultGrid;
    // Runs at radius/2 and radius with pruned exploration.
    int radius = 2048;
    std::size_t resolution = std::size_t{1} << 17;
    std::vector<double> seeds = {0.1234567, 0.3819660, 0.6180340, 0.8765432};
    double eps_orbit = kEpsOrbit;
    std::size_t max_finite_orbit = 64;
    std::size_t gap_min_cells = 3;
    std::size_t cap = kWordCap;
};

struct ClassifyEvidence {
    int radius_low = 0;
    int radius_high = 0;
    struct Run {
        double seed = 0.0;
        int radius = 0;
        std::size_t occupied = 0;
        std::size_t largest_gap = 0;
    };
    std::vector<Run> runs;
    std::vector<std::size_t> finite_orbit_sizes; // one per closed candidate
    std::size_t candidates_tested = 0;
};

struct Classification {
    enum class Kind { FiniteOrbit, Minimal, ExceptionalMinimal };
    Kind kind = Kind::Minimal;
    std::size_t orbit_size = 0;
    std::vector<Gap> gaps; // cells empty for every seed at the top radius
    ClassifyEvidence evidence;
};

std::string to_string(Classification::Kind kind);

// Trichotomy classifier. Throws Error("inconclusive") when the finite
// orbit search, occupancy and gap evidence disagree.
Classification classify(const ActionSpec& spec, const ClassifyParams& params = {});

// Finite orbit through x if its closure under the generators has at most
// `max_size` points (merged within eps) and every generator maps it onto
// itself to within eps / 100.
std::optional<std::vector<double>> finite_orbit(const ActionSpec& spec, double x, std::size_t max_size,
                                                double eps = kEpsOrbit);

// Circle points fixed by f, located by refining local minima of the
// displacement on a uniform grid.
std::vector<double> fixed_points(const Homeo& f, std::size_t grid = 2048, double tol = 1e-10);

inline constexpr double kContractTol = 1e-2;

struct Contraction {
    bool contracts = false;
    Word witness;
    double min_length = 1.0;
};

// Searches the ball of the given radius for the word with the shortest image
// of `arc`. Throws Error("arc not proper") unless 0 < length < 1.
Contraction contracts(const ActionSpec& spec, const Arc& arc, int radius, double tol = kContractTol,
                      std::size_t cap = kWordCap);

struct ThetaParams {
    int radius = 6;
    std::size_t samples = 512;
    // Passes pushing contractible arcs through the generators.
    int refine_iterations = 400;
    double contract_tol = kContractTol;
    int max_order = 12;
    double order_tol = 1e-3;
    std::size_t grid = kDefaultGrid;
    ClassifyParams classify;
    std::size_t cap = kWordCap;
};

struct ThetaResult {
    int order = 1;
    Homeo theta;
    std::vector<std::pair<double, double>> samples; // (x, theta(x))
    double period_residual = 0.0; // sup distance of theta^order to identity
    int refine_passes = 0;
};

// Maximal contractible arc [x, theta(x)) at the working radius, sampled,
// extended by equivariance, fitted, and tested for finite order. Errors: "precondition" for actions
// that are not minimal or do not contract any arc, "theta not periodic
// within tolerance".
ThetaResult detect_theta(const ActionSpec& spec, const ThetaParams& params = {});

// sup_w length contracted below tol starting at x: theta(x) - x mod 1.
double maximal_contractible_length(const ActionSpec& spec, const WordTree& tree, double x, double tol);

struct QuotientParams {
    std::size_t measure_atoms = 2048;
    std::size_t fit_points = 1024;
    double cover_tolerance = 5e-3;
    std::size_t check_grid = 64;
};

struct ProximalQuotient {
    ActionSpec quotient;
    ActionSpec conjugated;  // h g h^{-1}, commuting with rotation by 1/k
    Homeo conjugacy;        // h, with h theta h^{-1} close to rotation 1/k
    std::vector<std::int64_t> alpha; // per generator
    int k = 1;
};

// Conjugates theta to rotation by 1/k with h_{0,mu}, mu the theta-orbit
// average of uniform atoms, and pushes each generator through z -> kz.
// Throws Error("quotient inconsistent") when a pushed generator fails the
// covering relation check.
ProximalQuotient proximal_quotient(const ActionSpec& spec, int k, const Homeo& theta, const QuotientParams& params = {});

} // namespace circdyn
