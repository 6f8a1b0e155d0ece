#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circdyn/group_action.hpp"
#include "circdyn/simplex.hpp"

namespace circdyn {

inline constexpr std::size_t kFingerprintPoints = 64;
inline constexpr std::size_t kBallCap = 1024;

// Euler cocycle restricted to a word ball. Words whose maps agree within
// kEpsCircle on a 64-point grid are one element; the first word found in
// breadth-first order represents it.
struct CocycleTable {
    int radius = 0;
    std::vector<std::string> labels;
    std::vector<Word> words; // words[0] is the identity
    std::vector<Homeo> maps;
    std::size_t merged = 0; // ball words identified with an earlier element
    // product[g * size() + h]: element g h, or -1 outside the ball.
    std::vector<std::int32_t> product;
    std::vector<std::int8_t> values; // c(g, h) where the product is defined

    std::size_t size() const { return words.size(); }
    std::int32_t mult(std::size_t g, std::size_t h) const { return product[g * size() + h]; }
    int value(std::size_t g, std::size_t h) const { return values[g * size() + h]; }
    std::size_t pair_count() const;
    std::vector<std::string> word_strings() const;
};

// Throws Error("ball too large") past `cap` elements and Error("identity
// violation") if c fails the cocycle identity on an in-ball triple.
CocycleTable build_table(const ActionSpec& spec, int radius, std::size_t cap = kBallCap);

struct NormBound {
    double lower_bound = 0.0;
    std::vector<double> b; // optimal cochain, one value per ball element
    std::size_t pairs = 0;
    std::size_t iterations = 0;
    // max over pairs of |c - db| minus lower_bound; nonpositive up to roundoff.
    double certificate_excess = 0.0;
};

// min t subject to |c(g,h) - (b(g) + b(h) - b(gh))| <= t over in-ball
// pairs, solved through its dual. Any bounded b on the whole group
// restricts to a feasible point, so t* bounds the norm from below.
NormBound solve_norm_lp(const CocycleTable& table, const SimplexOptions& options = {});

// The same LP for the integer cochain sum_i n_i c_i. Throws
// Error("ball mismatch") unless all tables share words and products.
NormBound norm_of_combination(const std::vector<CocycleTable>& tables, const std::vector<int>& coefficients,
                              const SimplexOptions& options = {});

} // namespace circdyn
