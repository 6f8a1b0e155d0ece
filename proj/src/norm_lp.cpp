#include "circdyn/norm_lp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "circdyn/error.hpp"

namespace circdyn {

namespace {

using Fingerprint = std::array<double, kFingerprintPoints>;
constexpr std::int64_t kBuckets = 1000000;
constexpr std::size_t kMaxTableauEntries = 40000000;

Fingerprint fingerprint_of(const Homeo& f) {
    Fingerprint fp;
    for (std::size_t j = 0; j < kFingerprintPoints; ++j) {
        fp[j] = f((static_cast<double>(j) + 0.5) / static_cast<double>(kFingerprintPoints));
    }
    return fp;
}

// Elements keyed by the bucket of their first fingerprint value.
class ElementIndex {
public:
    std::int32_t find(const Fingerprint& fp) const {
        const std::int64_t key = bucket(fp[0]);
        for (std::int64_t d = -1; d <= 1; ++d) {
            const auto it = buckets_.find((key + d + kBuckets) % kBuckets);
            if (it == buckets_.end()) continue;
            for (std::int32_t id : it->second) {
                if (same(fps_[static_cast<std::size_t>(id)], fp)) return id;
            }
        }
        return -1;
    }
    std::int32_t insert(const Fingerprint& fp) {
        const auto id = static_cast<std::int32_t>(fps_.size());
        fps_.push_back(fp);
        buckets_[bucket(fp[0])].push_back(id);
        return id;
    }
    const Fingerprint& operator[](std::size_t id) const { return fps_[id]; }

private:
    static std::int64_t bucket(double v) {
        return std::min<std::int64_t>(kBuckets - 1, static_cast<std::int64_t>(v * static_cast<double>(kBuckets)));
    }
    static bool same(const Fingerprint& a, const Fingerprint& b) {
        for (std::size_t j = 0; j < kFingerprintPoints; ++j) {
            if (!coincide(a[j], b[j])) return false;
        }
        return true;
    }

    std::vector<Fingerprint> fps_;
    std::unordered_map<std::int64_t, std::vector<std::int32_t>> buckets_;
};

NormBound solve_cochain_lp(const CocycleTable& ball, const std::vector<double>& cochain, const SimplexOptions& options) {
    const std::size_t n = ball.size();
    struct Pair {
        std::size_t g, h, gh;
        double c;
    };
    std::vector<Pair> pairs;
    for (std::size_t g = 0; g < n; ++g) {
        for (std::size_t h = 0; h < n; ++h) {
            const auto gh = ball.mult(g, h);
            if (gh >= 0) pairs.push_back({g, h, static_cast<std::size_t>(gh), cochain[g * n + h]});
        }
    }

    if ((n + 1) * (2 * pairs.size() + n + 2) > kMaxTableauEntries) {
        throw Error("ball too large", std::to_string(pairs.size()) + " in-ball pairs exceed the dense LP budget");
    }
    // Dual: maximize sum_p c_p (u_p - v_p) subject to
    //   sum_p (u_p - v_p)(e_g + e_h - e_gh) = 0 and sum_p (u_p + v_p) <= 1.
    LinearProgram lp;
    lp.rows = n + 1;
    lp.cols = 2 * pairs.size() + 1; // last column: slack of the mass row
    lp.a.assign(lp.rows * lp.cols, 0.0);
    lp.rhs.assign(lp.rows, 0.0);
    lp.rhs[n] = 1.0;
    lp.objective.assign(lp.cols, 0.0);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (int side = 0; side < 2; ++side) {
            const std::size_t col = 2 * p + static_cast<std::size_t>(side);
            const double s = side == 0 ? 1.0 : -1.0;
            lp.at(pairs[p].g, col) += s;
            lp.at(pairs[p].h, col) += s;
            lp.at(pairs[p].gh, col) -= s;
            lp.at(n, col) = 1.0;
            lp.objective[col] = s * pairs[p].c;
        }
    }
    lp.at(n, lp.cols - 1) = 1.0;

    const SimplexResult res = solve_simplex(lp, options);
    if (res.status != SimplexResult::Status::optimal) {
        throw Error("LP unbounded/infeasible", "simplex stopped after " + std::to_string(res.iterations) + " pivots");
    }
    NormBound out;
    out.lower_bound = std::max(0.0, res.value);
    out.b.assign(res.duals.begin(), res.duals.begin() + static_cast<std::ptrdiff_t>(n));
    out.pairs = pairs.size();
    out.iterations = res.iterations;
    double worst = 0.0;
    for (const auto& p : pairs) worst = std::max(worst, std::abs(p.c - (out.b[p.g] + out.b[p.h] - out.b[p.gh])));
    out.certificate_excess = worst - out.lower_bound;
    return out;
}

} // namespace

std::size_t CocycleTable::pair_count() const {
    return static_cast<std::size_t>(std::count_if(product.begin(), product.end(), [](std::int32_t v) { return v >= 0; }));
}

std::vector<std::string> CocycleTable::word_strings() const {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.to_string(labels));
    return out;
}

CocycleTable build_table(const ActionSpec& spec, int radius, std::size_t cap) {
    if (radius < 1) throw ConfigError("radius must be at least 1");
    if (ball_size(spec.generator_count(), radius) > kWordCap) {
        throw Error("ball too large", std::to_string(ball_size(spec.generator_count(), radius)) + " words at radius " +
                                          std::to_string(radius));
    }
    const WordTree tree = WordTree::build(spec.generator_count(), radius);
    CocycleTable t;
    t.radius = radius;
    t.labels = spec.labels();
    ElementIndex index;
    for (std::size_t node = 0; node < tree.size(); ++node) {
        const Word w = tree.word(node);
        Homeo f = spec.evaluate(w);
        const Fingerprint fp = fingerprint_of(f);
        if (index.find(fp) >= 0) {
            ++t.merged;
            continue;
        }
        if (t.words.size() >= cap) {
            throw Error("ball too large", "more than " + std::to_string(cap) + " elements at radius " + std::to_string(radius));
        }
        index.insert(fp);
        t.words.push_back(w);
        t.maps.push_back(std::move(f));
    }

    const std::size_t n = t.size();
    t.product.assign(n * n, -1);
    t.values.assign(n * n, 0);
    for (std::size_t g = 0; g < n; ++g) {
        for (std::size_t h = 0; h < n; ++h) {
            Fingerprint fp;
            for (std::size_t j = 0; j < kFingerprintPoints; ++j) fp[j] = t.maps[g](index[h][j]);
            const std::int32_t gh = index.find(fp);
            t.product[g * n + h] = gh;
            if (gh >= 0) t.values[g * n + h] = static_cast<std::int8_t>(euler_cocycle(t.maps[g], t.maps[h]));
        }
    }

    for (std::size_t g = 0; g < n; ++g) {
        for (std::size_t h = 0; h < n; ++h) {
            const auto gh = t.mult(g, h);
            if (gh < 0) continue;
            for (std::size_t k = 0; k < n; ++k) {
                const auto hk = t.mult(h, k);
                if (hk < 0) continue;
                const auto left = t.mult(static_cast<std::size_t>(gh), k);
                const auto right = t.mult(g, static_cast<std::size_t>(hk));
                if (left < 0 || right < 0) continue;
                const int defect = t.value(h, k) - t.value(static_cast<std::size_t>(gh), k) +
                                   t.value(g, static_cast<std::size_t>(hk)) - t.value(g, h);
                if (left != right || defect != 0) {
                    throw Error("identity violation", "at (" + t.words[g].to_string(t.labels) + ", " +
                                                          t.words[h].to_string(t.labels) + ", " +
                                                          t.words[k].to_string(t.labels) + ")");
                }
            }
        }
    }
    return t;
}

NormBound solve_norm_lp(const CocycleTable& table, const SimplexOptions& options) {
    std::vector<double> c(table.values.begin(), table.values.end());
    return solve_cochain_lp(table, c, options);
}

NormBound norm_of_combination(const std::vector<CocycleTable>& tables, const std::vector<int>& coefficients,
                              const SimplexOptions& options) {
    if (tables.empty() || tables.size() != coefficients.size()) {
        throw ConfigError("need one coefficient per table");
    }
    const CocycleTable& ball = tables.front();
    const auto words = ball.word_strings();
    for (const auto& t : tables) {
        if (t.word_strings() != words || t.product != ball.product) {
            throw Error("ball mismatch", "tables must share the ball words and products");
        }
    }
    std::vector<double> c(ball.values.size(), 0.0);
    for (std::size_t i = 0; i < tables.size(); ++i) {
        for (std::size_t p = 0; p < c.size(); ++p) c[p] += coefficients[i] * tables[i].values[p];
    }
    return solve_cochain_lp(ball, c, options);
}

} // namespace circdyn
