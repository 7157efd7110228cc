// Independent reference implementations used only by tests. None of these
// call into the library code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

/// Deterministic test RNG: 53-bit uniforms from mt19937_64.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    double normal() {
        std::normal_distribution<double> d;
        return d(engine_);
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Pareto(alpha, x_m = 1) by inverse CDF: X = (1 - U)^(-1/alpha).
inline std::vector<double> pareto_sample(double alpha, std::size_t n, std::uint64_t seed) {
    TestRng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = std::pow(1.0 - rng.uniform(), -1.0 / alpha);
    return x;
}

/// Exact Pareto quantile grid at probabilities i / (n + 1).
inline std::vector<double> pareto_grid(double alpha, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i + 1) / static_cast<double>(n + 1);
        x[i] = std::pow(1.0 - u, -1.0 / alpha);
    }
    return x;
}

/// Inverse empirical CDF by counting: the smallest sample value x with
/// #{r <= x} >= q n (same 1e-9 slack on q n as the library convention).
inline double var_by_counting(const std::vector<double>& s, double alpha_level) {
    const double need = (1.0 - alpha_level) * static_cast<double>(s.size()) - 1e-9;
    double best = std::numeric_limits<double>::infinity();
    for (double x : s) {
        std::size_t count = 0;
        for (double r : s)
            if (r <= x) ++count;
        if (static_cast<double>(count) >= need && x < best) best = x;
    }
    return best;
}

/// Mean of the sorted prefix at or below the VaR value.
inline double cvar_by_sorting(std::vector<double> s, double var) {
    std::sort(s.begin(), s.end());
    double sum = 0.0;
    std::size_t m = 0;
    while (m < s.size() && s[m] <= var) sum += s[m++];
    return sum / static_cast<double>(m);
}

/// Two-pass mean / unbiased std in long double.
struct Moments {
    double mean, std_dev, min, max;
};
inline Moments moments(const std::vector<double>& x) {
    long double sum = 0;
    for (double v : x) sum += v;
    const long double mean = sum / x.size();
    long double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / (x.size() - 1))),
            *std::min_element(x.begin(), x.end()), *std::max_element(x.begin(), x.end())};
}

/// Pearson correlation by direct summation in long double.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    long double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) ma += a[i], mb += b[i];
    ma /= n;
    mb /= n;
    long double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return static_cast<double>(sab / std::sqrt(saa * sbb));
}

/// Per-node triangle counts and degrees by enumerating every vertex triple of
/// the undirected support (edge iff w[i][j] > 0 or w[j][i] > 0).
struct TriangleCount {
    std::vector<std::size_t> triangles, degree;
    std::vector<double> clustering;
};
inline TriangleCount triangles(const std::vector<std::vector<double>>& w) {
    const std::size_t n = w.size();
    auto adj = [&](std::size_t i, std::size_t j) { return i != j && (w[i][j] > 0 || w[j][i] > 0); };
    TriangleCount out{std::vector<std::size_t>(n), std::vector<std::size_t>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (adj(i, j)) ++out.degree[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t l = j + 1; l < n; ++l)
                if (adj(i, j) && adj(j, l) && adj(i, l)) ++out.triangles[i], ++out.triangles[j], ++out.triangles[l];
    for (std::size_t i = 0; i < n; ++i) {
        const double k = static_cast<double>(out.degree[i]);
        out.clustering[i] = out.degree[i] < 2 ? 0.0 : 2.0 * out.triangles[i] / (k * (k - 1));
    }
    return out;
}

/// Brute-force capital cascade oracle.
///
/// Enumerates every assignment of a default round t_i in {0, ..., n-1, never}
/// and keeps the assignments that are self-consistent: asset j defaults at the
/// first round r whose capital, after subtracting the losses sent by assets
/// defaulting in rounds < r, falls below its floor. Each defaulter i sends
/// max(0, w_ij - (K_i - D_i)) with K_i its capital at its own default round.
/// Returns the default sets of all consistent assignments.
struct CapitalInstance {
    std::vector<std::vector<double>> w;  // filtered exposures, zero diagonal
    std::vector<double> capital;         // post-shock K_i
    std::vector<double> floor;           // K_min,i
};

inline std::vector<std::vector<bool>> consistent_default_sets(const CapitalInstance& inst) {
    const std::size_t n = inst.w.size();
    const std::size_t never = n;
    std::vector<double> incoming(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) incoming[i] += inst.w[j][i];

    std::vector<std::vector<bool>> found;
    std::vector<std::size_t> t(n, 0);
    for (;;) {
        // Capital of every asset after each round's losses, built round by round.
        std::vector<std::vector<double>> cap_at(n + 1, inst.capital);  // cap_at[r][j]: before round r's check
        std::vector<double> kdef(n, std::numeric_limits<double>::quiet_NaN());
        bool consistent = true;
        for (std::size_t r = 0; r <= n && consistent; ++r) {
            if (r > 0) {
                cap_at[r] = cap_at[r - 1];
                for (std::size_t i = 0; i < n; ++i) {
                    if (t[i] != r - 1) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        if (inst.w[i][j] > 0) cap_at[r][j] -= std::max(0.0, inst.w[i][j] - (kdef[i] - incoming[i]));
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                const bool below = cap_at[r][j] < inst.floor[j];
                const bool earlier = t[j] != never && t[j] < r;
                if (t[j] != never && t[j] == r) {
                    if (!below) consistent = false;
                    kdef[j] = cap_at[r][j];
                } else if (!earlier && below) {
                    consistent = false;  // should have defaulted now
                }
            }
        }
        if (consistent) {
            std::vector<bool> set(n);
            for (std::size_t j = 0; j < n; ++j) set[j] = t[j] != never;
            found.push_back(set);
        }
        std::size_t pos = 0;
        while (pos < n && t[pos] == never) t[pos++] = 0;
        if (pos == n) break;
        ++t[pos];
    }
    return found;
}

/// Random directed exposure network on 2..max_nodes assets with reference
/// prices, a shocked subset and a shock grid value. Used by the brute-force
/// cascade checks.
struct CascadeCase {
    std::vector<std::vector<double>> w;
    std::vector<double> prices;
    std::vector<std::size_t> targets;
    double shock = 0.0;
};

inline CascadeCase random_cascade_case(TestRng& rng, std::size_t max_nodes, double shock) {
    CascadeCase c;
    const std::size_t n = 2 + rng.index(max_nodes - 1);
    c.prices.resize(n);
    for (auto& p : c.prices) p = rng.uniform(5.0, 50.0);
    const double density = rng.uniform(0.2, 0.9);
    c.w.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && rng.uniform() < density) c.w[i][j] = rng.uniform(0.3, 12.0);
    const std::size_t k = 1 + rng.index(std::min<std::size_t>(n, 2));
    while (c.targets.size() < k) {
        const std::size_t t = rng.index(n);
        if (std::find(c.targets.begin(), c.targets.end(), t) == c.targets.end()) c.targets.push_back(t);
    }
    c.shock = shock;
    return c;
}

/// Capital instance for a case under K = cap * P, K_min = floor * P.
inline CapitalInstance capital_instance(const CascadeCase& c, double cap, double floor) {
    CapitalInstance inst{c.w, {}, {}};
    for (double p : c.prices) inst.capital.push_back(cap * p), inst.floor.push_back(floor * p);
    for (std::size_t t : c.targets) inst.capital[t] -= c.shock * c.prices[t];
    return inst;
}

/// Direct evaluation of D_{t+1} = D_t OR 1[sum_j w_ij D_t(j) > tau_i].
inline std::vector<bool> threshold_step(const std::vector<std::vector<double>>& w, const std::vector<double>& tau,
                                        const std::vector<bool>& d) {
    std::vector<bool> next = d;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) s += d[j] ? w[i][j] : 0.0;
        if (s > tau[i]) next[i] = true;
    }
    return next;
}

}  // namespace oracle
