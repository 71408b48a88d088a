#ifndef ORLICZ_REARRANGE_HPP
#define ORLICZ_REARRANGE_HPP

#include <functional>
#include <span>
#include <vector>

#include "orlicz/function.hpp"

namespace orlicz {

/// Values sorted nonincreasing together with their prefix sums
/// (prefix[k] = sum of the k largest values, prefix[0] = 0).
struct Rearrangement {
    std::vector<double> values;
    std::vector<double> prefix;

    static Rearrangement of(std::span<const double> raw);
};

/// Maximize sum_i weights[i] * gain(levels[i]) over integer levels with
/// sum levels = budget and 0 <= levels[i] <= cap. gain must be concave
/// nondecreasing with gain(0) = 0; weights nonincreasing.
struct AllocationProblem {
    std::vector<double> weights;
    std::function<double(int)> gain;
    int budget = 0;
    int cap = 0;
};

struct Allocation {
    std::vector<int> levels;
    double objective = 0.0;
};

/// Greedy over marginal gains, optimal for concave gains. Ties between equal
/// marginals break toward the lowest slot index.
Allocation allocate_greedy(const AllocationProblem& prob);

/// max over k_1+...+k_n = m of sum_i (y_1+...+y_{k_i}) |x_i|. Requires
/// m >= len(x); symmetric in permutations and signs of x.
double norm_y(std::span<const double> x, const WeightVector& y, int m);

/// The Orlicz function N whose conjugate inverse interpolates the normalized
/// prefix sums: N^{*-1}(l/total) = prefix[l]/total, affine in between and
/// extended past the last grid point by terminal-slope continuation. All
/// steps are exact on breakpoints.
OrliczFunction orlicz_from_prefix(const Rearrangement& r, int total);

/// The n^2 numbers a_i * n * (M^{*-1}(j/n) - M^{*-1}((j-1)/n)), i,j = 1..n.
std::vector<double> weight_increment_products(const WeightVector& a, const OrliczFunction& m_fn);

/// N built from weights a and M(t) = t^r through the rearranged increment
/// products, on the full l/n^2 grid.
OrliczFunction orlicz_from_weights(const WeightVector& a, double r);

/// The coarse variant: the same N^{*-1} sampled at l/n only, affine between
/// those points. The prefix/tail expression
///   C_r * [ (1/n) sum_{i<=l} a_i + (l/n)^{1/r*} ((1/n) sum_{i>l} a_i^r)^{1/r} ]
/// brackets its grid values within [1,8] but is itself neither monotone nor
/// concave, so it cannot serve as the interpolant directly; see
/// prefix_tail_grid for the report values.
OrliczFunction coarse_orlicz_from_weights(const WeightVector& a, double r);

/// The prefix/tail expression above for l = 0..n.
std::vector<double> prefix_tail_grid(const WeightVector& a, double r);

/// Two-exponent generalization (1 <= p < r): coarse construction applied to
/// (a_i^p) with exponent r/p, composed with t^p.
OrliczFunction two_exponent_orlicz(const WeightVector& a, double p, double r);

/// Two-exponent prefix/tail expression
///   C_r * [ (l/n)^{1/p*} ((1/n) sum_{i<=l} a_i^p)^{1/p}
///         + (l/n)^{1/r*} ((1/n) sum_{i>l} a_i^r)^{1/r} ],  l = 0..n.
std::vector<double> two_exponent_grid(const WeightVector& a, double p, double r);

/// y_l = n * (M^{*-1}(l/n) - M^{*-1}((l-1)/n)); nonincreasing by concavity
/// of the conjugate inverse. Entries may degenerate to zero for indicator-type
/// conjugates; those are clamped to a tiny positive floor so the result is a
/// valid weight vector.
WeightVector y_from_function(const OrliczFunction& m_fn, int n);

/// Per-grid-point comparison of M^{*-1}(l/n) against
/// (1/n) sum_{i<=l} y_i + (l/n)^{1/p*} ((1/n) sum_{i>l} y_i^p)^{1/p},
/// which should stay within [1, 3] of it.
struct ChainReport {
    bool lower_ok = true;       ///< middle expression >= M^{*-1} everywhere
    double max_ratio = 0.0;     ///< max over l of middle / M^{*-1}
    std::vector<double> ratios; ///< per-l ratios, l = 1..n
};

ChainReport prefix_tail_chain(const OrliczFunction& m_fn, double p, int n);

}  // namespace orlicz

#endif
