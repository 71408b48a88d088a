#ifndef ORLICZ_PERM_AVERAGE_HPP
#define ORLICZ_PERM_AVERAGE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "orlicz/function.hpp"
#include "orlicz/rng.hpp"

namespace orlicz {

enum class Mode { exact, monte_carlo, automatic };

/// Result of a permutation average: either the exact enumeration value or a
/// Monte Carlo estimate with a normal-approximation 95% confidence interval.
struct AverageEstimate {
    double value = 0.0;
    bool exact = true;
    std::uint64_t samples = 0;  ///< n! (or products) for exact, sample count for MC
    double ci95_halfwidth = 0.0;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
};

/// Enumeration caps: exact mode is refused above these dimensions.
/// Overridable through the ORLICZ_EMBED_CAPS environment variable
/// ("single=9,double=7,triple=6").
struct EnumerationCaps {
    int single = 8;
    int double_perm = 6;
    int triple = 5;

    static EnumerationCaps from_env();
};

struct McConfig {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Deterministic block-parallel Monte Carlo mean of fn(rng, sample_index).
/// The block decomposition and per-block streams depend only on the seed, so
/// the result is identical for any thread count.
AverageEstimate mc_mean(std::uint64_t samples, std::uint64_t seed, int threads,
                        const std::function<double(CounterRng&, std::uint64_t)>& fn);

/// Ave_pi || (x_i a_pi(i))_i ||_M over the symmetric group.
AverageEstimate avg_weighted_norm(std::span<const double> x, const WeightVector& a,
                                  const OrliczFunction& m_fn, Mode mode, const McConfig& cfg = {},
                                  const EnumerationCaps& caps = EnumerationCaps::from_env());

/// Ave_pi max_i | x_i * n * (M^{*-1}(pi(i)/n) - M^{*-1}((pi(i)-1)/n)) |.
AverageEstimate avg_max_increment(std::span<const double> x, const OrliczFunction& m_fn, Mode mode,
                                  const McConfig& cfg = {},
                                  const EnumerationCaps& caps = EnumerationCaps::from_env());

/// Nonnegative n*n*n tensor for the double-permutation maximum average.
struct TensorB {
    int n = 0;
    std::vector<double> entries;  // [i*n*n + k*n + l]

    double at(int i, int k, int l) const { return entries[(i * n + k) * n + l]; }
    double& at(int i, int k, int l) { return entries[(i * n + k) * n + l]; }
    static TensorB random(int n, CounterRng& rng);
};

/// Ave_{pi,sigma} max_i B(i, pi(i), sigma(i)).
AverageEstimate avg_max_tensor(const TensorB& b, Mode mode, const McConfig& cfg = {},
                               const EnumerationCaps& caps = EnumerationCaps::from_env());

/// Ave_pi (sum_i |x_i a_pi(i)|^2)^{1/2} with a_i = (n/i)^{1/p}.
AverageEstimate avg_lp_generator(std::span<const double> x, double p, Mode mode,
                                 const McConfig& cfg = {},
                                 const EnumerationCaps& caps = EnumerationCaps::from_env());

/// Ave_pi (sum_i |x_i a_pi(i)|^r)^{1/r}.
AverageEstimate avg_weighted_lr(std::span<const double> x, const WeightVector& a, double r,
                                Mode mode, const McConfig& cfg = {},
                                const EnumerationCaps& caps = EnumerationCaps::from_env());

/// Ave_pi ((sum_i |x_i a_pi(i)|^r)^{p/r})^{1/p} -- the mixed-exponent average.
AverageEstimate avg_weighted_lr_lp(std::span<const double> x, const WeightVector& a, double r,
                                   double p, Mode mode, const McConfig& cfg = {},
                                   const EnumerationCaps& caps = EnumerationCaps::from_env());

/// Ave_{pi,sigma,eta} (sum_{i,j} |a_ij x_pi(i) y_sigma(j) z_eta(j)|^2)^{1/2}.
AverageEstimate avg_matrix_triple(std::span<const double> a, int n, const WeightVector& x,
                                  const WeightVector& y, const WeightVector& z, Mode mode,
                                  const McConfig& cfg = {},
                                  const EnumerationCaps& caps = EnumerationCaps::from_env());

}  // namespace orlicz

#endif
