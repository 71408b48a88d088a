#ifndef ORLICZ_EMBEDDING_HPP
#define ORLICZ_EMBEDDING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "orlicz/function.hpp"
#include "orlicz/perm_average.hpp"

namespace orlicz {

/// Mixed matrix norm: inner r-norm over the row index i for each column j,
/// then the outer Luxemburg norm over the column values.
struct MatrixSpaceNorm {
    OrliczFunction outer;
    double inner_r = 2.0;
    int n = 0;

    double operator()(std::span<const double> a) const;  // a is n*n row-major
};

/// The weight triple (x, y, z) feeding the embedding rows:
/// x_i = (n/i)^{1/r}, z_j = (n/j)^{1/p}, y given.
struct EmbeddingWeights {
    int n = 0;
    WeightVector x, y, z;

    static EmbeddingWeights make(int n, const Exponents& e, WeightVector y);
};

/// Fully materialized row matrix: rows indexed by (pi, sigma, eta, eps, delta)
/// in lexicographic order, columns by (i, j); entry
/// x_pi(i) * y_sigma(j) * z_eta(j) * eps_i * delta_j. Row count (n!)^3 2^{2n};
/// materialization is capped at n <= 3.
struct EmbeddingMatrix {
    int n = 0;
    std::size_t row_count = 0;
    std::vector<double> rows;  // row-major, n*n columns

    std::span<const double> row(std::size_t k) const {
        return {rows.data() + k * n * n, static_cast<std::size_t>(n) * n};
    }
};

EmbeddingMatrix build_psi(const EmbeddingWeights& w);

/// L1 norm of the embedded matrix: the uniform average of |<row, a>| over all
/// rows. Exact mode enumerates permutation triples; Monte Carlo samples them.
/// Signs are always enumerated exactly (2^{2n} per permutation triple).
AverageEstimate l1_image_norm(const EmbeddingWeights& w, std::span<const double> a, Mode mode,
                              const McConfig& cfg = {},
                              const EnumerationCaps& caps = EnumerationCaps::from_env());

/// Sign-only average for one fixed coefficient matrix c (n*n):
/// Ave_{eps,delta} |sum_ij c_ij eps_i delta_j|, enumerated exactly.
double rademacher_average(std::span<const double> c, int n);

struct DistortionReport {
    int n = 0;
    std::uint64_t sample_count = 0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double distortion = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> ratios;  ///< per-sample l1/matrix-norm ratios

    nlohmann::json to_json() const;
};

/// Samples Gaussian matrices normalized to matrix-norm 1, evaluates the
/// embedded L1 norm, and reports the empirical min/max ratio over the
/// sampled directions.
DistortionReport measure_distortion(int n, const Exponents& e, const WeightVector& y,
                                    std::uint64_t samples, std::uint64_t seed, Mode mode,
                                    const McConfig& cfg = {},
                                    const EnumerationCaps& caps = EnumerationCaps::from_env());

/// (1 / (5 sqrt 2)) * n^{1/p - 1/r}: the reference lower bound for the
/// unweighted product space, reported for context only.
double lower_bound_report(int n, const Exponents& e);

}  // namespace orlicz

#endif
