#include "orlicz/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "orlicz/rearrange.hpp"

namespace orlicz {

namespace {

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

template <class Fn>
void for_each_perm(int n, Fn&& fn) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        fn(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

double MatrixSpaceNorm::operator()(std::span<const double> a) const {
    if (static_cast<int>(a.size()) != n * n) throw std::domain_error("matrix size mismatch");
    std::vector<double> cols(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::pow(std::abs(a[i * n + j]), inner_r);
        cols[j] = std::pow(s, 1.0 / inner_r);
    }
    return luxemburg_norm(outer, cols);
}

EmbeddingWeights EmbeddingWeights::make(int n, const Exponents& e, WeightVector y) {
    if (static_cast<int>(y.size()) != n) throw std::domain_error("y length mismatch");
    return EmbeddingWeights{n, WeightVector::power_decay(n, e.r), std::move(y),
                            WeightVector::power_decay(n, e.p)};
}

EmbeddingMatrix build_psi(const EmbeddingWeights& w) {
    const int n = w.n;
    if (n > 3) throw std::length_error("materialized rows capped at n=3, use the streaming norm");
    EmbeddingMatrix m;
    m.n = n;
    const std::uint64_t f = factorial(n);
    const std::uint64_t nsigns = std::uint64_t{1} << n;
    m.row_count = f * f * f * nsigns * nsigns;
    m.rows.reserve(m.row_count * n * n);
    for_each_perm(n, [&](const std::vector<int>& pi) {
        for_each_perm(n, [&](const std::vector<int>& sg) {
            for_each_perm(n, [&](const std::vector<int>& et) {
                for (std::uint64_t eps = 0; eps < nsigns; ++eps) {
                    for (std::uint64_t del = 0; del < nsigns; ++del) {
                        for (int i = 0; i < n; ++i) {
                            double si = (eps >> i) & 1 ? -1.0 : 1.0;
                            for (int j = 0; j < n; ++j) {
                                double sj = (del >> j) & 1 ? -1.0 : 1.0;
                                m.rows.push_back(w.x[pi[i]] * w.y[sg[j]] * w.z[et[j]] * si * sj);
                            }
                        }
                    }
                }
            });
        });
    });
    return m;
}

double rademacher_average(std::span<const double> c, int n) {
    // enumerate eps outer, then Gray-code walk over delta with O(1) updates
    const std::uint64_t nsigns = std::uint64_t{1} << n;
    std::vector<double> colsum(n);
    double total = 0.0;
    for (std::uint64_t eps = 0; eps < nsigns; ++eps) {
        for (int j = 0; j < n; ++j) {
            double t = 0.0;
            for (int i = 0; i < n; ++i) t += ((eps >> i) & 1 ? -1.0 : 1.0) * c[i * n + j];
            colsum[j] = t;
        }
        double cur = 0.0;
        for (int j = 0; j < n; ++j) cur += colsum[j];  // delta = all +1
        total += std::abs(cur);
        std::uint64_t gray_prev = 0;
        for (std::uint64_t k = 1; k < nsigns; ++k) {
            std::uint64_t gray = k ^ (k >> 1);
            std::uint64_t diff = gray ^ gray_prev;
            int j = std::countr_zero(diff);
            cur += ((gray >> j) & 1 ? -2.0 : 2.0) * colsum[j];
            total += std::abs(cur);
            gray_prev = gray;
        }
    }
    return total / (static_cast<double>(nsigns) * nsigns);
}

namespace {

double sign_averaged_row(const EmbeddingWeights& w, std::span<const double> a,
                         std::span<const int> pi, std::span<const int> sg,
                         std::span<const int> et, std::vector<double>& buf) {
    const int n = w.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            buf[i * n + j] = a[i * n + j] * w.x[pi[i]] * w.y[sg[j]] * w.z[et[j]];
    return rademacher_average(buf, n);
}

}  // namespace

AverageEstimate l1_image_norm(const EmbeddingWeights& w, std::span<const double> a, Mode mode,
                              const McConfig& cfg, const EnumerationCaps& caps) {
    const int n = w.n;
    if (static_cast<int>(a.size()) != n * n) throw std::domain_error("matrix size mismatch");
    std::vector<double> buf(n * n);
    bool exact;
    switch (mode) {
        case Mode::exact:
            if (n > caps.triple)
                throw std::length_error("exact triple enumeration capped, use Monte Carlo");
            exact = true;
            break;
        case Mode::monte_carlo:
            exact = false;
            break;
        case Mode::automatic:
            exact = n <= caps.triple;
            break;
    }
    if (exact) {
        double total = 0.0;
        for_each_perm(n, [&](const std::vector<int>& pi) {
            for_each_perm(n, [&](const std::vector<int>& sg) {
                for_each_perm(n, [&](const std::vector<int>& et) {
                    total += sign_averaged_row(w, a, pi, sg, et, buf);
                });
            });
        });
        std::uint64_t f = factorial(n);
        AverageEstimate e;
        e.value = total / (f * f * f);
        e.exact = true;
        e.samples = f * f * f * (std::uint64_t{1} << (2 * n));
        return e;
    }
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    return mc_mean(cfg.samples, cfg.seed, cfg.threads, [&, base](CounterRng& rng, std::uint64_t) {
        thread_local std::vector<int> pi, sg, et;
        thread_local std::vector<double> tbuf;
        pi = base;
        sg = base;
        et = base;
        tbuf.resize(static_cast<std::size_t>(n) * n);
        rng.shuffle(pi);
        rng.shuffle(sg);
        rng.shuffle(et);
        return sign_averaged_row(w, a, pi, sg, et, tbuf);
    });
}

nlohmann::json DistortionReport::to_json() const {
    return {{"n", n},           {"sample_count", sample_count},
            {"min_ratio", min_ratio}, {"max_ratio", max_ratio},
            {"distortion", distortion}, {"seed", seed}};
}

DistortionReport measure_distortion(int n, const Exponents& e, const WeightVector& y,
                                    std::uint64_t samples, std::uint64_t seed, Mode mode,
                                    const McConfig& cfg, const EnumerationCaps& caps) {
    if (samples < 1) throw std::domain_error("need at least one sample");
    EmbeddingWeights w = EmbeddingWeights::make(n, e, y);
    MatrixSpaceNorm norm{two_exponent_orlicz(y, 1.0, e.p), e.r, n};

    DistortionReport rep;
    rep.n = n;
    rep.sample_count = samples;
    rep.seed = seed;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    rep.max_ratio = 0.0;

    CounterRng rng(CounterRng::derive_seed(seed, 0x6d61747278ULL));
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (auto& v : a) v = rng.next_normal();
        double mn = norm(a);
        for (auto& v : a) v /= mn;
        McConfig sub = cfg;
        sub.seed = CounterRng::derive_seed(seed, s + 1);
        double l1 = l1_image_norm(w, a, mode, sub, caps).value;
        rep.min_ratio = std::min(rep.min_ratio, l1);
        rep.max_ratio = std::max(rep.max_ratio, l1);
        rep.ratios.push_back(l1);
    }
    rep.distortion = rep.max_ratio / rep.min_ratio;
    return rep;
}

double lower_bound_report(int n, const Exponents& e) {
    return std::pow(static_cast<double>(n), 1.0 / e.p - 1.0 / e.r) / (5.0 * std::sqrt(2.0));
}

}  // namespace orlicz
