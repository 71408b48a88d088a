#include "orlicz/perm_average.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace orlicz {

namespace {

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Sum fn(pi) over all permutations of {0..n-1} (lexicographic order).
template <class Fn>
double enumerate_perms(int n, Fn&& fn) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0.0;
    do {
        total += fn(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

AverageEstimate exact_estimate(double value, std::uint64_t count) {
    AverageEstimate e;
    e.value = value;
    e.exact = true;
    e.samples = count;
    return e;
}

bool pick_exact(Mode mode, int n, int cap, const char* what) {
    switch (mode) {
        case Mode::exact:
            if (n > cap) {
                std::ostringstream os;
                os << what << ": exact enumeration capped at n=" << cap << " (requested " << n
                   << ")";
                throw std::length_error(os.str());
            }
            return true;
        case Mode::monte_carlo:
            return false;
        case Mode::automatic:
            return n <= cap;
    }
    return false;
}

}  // namespace

nlohmann::json AverageEstimate::to_json() const {
    return {{"value", value},
            {"mode", exact ? "exact" : "monte_carlo"},
            {"samples", samples},
            {"ci95", ci95_halfwidth},
            {"seed", seed}};
}

EnumerationCaps EnumerationCaps::from_env() {
    EnumerationCaps caps;
    const char* env = std::getenv("ORLICZ_EMBED_CAPS");
    if (!env) return caps;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        std::string key = item.substr(0, eq);
        int val = std::atoi(item.c_str() + eq + 1);
        if (val <= 0) continue;
        if (key == "single") caps.single = val;
        else if (key == "double") caps.double_perm = val;
        else if (key == "triple") caps.triple = val;
    }
    return caps;
}

AverageEstimate mc_mean(std::uint64_t samples, std::uint64_t seed, int threads,
                        const std::function<double(CounterRng&, std::uint64_t)>& fn) {
    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t nblocks = (samples + kBlock - 1) / kBlock;
    std::vector<double> block_sum(nblocks, 0.0), block_sumsq(nblocks, 0.0);

    auto run_block = [&](std::uint64_t b) {
        std::uint64_t lo = b * kBlock;
        std::uint64_t hi = std::min(samples, lo + kBlock);
        CounterRng rng(CounterRng::derive_seed(seed, b));
        double s = 0.0, s2 = 0.0;
        for (std::uint64_t i = lo; i < hi; ++i) {
            double v = fn(rng, i);
            s += v;
            s2 += v * v;
        }
        block_sum[b] = s;
        block_sumsq[b] = s2;
    };

    if (threads <= 1 || nblocks == 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint64_t> next{0};
        int nthreads = std::min<std::uint64_t>(threads, nblocks);
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::uint64_t b; (b = next.fetch_add(1)) < nblocks;) run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t b = 0; b < nblocks; ++b) {  // fixed order: bit-reproducible
        sum += block_sum[b];
        sumsq += block_sumsq[b];
    }
    AverageEstimate e;
    e.exact = false;
    e.samples = samples;
    e.seed = seed;
    e.value = sum / samples;
    if (samples > 1) {
        double var = std::max(0.0, (sumsq - sum * sum / samples) / (samples - 1.0));
        e.ci95_halfwidth = 1.959963984540054 * std::sqrt(var / samples);
    }
    return e;
}

AverageEstimate avg_weighted_norm(std::span<const double> x, const WeightVector& a,
                                  const OrliczFunction& m_fn, Mode mode, const McConfig& cfg,
                                  const EnumerationCaps& caps) {
    const int n = static_cast<int>(x.size());
    if (a.size() != x.size()) throw std::domain_error("length mismatch");
    std::vector<double> scaled(n);
    auto eval = [&](std::span<const int> perm, std::vector<double>& buf) {
        for (int i = 0; i < n; ++i) buf[i] = x[i] * a[perm[i]];
        return luxemburg_norm(m_fn, buf);
    };
    if (pick_exact(mode, n, caps.single, "avg_weighted_norm")) {
        double total = enumerate_perms(n, [&](const std::vector<int>& p) { return eval(p, scaled); });
        return exact_estimate(total / factorial(n), factorial(n));
    }
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    return mc_mean(cfg.samples, cfg.seed, cfg.threads, [&, base](CounterRng& rng, std::uint64_t) {
        thread_local std::vector<int> perm;
        thread_local std::vector<double> buf;
        perm = base;
        buf.resize(n);
        rng.shuffle(perm);
        return eval(perm, buf);
    });
}

AverageEstimate avg_max_increment(std::span<const double> x, const OrliczFunction& m_fn, Mode mode,
                                  const McConfig& cfg, const EnumerationCaps& caps) {
    const int n = static_cast<int>(x.size());
    std::vector<double> inc(n);
    double prev = 0.0;
    for (int j = 1; j <= n; ++j) {
        double cur = m_fn.conjugate_inverse(static_cast<double>(j) / n);
        inc[j - 1] = n * (cur - prev);
        prev = cur;
    }
    auto eval = [&](std::span<const int> perm) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(x[i] * inc[perm[i]]));
        return m;
    };
    if (pick_exact(mode, n, caps.single, "avg_max_increment")) {
        double total = enumerate_perms(n, [&](const std::vector<int>& p) { return eval(p); });
        return exact_estimate(total / factorial(n), factorial(n));
    }
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    return mc_mean(cfg.samples, cfg.seed, cfg.threads, [&, base](CounterRng& rng, std::uint64_t) {
        thread_local std::vector<int> perm;
        perm = base;
        rng.shuffle(perm);
        return eval(perm);
    });
}

TensorB TensorB::random(int n, CounterRng& rng) {
    TensorB b;
    b.n = n;
    b.entries.resize(static_cast<std::size_t>(n) * n * n);
    for (auto& e : b.entries) e = rng.next_double();
    return b;
}

AverageEstimate avg_max_tensor(const TensorB& b, Mode mode, const McConfig& cfg,
                               const EnumerationCaps& caps) {
    const int n = b.n;
    auto eval = [&](std::span<const int> pi, std::span<const int> sg) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, b.at(i, pi[i], sg[i]));
        return m;
    };
    if (pick_exact(mode, n, caps.double_perm, "avg_max_tensor")) {
        double total = enumerate_perms(n, [&](const std::vector<int>& pi) {
            return enumerate_perms(n, [&](const std::vector<int>& sg) { return eval(pi, sg); });
        });
        std::uint64_t count = factorial(n) * factorial(n);
        return exact_estimate(total / count, count);
    }
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    return mc_mean(cfg.samples, cfg.seed, cfg.threads, [&, base](CounterRng& rng, std::uint64_t) {
        thread_local std::vector<int> pi, sg;
        pi = base;
        sg = base;
        rng.shuffle(pi);
        rng.shuffle(sg);
        return eval(pi, sg);
    });
}

namespace {

AverageEstimate avg_power_mean(std::span<const double> x, const WeightVector& a, double r,
                               double outer_p, Mode mode, const McConfig& cfg,
                               const EnumerationCaps& caps, const char* what) {
    const int n = static_cast<int>(x.size());
    if (a.size() != x.size()) throw std::domain_error("length mismatch");
    auto eval = [&](std::span<const int> perm) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += std::pow(std::abs(x[i] * a[perm[i]]), r);
        return std::pow(s, outer_p / r);
    };
    if (pick_exact(mode, n, caps.single, what)) {
        double total = enumerate_perms(n, [&](const std::vector<int>& p) { return eval(p); });
        AverageEstimate e = exact_estimate(total / factorial(n), factorial(n));
        e.value = std::pow(e.value, 1.0 / outer_p);
        return e;
    }
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    AverageEstimate e =
        mc_mean(cfg.samples, cfg.seed, cfg.threads, [&, base](CounterRng& rng, std::uint64_t) {
            thread_local std::vector<int> perm;
            perm = base;
            rng.shuffle(perm);
            return eval(perm);
        });
    // the ci is for the inner mean; propagate through the outer root
    double mean = e.value;
    e.value = std::pow(mean, 1.0 / outer_p);
    if (mean > 0.0) e.ci95_halfwidth *= e.value / (outer_p * mean);
    return e;
}

}  // namespace

AverageEstimate avg_weighted_lr(std::span<const double> x, const WeightVector& a, double r,
                                Mode mode, const McConfig& cfg, const EnumerationCaps& caps) {
    return avg_power_mean(x, a, r, 1.0, mode, cfg, caps, "avg_weighted_lr");
}

AverageEstimate avg_weighted_lr_lp(std::span<const double> x, const WeightVector& a, double r,
                                   double p, Mode mode, const McConfig& cfg,
                                   const EnumerationCaps& caps) {
    return avg_power_mean(x, a, r, p, mode, cfg, caps, "avg_weighted_lr_lp");
}

AverageEstimate avg_lp_generator(std::span<const double> x, double p, Mode mode,
                                 const McConfig& cfg, const EnumerationCaps& caps) {
    const int n = static_cast<int>(x.size());
    return avg_weighted_lr(x, WeightVector::power_decay(n, p), 2.0, mode, cfg, caps);
}

AverageEstimate avg_matrix_triple(std::span<const double> a, int n, const WeightVector& x,
                                  const WeightVector& y, const WeightVector& z, Mode mode,
                                  const McConfig& cfg, const EnumerationCaps& caps) {
    if (static_cast<int>(a.size()) != n * n) throw std::domain_error("matrix size mismatch");
    auto eval = [&](std::span<const int> pi, std::span<const int> sg, std::span<const int> et) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = a[i * n + j] * x[pi[i]] * y[sg[j]] * z[et[j]];
                s += v * v;
            }
        return std::sqrt(s);
    };
    if (pick_exact(mode, n, caps.triple, "avg_matrix_triple")) {
        double total = enumerate_perms(n, [&](const std::vector<int>& pi) {
            return enumerate_perms(n, [&](const std::vector<int>& sg) {
                return enumerate_perms(n, [&](const std::vector<int>& et) { return eval(pi, sg, et); });
            });
        });
        std::uint64_t f = factorial(n);
        return exact_estimate(total / (f * f * f), f * f * f);
    }
    std::vector<int> base(n);
    std::iota(base.begin(), base.end(), 0);
    return mc_mean(cfg.samples, cfg.seed, cfg.threads, [&, base](CounterRng& rng, std::uint64_t) {
        thread_local std::vector<int> pi, sg, et;
        pi = base;
        sg = base;
        et = base;
        rng.shuffle(pi);
        rng.shuffle(sg);
        rng.shuffle(et);
        return eval(pi, sg, et);
    });
}

}  // namespace orlicz
