#include "orlicz/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace orlicz {

Rearrangement Rearrangement::of(std::span<const double> raw) {
    Rearrangement r;
    r.values.assign(raw.begin(), raw.end());
    std::sort(r.values.begin(), r.values.end(), std::greater<>());
    r.prefix.resize(r.values.size() + 1);
    r.prefix[0] = 0.0;
    for (std::size_t k = 0; k < r.values.size(); ++k)
        r.prefix[k + 1] = r.prefix[k] + r.values[k];
    return r;
}

Allocation allocate_greedy(const AllocationProblem& prob) {
    const int n = static_cast<int>(prob.weights.size());
    if (prob.budget < 0 || prob.budget > n * prob.cap)
        throw std::domain_error("infeasible budget");
    Allocation alloc;
    alloc.levels.assign(n, 0);

    struct Entry {
        double marginal;
        int slot;
    };
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.marginal != b.marginal) return a.marginal < b.marginal;
        return a.slot > b.slot;  // tie: lowest slot index first
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    auto marginal = [&](int slot, int level) {
        return prob.weights[slot] * (prob.gain(level + 1) - prob.gain(level));
    };
    for (int i = 0; i < n; ++i)
        if (prob.cap > 0) heap.push({marginal(i, 0), i});

    for (int step = 0; step < prob.budget; ++step) {
        Entry e = heap.top();
        heap.pop();
        int lvl = alloc.levels[e.slot]++;
        alloc.objective += e.marginal;
        if (lvl + 1 < prob.cap) heap.push({marginal(e.slot, lvl + 1), e.slot});
    }
    return alloc;
}

double norm_y(std::span<const double> x, const WeightVector& y, int m) {
    const int n = static_cast<int>(x.size());
    if (m < n) throw std::domain_error("budget must be at least the vector length");
    std::vector<double> ax(n);
    for (int i = 0; i < n; ++i) ax[i] = std::abs(x[i]);
    std::sort(ax.begin(), ax.end(), std::greater<>());
    std::vector<double> pre(m + 1, 0.0);
    for (int k = 0; k < m; ++k) pre[k + 1] = pre[k] + y[k];
    AllocationProblem prob{ax, [&pre](int k) { return pre[k]; }, m, m};
    return allocate_greedy(prob).objective;
}

OrliczFunction orlicz_from_prefix(const Rearrangement& r, int total) {
    if (static_cast<int>(r.values.size()) != total)
        throw std::domain_error("total must equal the number of values");
    // N^{*-1} through (l/total, prefix[l]/total) => N* through the swapped
    // pairs; conjugating N* gives N exactly.
    std::vector<Breakpoint> bps;
    bps.reserve(total + 1);
    for (int l = 0; l <= total; ++l)
        bps.push_back({r.prefix[l] / total, static_cast<double>(l) / total});
    double last_slope = (bps.back().v - bps[total - 1].v) / (bps.back().t - bps[total - 1].t);
    OrliczFunction n_star = OrliczFunction::piecewise(std::move(bps), last_slope);
    return n_star.conjugate();
}

std::vector<double> weight_increment_products(const WeightVector& a, const OrliczFunction& m_fn) {
    const int n = static_cast<int>(a.size());
    std::vector<double> inc(n);
    double prev = 0.0;
    for (int j = 1; j <= n; ++j) {
        double cur = m_fn.conjugate_inverse(static_cast<double>(j) / n);
        inc[j - 1] = n * (cur - prev);
        prev = cur;
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.push_back(a[i] * inc[j]);
    return out;
}

OrliczFunction orlicz_from_weights(const WeightVector& a, double r) {
    const int n = static_cast<int>(a.size());
    auto prods = weight_increment_products(a, OrliczFunction::power(r));
    return orlicz_from_prefix(Rearrangement::of(prods), n * n);
}

namespace {

// N^{*-1}(l/n^2) values of the fine construction, for l = 0..n^2.
std::vector<double> fine_grid(const WeightVector& a, double r) {
    const int n = static_cast<int>(a.size());
    auto prods = weight_increment_products(a, OrliczFunction::power(r));
    auto re = Rearrangement::of(prods);
    std::vector<double> g(re.prefix.size());
    for (std::size_t l = 0; l < g.size(); ++l) g[l] = re.prefix[l] / (n * n);
    return g;
}

OrliczFunction from_inverse_grid(std::span<const double> xs, std::span<const double> ys) {
    std::vector<Breakpoint> bps;
    for (std::size_t k = 0; k < xs.size(); ++k) bps.push_back({ys[k], xs[k]});
    std::size_t K = xs.size() - 1;
    double last_slope = (bps[K].v - bps[K - 1].v) / (bps[K].t - bps[K - 1].t);
    return OrliczFunction::piecewise(std::move(bps), last_slope).conjugate();
}

}  // namespace

OrliczFunction coarse_orlicz_from_weights(const WeightVector& a, double r) {
    const int n = static_cast<int>(a.size());
    auto g = fine_grid(a, r);
    std::vector<double> xs(n + 1), ys(n + 1);
    for (int l = 0; l <= n; ++l) {
        xs[l] = static_cast<double>(l) / n;
        ys[l] = g[static_cast<std::size_t>(l) * n];
    }
    return from_inverse_grid(xs, ys);
}

std::vector<double> prefix_tail_grid(const WeightVector& a, double r) {
    const int n = static_cast<int>(a.size());
    const double rs = r / (r - 1.0);
    const double cr = Exponents::c_of(r);
    std::vector<double> out(n + 1, 0.0);
    for (int l = 1; l <= n; ++l) {
        double pre = 0.0, tail = 0.0;
        for (int i = 0; i < l; ++i) pre += a[i];
        for (int i = l; i < n; ++i) tail += std::pow(a[i], r);
        out[l] = cr * (pre / n +
                       std::pow(static_cast<double>(l) / n, 1.0 / rs) *
                           std::pow(tail / n, 1.0 / r));
    }
    return out;
}

OrliczFunction two_exponent_orlicz(const WeightVector& a, double p, double r) {
    if (!(p >= 1.0 && p < r)) throw std::domain_error("requires 1 <= p < r");
    if (p == 1.0) return coarse_orlicz_from_weights(a, r);
    std::vector<double> ap(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ap[i] = std::pow(a[i], p);
    OrliczFunction base = coarse_orlicz_from_weights(WeightVector(std::move(ap)), r / p);
    return OrliczFunction::compose_power(std::move(base), p);
}

std::vector<double> two_exponent_grid(const WeightVector& a, double p, double r) {
    const int n = static_cast<int>(a.size());
    const double ps = p / (p - 1.0);
    const double rs = r / (r - 1.0);
    const double cr = Exponents::c_of(r);
    std::vector<double> out(n + 1, 0.0);
    for (int l = 1; l <= n; ++l) {
        double pre = 0.0, tail = 0.0;
        for (int i = 0; i < l; ++i) pre += std::pow(a[i], p);
        for (int i = l; i < n; ++i) tail += std::pow(a[i], r);
        double frac = static_cast<double>(l) / n;
        double pre_term = (p == 1.0 ? 1.0 : std::pow(frac, 1.0 / ps)) * std::pow(pre / n, 1.0 / p);
        out[l] = cr * (pre_term + std::pow(frac, 1.0 / rs) * std::pow(tail / n, 1.0 / r));
    }
    return out;
}

WeightVector y_from_function(const OrliczFunction& m_fn, int n) {
    std::vector<double> y(n);
    double prev = 0.0;
    for (int l = 1; l <= n; ++l) {
        double cur = m_fn.conjugate_inverse(static_cast<double>(l) / n);
        y[l - 1] = n * (cur - prev);
        prev = cur;
    }
    // indicator-type conjugates give zero increments past the kink
    const double floor = 1e-300;
    for (double& v : y) v = std::max(v, floor);
    for (int l = 1; l < n; ++l) y[l] = std::min(y[l], y[l - 1]);
    return WeightVector(std::move(y));
}

ChainReport prefix_tail_chain(const OrliczFunction& m_fn, double p, int n) {
    WeightVector y = y_from_function(m_fn, n);
    const double ps = p / (p - 1.0);
    ChainReport rep;
    double pre = 0.0;
    std::vector<double> tails(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i) tails[i] = tails[i + 1] + std::pow(y[i], p);
    for (int l = 1; l <= n; ++l) {
        pre += y[l - 1];
        double mid = pre / n + std::pow(static_cast<double>(l) / n, 1.0 / ps) *
                                   std::pow(tails[l] / n, 1.0 / p);
        double lhs = m_fn.conjugate_inverse(static_cast<double>(l) / n);
        double ratio = mid / lhs;
        rep.ratios.push_back(ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (mid < lhs * (1.0 - 1e-9)) rep.lower_ok = false;
    }
    return rep;
}

}  // namespace orlicz
