// Acceptance suite: one pass/fail line per criterion, with wall-clock time.
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "helpers.hpp"
#include "orlicz/embedding.hpp"
#include "orlicz/perm_average.hpp"
#include "orlicz/rearrange.hpp"

using namespace orlicz;
using namespace orlicz::testing;

namespace {

constexpr double kSlack = 1e-9;

class Criterion {
public:
    Criterion(int index, const char* name, double budget_seconds)
        : index_(index), name_(name), budget_(budget_seconds),
          start_(std::chrono::steady_clock::now()) {}

    void finish(bool ok) const {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                          .count();
        bool in_budget = budget_ <= 0.0 || secs < budget_;
        std::printf("criterion %2d %-52s %s (%.1fs)\n", index_, name_,
                    ok && in_budget ? "PASS" : "FAIL", secs);
        std::fflush(stdout);
        CHECK(ok);
        CHECK(in_budget);
    }

private:
    int index_;
    const char* name_;
    double budget_;
    std::chrono::steady_clock::time_point start_;
};

double brute_force_allocation(const AllocationProblem& prob) {
    const int n = static_cast<int>(prob.weights.size());
    double best = -1.0;
    std::vector<int> levels(n, 0);
    auto rec = [&](auto&& self, int slot, int remaining) -> void {
        if (slot == n) {
            if (remaining != 0) return;
            double obj = 0.0;
            for (int i = 0; i < n; ++i) obj += prob.weights[i] * prob.gain(levels[i]);
            best = std::max(best, obj);
            return;
        }
        for (int k = 0; k <= std::min(prob.cap, remaining); ++k) {
            levels[slot] = k;
            self(self, slot + 1, remaining - k);
        }
    };
    rec(rec, 0, prob.budget);
    return best;
}

std::vector<double> sorted_positive(CounterRng& rng, int n) {
    std::vector<double> v(n);
    for (auto& e : v) e = 0.05 + 2.0 * rng.next_double();
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

}  // namespace

TEST_CASE("1: duality product bracket on grids") {
    Criterion c(1, "duality product bracket on grids", 5.0);
    CounterRng rng(101);
    std::vector<OrliczFunction> fns;
    for (int k = 0; k < 10; ++k) fns.push_back(OrliczFunction::power(1.0 + 2.0 * k / 9.0));
    for (int k = 0; k < 10; ++k) fns.push_back(random_pwa(rng));
    bool ok = true;
    for (const auto& f : fns) {
        for (int i = 0; i < 100; ++i) {
            double t = std::pow(10.0, -3.0 + 6.0 * i / 99.0);
            double prod = f.inverse(t) * f.conjugate_inverse(t);
            ok = ok && prod >= t * (1.0 - kSlack) && prod <= 2.0 * t * (1.0 + kSlack);
        }
    }
    c.finish(ok);
}

TEST_CASE("2: prefix-norm sandwich and allocation oracle") {
    Criterion c(2, "prefix-norm sandwich and allocation oracle", 30.0);
    bool ok = true;
    int inst = 0;
    for (int n : {3, 4}) {
        for (int mm : {1, 2}) {
            int m = mm * n;
            for (int k = 0; k < 50; ++k) {
                CounterRng rng(2000 + 97 * inst++);
                auto yv = sorted_positive(rng, m);
                auto x = random_vector(rng, n);
                // sandwich around the norm generated from the scaled prefix
                std::vector<double> my(yv);
                for (auto& v : my) v *= m;
                auto m_fn = orlicz_from_prefix(Rearrangement::of(my), m);
                double ny = norm_y(x, WeightVector(yv), m);
                double lux = luxemburg_norm(m_fn, x);
                ok = ok && lux >= 0.5 * ny * (1.0 - kSlack) && lux <= 2.0 * ny * (1.0 + kSlack);
                // greedy equals brute-force composition enumeration
                std::vector<double> pre(m + 1, 0.0);
                for (int j = 0; j < m; ++j) pre[j + 1] = pre[j] + yv[j];
                std::vector<double> ax(n);
                for (int i = 0; i < n; ++i) ax[i] = std::abs(x[i]);
                std::sort(ax.begin(), ax.end(), std::greater<>());
                AllocationProblem prob{ax, [&pre](int j) { return pre[j]; }, m, m};
                ok = ok && std::abs(ny - brute_force_allocation(prob)) <= 1e-12 * std::max(1.0, ny);
            }
        }
    }
    c.finish(ok);
}

TEST_CASE("3: max-average sandwich constants") {
    Criterion c(3, "max-average sandwich constants", 60.0);
    bool ok = true;
    for (int n : {5, 6, 7}) {
        const double lower = 0.5 * (0.5 - 1.0 / (n - 1.0));
        if (n == 5) ok = ok && lower == 0.125;
        for (int k = 0; k < 50; ++k) {
            CounterRng rng(3000 + 31 * n + k);
            auto xv = sorted_positive(rng, n);
            OrliczFunction m = (k % 2 == 0)
                                   ? OrliczFunction::power(1.2 + 1.5 * rng.next_double())
                                   : random_pwa(rng);
            double ave = avg_max_increment(xv, m, Mode::exact).value;
            auto prods = weight_increment_products(WeightVector(xv), m);
            double mid = Rearrangement::of(prods).prefix[n] / n;
            ok = ok && ave >= lower * mid * (1.0 - kSlack) && ave <= 2.0 * mid * (1.0 + kSlack);
        }
    }
    c.finish(ok);
}

TEST_CASE("4: tensor maximum average bounds") {
    Criterion c(4, "tensor maximum average bounds", 60.0);
    bool ok = true;
    for (int n : {2, 3, 4}) {
        for (int k = 0; k < 50; ++k) {
            CounterRng rng(4000 + 31 * n + k);
            auto b = TensorB::random(n, rng);
            double ave = avg_max_tensor(b, Mode::exact).value;
            double s = Rearrangement::of(b.entries).prefix[n * n];
            ok = ok && ave >= s / (16.0 * n * n) * (1.0 - kSlack) &&
                 ave <= 4.0 * s / (n * n) * (1.0 + kSlack);
        }
    }
    c.finish(ok);
}

TEST_CASE("5: weight-construction grid brackets and stability") {
    Criterion c(5, "weight-construction grid brackets and stability", 120.0);
    bool ok = true;
    const double r = 1.5;
    const double rs = r / (r - 1.0);
    const double cr = Exponents::c_of(r);
    for (int n : {4, 8, 16}) {
        for (int k = 0; k < 20; ++k) {
            CounterRng rng(5000 + 31 * n + k);
            WeightVector a(sorted_positive(rng, n));
            auto n_fn = orlicz_from_weights(a, r);
            auto grid = prefix_tail_grid(a, r);
            for (int l = 1; l <= n; ++l) {
                double inv_n = n_fn.conjugate_inverse(static_cast<double>(l) / n);
                ok = ok && grid[l] >= inv_n * (1.0 - kSlack) &&
                     grid[l] <= 8.0 * inv_n * (1.0 + kSlack);
                double sum = 0.0;
                for (int i = 0; i < l; ++i) sum += std::pow(a[i], r);
                double mid = cr / n * std::pow(static_cast<double>(l) / n, 1.0 / rs) *
                             std::pow(sum, 1.0 / r);
                double inv_n2 = n_fn.conjugate_inverse(static_cast<double>(l) / (n * n));
                ok = ok && mid >= inv_n2 * (1.0 - kSlack) && mid <= 2.0 * inv_n2 * (1.0 + kSlack);
            }
        }
    }
    // empirical norm-sandwich constants vary by < 25% between n = 6 and n = 8
    for (double rr : {1.5, 1.8}) {
        double band[2][2];
        int ni = 0;
        for (int n : {6, 8}) {
            double lo = 1e300, hi = 0.0;
            for (int k = 0; k < 50; ++k) {
                CounterRng rng(5100 + 31 * n + k);
                WeightVector a(sorted_positive(rng, n));
                auto x = random_vector(rng, n);
                double ratio = avg_weighted_lr(x, a, rr, Mode::exact).value /
                               luxemburg_norm(orlicz_from_weights(a, rr), x);
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            band[ni][0] = lo;
            band[ni][1] = hi;
            ++ni;
        }
        ok = ok && std::abs(band[0][0] / band[1][0] - 1.0) < 0.25 &&
             std::abs(band[0][1] / band[1][1] - 1.0) < 0.25;
    }
    c.finish(ok);
}

TEST_CASE("6: p-norm generation band stability") {
    Criterion c(6, "p-norm generation band stability", 120.0);
    bool ok = true;
    for (double p : {1.2, 1.5}) {
        double min_spread = 1e300, max_spread = 0.0;
        for (int n : {4, 6, 8}) {
            double lo = 1e300, hi = 0.0;
            for (int k = 0; k < 50; ++k) {
                CounterRng rng(6000 + 31 * n + k);
                auto x = random_vector(rng, n);
                double ratio = avg_lp_generator(x, p, Mode::exact).value / pnorm(x, p);
                lo = std::min(lo, ratio);
                hi = std::max(hi, ratio);
            }
            min_spread = std::min(min_spread, hi / lo);
            max_spread = std::max(max_spread, hi / lo);
        }
        ok = ok && max_spread / min_spread < 1.30;
    }
    c.finish(ok);
}

TEST_CASE("7: image-norm ratio band across dimensions") {
    Criterion c(7, "image-norm ratio band across dimensions", 600.0);
    const double p = 1.2, r = 1.5;
    bool ok = true;
    double band2[2] = {0.0, 0.0};
    for (int n : {2, 3, 4, 5}) {
        Mode mode = n <= 3 ? Mode::exact : Mode::monte_carlo;
        McConfig cfg{500000, 70 + static_cast<std::uint64_t>(n), 4};
        auto rep = measure_distortion(n, Exponents{p, r}, WeightVector::power_decay(n, p), 5,
                                      7, mode, cfg);
        if (n == 2) {
            band2[0] = rep.min_ratio;
            band2[1] = rep.max_ratio;
        }
        if (n == 5) {
            ok = ok && rep.min_ratio >= band2[0] / 2.0 * (1.0 - kSlack) &&
                 rep.max_ratio <= band2[1] * 2.0 * (1.0 + kSlack);
        }
        ok = ok && rep.distortion >= 1.0;
    }
    c.finish(ok);
}

TEST_CASE("8: y-vector chain bound with ordering report") {
    Criterion c(8, "y-vector chain bound with ordering report", 10.0);
    bool ok = true;
    // (q, p, r): the function exponent and the two candidate tail exponents
    struct Inst {
        double q, p, r;
    };
    for (const Inst& inst : {Inst{1.4, 1.5, 1.2}, Inst{1.3, 1.5, 1.2}, Inst{1.6, 1.8, 1.3}}) {
        auto m = OrliczFunction::power(inst.q);
        REQUIRE(check_regularity(m, inst.p, Direction::decreasing).ok);
        for (int n : {8, 16}) {
            bool any = false;
            const char* which = "none";
            for (auto [label, expo] :
                 {std::pair<const char*, double>{"first", inst.p}, {"second", inst.r}}) {
                auto rep = prefix_tail_chain(m, expo, n);
                if (rep.lower_ok && rep.max_ratio <= 3.0 * (1.0 + kSlack)) {
                    if (!any) which = label;
                    any = true;
                }
            }
            std::printf("    chain q=%.2f n=%2d: ordering %s satisfies the bound\n", inst.q, n,
                        which);
            ok = ok && any;
        }
    }
    c.finish(ok);
}

TEST_CASE("9: byte-identical reports across worker counts") {
    Criterion c(9, "byte-identical reports across worker counts", 120.0);
    bool ok = true;
    CounterRng rng(9001);
    auto x = random_vector(rng, 12);
    WeightVector a(sorted_positive(rng, 12));
    std::string ref;
    for (int threads : {1, 2, 8}) {
        auto est = avg_weighted_lr(x, a, 2.0, Mode::monte_carlo, McConfig{100000, 5, threads});
        std::string dump = est.to_json().dump();
        if (threads == 1) ref = dump;
        ok = ok && dump == ref;
    }
    std::string dref;
    for (int threads : {1, 2, 8}) {
        auto rep = measure_distortion(3, Exponents{1.2, 1.5}, WeightVector::power_decay(3, 1.2),
                                      3, 11, Mode::monte_carlo, McConfig{50000, 0, threads});
        std::string dump = rep.to_json().dump();
        if (threads == 1) dref = dump;
        ok = ok && dump == dref;
    }
    c.finish(ok);
}

TEST_CASE("10: oracle equivalences") {
    Criterion c(10, "oracle equivalences", 120.0);
    bool ok = true;
    // greedy allocation vs brute force, 100 instances
    CounterRng rng(1001);
    for (int k = 0; k < 100; ++k) {
        int n = 1 + static_cast<int>(rng.next_below(5));
        int cap = 1 + static_cast<int>(rng.next_below(5));
        int budget = static_cast<int>(rng.next_below(n * cap + 1));
        std::vector<double> w(n);
        for (auto& v : w) v = 0.1 + rng.next_double();
        std::sort(w.begin(), w.end(), std::greater<>());
        std::vector<double> pre{0.0};
        double mv = 1.0 + rng.next_double();
        for (int j = 0; j < cap; ++j) {
            pre.push_back(pre.back() + mv);
            mv *= 0.3 + 0.7 * rng.next_double();
        }
        AllocationProblem prob{w, [&pre](int j) { return pre[j]; }, budget, cap};
        double got = allocate_greedy(prob).objective;
        double want = brute_force_allocation(prob);
        ok = ok && std::abs(got - want) <= 1e-12 * std::max(1.0, want);
    }
    // Luxemburg norm vs grid-search oracle within 1e-6, 100 instances
    for (int k = 0; k < 100; ++k) {
        auto f = random_pwa(rng);
        auto x = random_vector(rng, 2 + static_cast<int>(rng.next_below(5)));
        double got = luxemburg_norm(f, x);
        double want = luxemburg_grid_oracle(f, x, 1e-8);
        ok = ok && std::abs(got - want) <= 1e-6 * std::max(1.0, want);
    }
    // conjugation involution on 50 random convex piecewise-affine functions
    for (int k = 0; k < 50; ++k) {
        auto f = random_pwa(rng, 2 + static_cast<int>(rng.next_below(5)));
        auto g = f.conjugate().conjugate();
        ok = ok && g.breakpoints().size() == f.breakpoints().size();
        if (!ok) break;
        for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
            const auto& fb = f.breakpoints()[i];
            const auto& gb = g.breakpoints()[i];
            ok = ok && std::abs(fb.t - gb.t) <= 1e-9 * std::max(1.0, std::abs(fb.t)) &&
                 std::abs(fb.v - gb.v) <= 1e-9 * std::max(1.0, std::abs(fb.v));
        }
    }
    c.finish(ok);
}
