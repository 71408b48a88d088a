#ifndef ORLICZ_TEST_HELPERS_HPP
#define ORLICZ_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "orlicz/function.hpp"
#include "orlicz/rng.hpp"

namespace orlicz::testing {

/// Random convex piecewise-affine Orlicz function with positive first slope
/// and a finite terminal slope strictly above the last interior one.
inline OrliczFunction random_pwa(CounterRng& rng, int segments = 4) {
    std::vector<double> ts{0.0};
    double t = 0.0;
    for (int k = 0; k < segments; ++k) {
        t += 0.1 + 2.0 * rng.next_double();
        ts.push_back(t);
    }
    std::vector<double> slopes(segments);
    double s = 0.05 + rng.next_double();
    for (int k = 0; k < segments; ++k) {
        slopes[k] = s;
        s += 0.05 + 1.5 * rng.next_double();
    }
    std::vector<Breakpoint> bps{{0.0, 0.0}};
    for (int k = 0; k < segments; ++k)
        bps.push_back({ts[k + 1], bps.back().v + slopes[k] * (ts[k + 1] - ts[k])});
    return OrliczFunction::piecewise(std::move(bps), s + 0.1);
}

/// Independent grid-search oracle for the Luxemburg norm: scans rho at the
/// given resolution around a crude bracket.
inline double luxemburg_grid_oracle(const OrliczFunction& f, std::span<const double> x,
                                    double resolution = 1e-6) {
    double xmax = 0.0;
    for (double xi : x) xmax = std::max(xmax, std::abs(xi));
    if (xmax == 0.0) return 0.0;
    auto under = [&](double rho) {
        double s = 0.0;
        for (double xi : x) {
            double v = f(std::abs(xi) / rho);
            if (std::isinf(v)) return false;
            s += v;
            if (s > 1.0) return false;
        }
        return true;
    };
    double hi = xmax / 1e-9;
    double lo = 1e-12;
    // coarse-to-fine scan, halving the step until the requested resolution
    for (double step = (hi - lo) / 64.0; step > resolution * hi;) {
        double rho = lo;
        while (!under(rho) && rho < hi) rho += step;
        hi = rho;
        lo = std::max(lo, rho - step);
        step = (hi - lo) / 64.0;
    }
    return hi;
}

/// Numeric-sup oracle for the Legendre conjugate over a dense t-grid.
inline double conjugate_sup_oracle(const OrliczFunction& f, double s, double tmax = 50.0) {
    double best = 0.0;
    const int kPoints = 200000;
    for (int i = 0; i <= kPoints; ++i) {
        double t = tmax * i / kPoints;
        double v = f(t);
        if (std::isinf(v)) break;
        best = std::max(best, s * t - v);
    }
    return best;
}

inline std::vector<double> random_vector(CounterRng& rng, int n) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.next_normal();
    return x;
}

inline double pnorm(std::span<const double> x, double p) {
    double s = 0.0;
    for (double xi : x) s += std::pow(std::abs(xi), p);
    return std::pow(s, 1.0 / p);
}

}  // namespace orlicz::testing

#endif
