#ifndef ORLICZ_FUNCTION_HPP
#define ORLICZ_FUNCTION_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace orlicz {

/// A breakpoint of a piecewise-affine convex function.
struct Breakpoint {
    double t = 0.0;
    double v = 0.0;
};

/// Convex function on [0,inf) with f(0)=0, closed under Legendre conjugation.
///
/// Three representations:
///   - power:     f(t) = scale * t^p, p >= 1
///   - pwa:       piecewise affine through breakpoints, extended past the last
///                one with a terminal slope. terminal_slope == +inf means the
///                function is +inf beyond the last breakpoint (bounded
///                effective domain, which is what conjugation of a finite
///                terminal slope produces).
///   - composite: base(t^p) with a pwa base. Not closed under exact
///                conjugation; conjugate values are still computed exactly
///                segment by segment.
class OrliczFunction {
public:
    enum class Kind { power, pwa, composite };

    static OrliczFunction power(double p, double scale = 1.0);
    static OrliczFunction piecewise(std::vector<Breakpoint> bps, double terminal_slope);
    static OrliczFunction compose_power(OrliczFunction base, double p);

    Kind kind() const { return kind_; }
    double exponent() const { return p_; }
    double scale() const { return scale_; }
    const std::vector<Breakpoint>& breakpoints() const { return bps_; }
    double terminal_slope() const { return terminal_slope_; }
    const OrliczFunction& base() const { return *base_; }

    /// f(t). Throws std::domain_error for t < 0. May return +inf past a
    /// bounded domain end.
    double operator()(double t) const;

    /// Right-continuous generalized inverse sup{t : f(t) <= v}. Coincides
    /// with the ordinary inverse wherever f is strictly increasing, and
    /// returns 0 at v=0 for genuine Orlicz functions. Throws
    /// std::range_error if v exceeds the range of a bounded representation
    /// (cannot happen with a positive terminal slope).
    double inverse(double v) const;

    /// Exact Legendre conjugate sup_t (s t - f(t)). Power and pwa inputs
    /// yield power/pwa outputs with exact breakpoints (slope/breakpoint
    /// duality); composite inputs are rejected, use conjugate_value /
    /// conjugate_inverse for those.
    OrliczFunction conjugate() const;

    /// Value of the conjugate at s. Exact for all representations.
    double conjugate_value(double s) const;

    /// Generalized inverse of the conjugate at v.
    double conjugate_inverse(double v) const;

    bool operator==(const OrliczFunction& o) const;

    nlohmann::json to_json() const;
    static OrliczFunction from_json(const nlohmann::json& j);

private:
    OrliczFunction() = default;
    void validate_pwa() const;

    Kind kind_ = Kind::power;
    double p_ = 1.0;
    double scale_ = 1.0;
    std::vector<Breakpoint> bps_;
    double terminal_slope_ = 0.0;
    std::shared_ptr<const OrliczFunction> base_;
};

/// Luxemburg norm inf{rho>0 : sum_i f(|x_i|/rho) <= 1}. Bisection on rho
/// over [max|x| / f^{-1}(1), max|x| / f^{-1}(1/n)] to relative tolerance
/// 1e-10 (hard cap 200 iterations). Returns 0 for the zero vector.
double luxemburg_norm(const OrliczFunction& f, std::span<const double> x);

enum class Direction { decreasing, increasing };

struct RegularityReport {
    bool ok = true;
    double t_first = 0.0;  ///< violating pair (valid when !ok)
    double t_second = 0.0;
};

/// Samples f(t)/t^p on a geometric grid (1000 points on [1e-6,1e6] plus all
/// breakpoints) and reports monotonicity in the requested direction.
/// "decreasing" means nonincreasing; a constant ratio passes either way.
RegularityReport check_regularity(const OrliczFunction& f, double p, Direction dir);

/// (a, b) with a = min over grid of f^{-1}(t)/g^{-1}(t) and b = max;
/// certifies a g^{-1} <= f^{-1} <= b g^{-1} on the grid.
std::pair<double, double> equivalence_constants(const OrliczFunction& f,
                                                const OrliczFunction& g,
                                                std::span<const double> grid);

/// The exponent pair (p, r) with conjugates and the constant
/// C_r = r^{1/r} (r*)^{1/r*}.
struct Exponents {
    double p = 1.0;
    double r = 2.0;

    double p_star() const { return p / (p - 1.0); }
    double r_star() const { return r / (r - 1.0); }
    double c_r() const;

    /// C_q for an arbitrary exponent q > 1.
    static double c_of(double q);
};

/// Finite positive nonincreasing sequence.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> entries);

    /// (n/i)^{1/q}, i = 1..n.
    static WeightVector power_decay(int n, double q);

    std::size_t size() const { return entries_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<double>& entries() const { return entries_; }
    std::span<const double> span() const { return entries_; }

private:
    std::vector<double> entries_;
};

}  // namespace orlicz

#endif
