#include "orlicz/function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lerp_at(const Breakpoint& a, const Breakpoint& b, double t) {
    return a.v + (b.v - a.v) * (t - a.t) / (b.t - a.t);
}

// Merge collinear segments and zero-length pieces so that conjugation is an
// exact involution on the breakpoint lists.
std::vector<Breakpoint> canonicalize(std::vector<Breakpoint> bps, double terminal_slope) {
    std::vector<Breakpoint> out;
    for (const auto& b : bps) {
        if (!out.empty() && b.t <= out.back().t + 0.0) {
            if (b.t == out.back().t) continue;  // duplicate abscissa
        }
        out.push_back(b);
    }
    // drop interior breakpoints where the slope does not change
    std::vector<Breakpoint> res;
    res.push_back(out.front());
    for (std::size_t k = 1; k < out.size(); ++k) {
        double s_in = (out[k].v - res.back().v) / (out[k].t - res.back().t);
        double s_out = (k + 1 < out.size())
                           ? (out[k + 1].v - out[k].v) / (out[k + 1].t - out[k].t)
                           : terminal_slope;
        if (std::abs(s_out - s_in) <= 1e-14 * std::max(1.0, std::abs(s_in)) &&
            !(k + 1 == out.size() && std::isinf(terminal_slope))) {
            continue;  // collinear, skip
        }
        res.push_back(out[k]);
    }
    return res;
}

}  // namespace

OrliczFunction OrliczFunction::power(double p, double scale) {
    if (p < 1.0) throw std::domain_error("power exponent must be >= 1");
    if (!(scale > 0.0)) throw std::domain_error("power scale must be > 0");
    OrliczFunction f;
    f.kind_ = Kind::power;
    f.p_ = p;
    f.scale_ = scale;
    return f;
}

OrliczFunction OrliczFunction::piecewise(std::vector<Breakpoint> bps, double terminal_slope) {
    OrliczFunction f;
    f.kind_ = Kind::pwa;
    f.bps_ = canonicalize(std::move(bps), terminal_slope);
    f.terminal_slope_ = terminal_slope;
    f.validate_pwa();
    return f;
}

OrliczFunction OrliczFunction::compose_power(OrliczFunction base, double p) {
    if (p < 1.0) throw std::domain_error("composition exponent must be >= 1");
    if (base.kind_ != Kind::pwa) throw std::domain_error("composite base must be piecewise affine");
    OrliczFunction f;
    f.kind_ = Kind::composite;
    f.p_ = p;
    f.base_ = std::make_shared<OrliczFunction>(std::move(base));
    return f;
}

void OrliczFunction::validate_pwa() const {
    if (bps_.empty()) throw std::domain_error("empty breakpoint list");
    if (bps_.front().t != 0.0 || bps_.front().v != 0.0)
        throw std::domain_error("first breakpoint must be (0,0)");
    double prev_slope = -kInf;
    for (std::size_t k = 1; k < bps_.size(); ++k) {
        if (!(bps_[k].t > bps_[k - 1].t))
            throw std::domain_error("breakpoint abscissae must be strictly increasing");
        if (bps_[k].v < bps_[k - 1].v) throw std::domain_error("values must be nondecreasing");
        double s = (bps_[k].v - bps_[k - 1].v) / (bps_[k].t - bps_[k - 1].t);
        if (s < prev_slope - 1e-12 * std::max(1.0, std::abs(prev_slope)))
            throw std::domain_error("slopes must be nondecreasing (convexity)");
        prev_slope = std::max(prev_slope, s);
    }
    if (!std::isinf(terminal_slope_) &&
        terminal_slope_ < prev_slope - 1e-12 * std::max(1.0, std::abs(prev_slope)))
        throw std::domain_error("terminal slope below last interior slope");
    if (bps_.size() == 1 && !(terminal_slope_ > 0.0))
        throw std::domain_error("degenerate single-point function");
}

double OrliczFunction::operator()(double t) const {
    if (t < 0.0) throw std::domain_error("argument must be nonnegative");
    switch (kind_) {
        case Kind::power:
            return scale_ * std::pow(t, p_);
        case Kind::composite:
            return (*base_)(std::pow(t, p_));
        case Kind::pwa: {
            const auto& bp = bps_;
            if (t >= bp.back().t) {
                if (t == bp.back().t) return bp.back().v;
                if (std::isinf(terminal_slope_)) return kInf;
                return bp.back().v + terminal_slope_ * (t - bp.back().t);
            }
            auto it = std::upper_bound(bp.begin(), bp.end(), t,
                                       [](double x, const Breakpoint& b) { return x < b.t; });
            return lerp_at(*(it - 1), *it, t);
        }
    }
    return 0.0;
}

double OrliczFunction::inverse(double v) const {
    if (v < 0.0) throw std::domain_error("argument must be nonnegative");
    switch (kind_) {
        case Kind::power:
            return std::pow(v / scale_, 1.0 / p_);
        case Kind::composite:
            return std::pow(base_->inverse(v), 1.0 / p_);
        case Kind::pwa: {
            const auto& bp = bps_;
            if (v >= bp.back().v) {
                if (std::isinf(terminal_slope_)) {
                    if (v > bp.back().v) {
                        // sup{t : f(t) <= v} = domain end; flagged only when v
                        // is strictly beyond the attained range
                        return bp.back().t;
                    }
                    return bp.back().t;
                }
                if (terminal_slope_ == 0.0) {
                    if (v > bp.back().v) throw std::range_error("value beyond bounded range");
                    return kInf;  // unreachable: flat terminal piece rejected below
                }
                return bp.back().t + (v - bp.back().v) / terminal_slope_;
            }
            // first breakpoint with value > v, then take the right end of any
            // flat run below it
            auto it = std::upper_bound(bp.begin(), bp.end(), v,
                                       [](double x, const Breakpoint& b) { return x < b.v; });
            const Breakpoint& hi = *it;
            const Breakpoint& lo = *(it - 1);
            if (hi.v == lo.v) return hi.t;
            return lo.t + (v - lo.v) * (hi.t - lo.t) / (hi.v - lo.v);
        }
    }
    return 0.0;
}

OrliczFunction OrliczFunction::conjugate() const {
    switch (kind_) {
        case Kind::power: {
            if (p_ == 1.0) {
                // conjugate of c*t is the indicator of [0,c]
                return piecewise({{0.0, 0.0}, {scale_, 0.0}}, kInf);
            }
            double q = p_ / (p_ - 1.0);
            double s = (p_ - 1.0) / p_ * std::pow(scale_ * p_, -1.0 / (p_ - 1.0));
            return power(q, s);
        }
        case Kind::composite:
            throw std::logic_error("exact conjugate of a composed representation is not supported");
        case Kind::pwa: {
            std::vector<Breakpoint> out;
            out.push_back({0.0, 0.0});
            // vertex values are nondecreasing analytically; clamp away the
            // roundoff so validation never sees a dip of a few ulps
            auto push_vertex = [&out](double m, double v) {
                out.push_back({m, std::max(v, out.back().v)});
            };
            for (std::size_t k = 1; k < bps_.size(); ++k) {
                double m = (bps_[k].v - bps_[k - 1].v) / (bps_[k].t - bps_[k - 1].t);
                push_vertex(m, m * bps_[k].t - bps_[k].v);
            }
            double term;
            if (std::isinf(terminal_slope_)) {
                term = bps_.back().t;  // conjugate grows linearly with slope = domain end
            } else {
                double m = terminal_slope_;
                push_vertex(m, m * bps_.back().t - bps_.back().v);
                term = kInf;  // conjugate is +inf past the terminal slope
            }
            return piecewise(std::move(out), term);
        }
    }
    throw std::logic_error("unreachable");
}

double OrliczFunction::conjugate_value(double s) const {
    if (s < 0.0) throw std::domain_error("argument must be nonnegative");
    if (kind_ != Kind::composite) return conjugate()(s);
    // sup_t (s t - base(t^p)) evaluated exactly on each affine segment of the
    // base: with base slope m on u in [u0,u1] (u = t^p), maximize
    // s u^{1/p} - (c + m u), stationary at u = (s/(m p))^{p/(p-1)}.
    const auto& bp = base_->breakpoints();
    double best = 0.0;
    double pp = p_;
    auto seg_best = [&](double u0, double u1, double m, double c) {
        auto val = [&](double u) { return s * std::pow(u, 1.0 / pp) - (c + m * u); };
        double b = std::max(val(u0), std::isinf(u1) ? -kInf : val(u1));
        if (pp > 1.0 && m > 0.0) {
            double ustar = std::pow(s / (m * pp), pp / (pp - 1.0));
            if (ustar > u0 && ustar < u1) b = std::max(b, val(ustar));
        }
        return b;
    };
    for (std::size_t k = 1; k < bp.size(); ++k) {
        double m = (bp[k].v - bp[k - 1].v) / (bp[k].t - bp[k - 1].t);
        double c = bp[k - 1].v - m * bp[k - 1].t;
        best = std::max(best, seg_best(bp[k - 1].t, bp[k].t, m, c));
    }
    double term = base_->terminal_slope();
    if (!std::isinf(term)) {
        double m = term;
        double c = bp.back().v - m * bp.back().t;
        if (m <= 0.0) return kInf;  // sublinear tail: conjugate infinite for s > 0
        // the segment is unbounded; the sup is finite iff the stationary point
        // exists (p > 1) or s <= slope of the composed tail
        if (pp == 1.0) {
            if (s > m) return kInf;
            best = std::max(best, seg_best(bp.back().t, kInf, m, c));
        } else {
            double ustar = std::pow(s / (m * pp), pp / (pp - 1.0));
            double u1 = std::max(ustar * 2.0, bp.back().t * 2.0 + 1.0);
            best = std::max(best, seg_best(bp.back().t, u1, m, c));
        }
    }
    return best;
}

double OrliczFunction::conjugate_inverse(double v) const {
    if (kind_ != Kind::composite) return conjugate().inverse(v);
    if (v < 0.0) throw std::domain_error("argument must be nonnegative");
    if (v == 0.0) {
        // sup{s : f*(s) = 0}: bisect on the boundary of positivity
        double lo = 0.0, hi = 1.0;
        while (conjugate_value(hi) == 0.0 && hi < 1e300) hi *= 2.0;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (conjugate_value(mid) <= 0.0 ? lo : hi) = mid;
        }
        return lo;
    }
    double lo = 0.0, hi = 1.0;
    while (conjugate_value(hi) <= v && hi < 1e300) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (conjugate_value(mid) <= v ? lo : hi) = mid;
    }
    return lo;
}

bool OrliczFunction::operator==(const OrliczFunction& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
        case Kind::power:
            return p_ == o.p_ && scale_ == o.scale_;
        case Kind::composite:
            return p_ == o.p_ && *base_ == *o.base_;
        case Kind::pwa:
            if (terminal_slope_ != o.terminal_slope_ || bps_.size() != o.bps_.size()) return false;
            for (std::size_t k = 0; k < bps_.size(); ++k)
                if (bps_[k].t != o.bps_[k].t || bps_[k].v != o.bps_[k].v) return false;
            return true;
    }
    return false;
}

nlohmann::json OrliczFunction::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case Kind::power:
            j["kind"] = "power";
            j["p"] = p_;
            if (scale_ != 1.0) j["scale"] = scale_;
            break;
        case Kind::pwa: {
            j["kind"] = "pwa";
            auto arr = nlohmann::json::array();
            for (const auto& b : bps_) arr.push_back({b.t, b.v});
            j["breakpoints"] = std::move(arr);
            if (std::isinf(terminal_slope_))
                j["terminal_slope"] = "inf";
            else
                j["terminal_slope"] = terminal_slope_;
            break;
        }
        case Kind::composite:
            j["kind"] = "power_composite";
            j["p"] = p_;
            j["base"] = base_->to_json();
            break;
    }
    return j;
}

OrliczFunction OrliczFunction::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind");
    if (kind == "power") return power(j.at("p"), j.value("scale", 1.0));
    if (kind == "pwa") {
        std::vector<Breakpoint> bps;
        for (const auto& b : j.at("breakpoints")) bps.push_back({b.at(0), b.at(1)});
        double term = j.at("terminal_slope").is_string() ? kInf
                                                         : j.at("terminal_slope").get<double>();
        return piecewise(std::move(bps), term);
    }
    if (kind == "power_composite")
        return compose_power(from_json(j.at("base")), j.at("p"));
    throw std::domain_error("unknown function kind: " + kind);
}

double luxemburg_norm(const OrliczFunction& f, std::span<const double> x) {
    double xmax = 0.0;
    for (double xi : x) {
        if (!std::isfinite(xi)) throw std::domain_error("non-finite entry");
        xmax = std::max(xmax, std::abs(xi));
    }
    if (xmax == 0.0) return 0.0;

    auto excess = [&](double rho) {
        double s = 0.0;
        for (double xi : x) {
            double v = f(std::abs(xi) / rho);
            if (std::isinf(v)) return kInf;
            s += v;
        }
        return s;
    };

    double lo = xmax / f.inverse(1.0);
    double hi_arg = f.inverse(1.0 / static_cast<double>(x.size()));
    double hi = hi_arg > 0.0 ? xmax / hi_arg : 2.0 * lo;
    if (hi < lo) hi = lo;
    while (excess(hi) > 1.0) hi *= 2.0;
    // lo may already satisfy the constraint when f jumps through 1
    if (excess(lo) <= 1.0) return lo;
    for (int i = 0; i < 200 && (hi - lo) > 1e-10 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (excess(mid) > 1.0 ? lo : hi) = mid;
    }
    return hi;
}

RegularityReport check_regularity(const OrliczFunction& f, double p, Direction dir) {
    std::vector<double> grid;
    const int kPoints = 1000;
    for (int i = 0; i < kPoints; ++i)
        grid.push_back(std::pow(10.0, -6.0 + 12.0 * i / (kPoints - 1)));
    const OrliczFunction* g = &f;
    if (f.kind() == OrliczFunction::Kind::composite) g = &f.base();
    if (g->kind() == OrliczFunction::Kind::pwa) {
        for (const auto& b : g->breakpoints())
            if (b.t > 0.0) grid.push_back(b.t);
    }
    std::sort(grid.begin(), grid.end());
    RegularityReport rep;
    double prev_t = 0.0, prev_ratio = 0.0;
    bool have_prev = false;
    for (double t : grid) {
        double ft = f(t);
        if (std::isinf(ft)) break;
        double ratio = ft / std::pow(t, p);
        if (have_prev) {
            const double tol = 1e-9 * std::max(std::abs(prev_ratio), std::abs(ratio));
            bool bad = (dir == Direction::decreasing) ? (ratio > prev_ratio + tol)
                                                      : (ratio < prev_ratio - tol);
            if (bad) {
                rep.ok = false;
                rep.t_first = prev_t;
                rep.t_second = t;
                return rep;
            }
        }
        prev_t = t;
        prev_ratio = ratio;
        have_prev = true;
    }
    return rep;
}

std::pair<double, double> equivalence_constants(const OrliczFunction& f,
                                                const OrliczFunction& g,
                                                std::span<const double> grid) {
    if (grid.empty()) throw std::domain_error("empty grid");
    double a = kInf, b = 0.0;
    for (double t : grid) {
        double ratio = f.inverse(t) / g.inverse(t);
        a = std::min(a, ratio);
        b = std::max(b, ratio);
    }
    return {a, b};
}

double Exponents::c_of(double q) {
    double qs = q / (q - 1.0);
    return std::pow(q, 1.0 / q) * std::pow(qs, 1.0 / qs);
}

double Exponents::c_r() const { return c_of(r); }

WeightVector::WeightVector(std::vector<double> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!(entries_[i] > 0.0)) throw std::domain_error("weights must be strictly positive");
        if (i > 0 && entries_[i] > entries_[i - 1] + 1e-15 * entries_[i - 1])
            throw std::domain_error("weights must be nonincreasing");
    }
}

WeightVector WeightVector::power_decay(int n, double q) {
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) e[i] = std::pow(static_cast<double>(n) / (i + 1), 1.0 / q);
    return WeightVector(std::move(e));
}

}  // namespace orlicz
