#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "librate/error.hpp"

namespace librate {

namespace rnd {

inline double next_up(double x) noexcept {
    if (std::isnan(x) || x == std::numeric_limits<double>::infinity()) return x;
    if (x == 0.0) return std::numeric_limits<double>::denorm_min();
    auto u = std::bit_cast<std::uint64_t>(x);
    u = x > 0 ? u + 1 : u - 1;
    return std::bit_cast<double>(u);
}

inline double next_down(double x) noexcept { return -next_up(-x); }

// Below this magnitude fma residuals may be inexact; fall back to one-ulp widening.
inline constexpr double kTiny = 0x1p-960;

inline double fix_overflow_down(double s) noexcept {
    return s == std::numeric_limits<double>::infinity() ? std::numeric_limits<double>::max() : s;
}
inline double fix_overflow_up(double s) noexcept {
    return s == -std::numeric_limits<double>::infinity() ? -std::numeric_limits<double>::max() : s;
}

inline double add_down(double a, double b) noexcept {
    double s = a + b;
    if (!std::isfinite(s)) return fix_overflow_down(s);
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return err < 0 ? next_down(s) : s;
}

inline double add_up(double a, double b) noexcept {
    double s = a + b;
    if (!std::isfinite(s)) return fix_overflow_up(s);
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return err > 0 ? next_up(s) : s;
}

inline double sub_down(double a, double b) noexcept { return add_down(a, -b); }
inline double sub_up(double a, double b) noexcept { return add_up(a, -b); }

inline double mul_down(double a, double b) noexcept {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) return fix_overflow_down(p);
    if (std::fabs(p) < kTiny) return next_down(p);
    double e = std::fma(a, b, -p);
    return e < 0 ? next_down(p) : p;
}

inline double mul_up(double a, double b) noexcept {
    if (a == 0.0 || b == 0.0) return 0.0;
    double p = a * b;
    if (!std::isfinite(p)) return fix_overflow_up(p);
    if (std::fabs(p) < kTiny) return next_up(p);
    double e = std::fma(a, b, -p);
    return e > 0 ? next_up(p) : p;
}

// sign of (a/b - q) where q = fl(a/b)
inline double div_down(double a, double b) noexcept {
    if (a == 0.0) return 0.0;
    double q = a / b;
    if (!std::isfinite(q)) return fix_overflow_down(q);
    if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_down(q);
    double r = std::fma(-q, b, a);
    bool below = (r < 0) != (b < 0) && r != 0;
    return below ? next_down(q) : q;
}

inline double div_up(double a, double b) noexcept {
    if (a == 0.0) return 0.0;
    double q = a / b;
    if (!std::isfinite(q)) return fix_overflow_up(q);
    if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return next_up(q);
    double r = std::fma(-q, b, a);
    bool above = (r > 0) != (b < 0) && r != 0;
    return above ? next_up(q) : q;
}

inline double sqrt_down(double a) noexcept {
    double r = std::sqrt(a);
    if (a == 0.0 || !std::isfinite(r)) return r;
    if (a < kTiny) return next_down(r);
    double e = std::fma(-r, r, a);
    return e < 0 ? next_down(r) : r;
}

inline double sqrt_up(double a) noexcept {
    double r = std::sqrt(a);
    if (a == 0.0 || !std::isfinite(r)) return r;
    if (a < kTiny) return next_up(r);
    double e = std::fma(-r, r, a);
    return e > 0 ? next_up(r) : r;
}

}  // namespace rnd

class Interval {
public:
    constexpr Interval() noexcept : lo_(0.0), hi_(0.0) {}
    constexpr Interval(double v) noexcept : lo_(v), hi_(v) {}  // NOLINT: points convert implicitly
    Interval(double lo, double hi) : lo_(lo), hi_(hi) {
        if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "interval with lo > hi or NaN endpoint");
    }

    // Build without checking; for internal use where lo <= hi is guaranteed.
    static constexpr Interval raw(double lo, double hi) noexcept {
        Interval r;
        r.lo_ = lo;
        r.hi_ = hi;
        return r;
    }
    static Interval entire() noexcept {
        return raw(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
    }
    // symmetric [-r, r]
    static Interval sym(double r) noexcept { return raw(-std::fabs(r), std::fabs(r)); }
    // Enclosure of a decimal literal that may not be representable.
    static Interval from_decimal(const std::string& s);

    constexpr double lo() const noexcept { return lo_; }
    constexpr double hi() const noexcept { return hi_; }
    double mid() const noexcept {
        if (lo_ == hi_) return lo_;
        if (std::isinf(lo_) || std::isinf(hi_)) return std::isinf(lo_) && std::isinf(hi_) ? 0.0 : (std::isinf(lo_) ? hi_ : lo_);
        return 0.5 * lo_ + 0.5 * hi_;
    }
    // upper bound of the radius measured from mid()
    double rad() const noexcept {
        double m = mid();
        return std::max(rnd::sub_up(hi_, m), rnd::sub_up(m, lo_));
    }
    double width() const noexcept { return rnd::sub_up(hi_, lo_); }
    double mag() const noexcept { return std::max(std::fabs(lo_), std::fabs(hi_)); }
    double mig() const noexcept {
        if (lo_ <= 0.0 && hi_ >= 0.0) return 0.0;
        return std::min(std::fabs(lo_), std::fabs(hi_));
    }
    bool is_point() const noexcept { return lo_ == hi_; }
    bool contains(double v) const noexcept { return lo_ <= v && v <= hi_; }
    bool contains_zero() const noexcept { return lo_ <= 0.0 && 0.0 <= hi_; }
    // this ⊆ interior of other
    bool subset_of(const Interval& o) const noexcept { return o.lo_ <= lo_ && hi_ <= o.hi_; }
    bool interior_of(const Interval& o) const noexcept { return o.lo_ < lo_ && hi_ < o.hi_; }
    bool overlaps(const Interval& o) const noexcept { return lo_ <= o.hi_ && o.lo_ <= hi_; }
    bool positive() const noexcept { return lo_ > 0.0; }
    bool negative() const noexcept { return hi_ < 0.0; }

    Interval& operator+=(const Interval& b) noexcept;
    Interval& operator-=(const Interval& b) noexcept;
    Interval& operator*=(const Interval& b) noexcept;
    Interval& operator/=(const Interval& b);

    friend bool operator==(const Interval& a, const Interval& b) noexcept {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    double lo_;
    double hi_;
};

inline Interval operator-(const Interval& a) noexcept { return Interval::raw(-a.hi(), -a.lo()); }
inline Interval operator+(const Interval& a) noexcept { return a; }

inline Interval operator+(const Interval& a, const Interval& b) noexcept {
    return Interval::raw(rnd::add_down(a.lo(), b.lo()), rnd::add_up(a.hi(), b.hi()));
}

inline Interval operator-(const Interval& a, const Interval& b) noexcept {
    return Interval::raw(rnd::sub_down(a.lo(), b.hi()), rnd::sub_up(a.hi(), b.lo()));
}

inline Interval operator*(const Interval& a, const Interval& b) noexcept {
    using namespace rnd;
    const double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
    if (al >= 0) {
        if (bl >= 0) return Interval::raw(mul_down(al, bl), mul_up(ah, bh));
        if (bh <= 0) return Interval::raw(mul_down(ah, bl), mul_up(al, bh));
        return Interval::raw(mul_down(ah, bl), mul_up(ah, bh));
    }
    if (ah <= 0) {
        if (bl >= 0) return Interval::raw(mul_down(al, bh), mul_up(ah, bl));
        if (bh <= 0) return Interval::raw(mul_down(ah, bh), mul_up(al, bl));
        return Interval::raw(mul_down(al, bh), mul_up(al, bl));
    }
    if (bl >= 0) return Interval::raw(mul_down(al, bh), mul_up(ah, bh));
    if (bh <= 0) return Interval::raw(mul_down(ah, bl), mul_up(al, bl));
    return Interval::raw(std::min(mul_down(al, bh), mul_down(ah, bl)), std::max(mul_up(al, bl), mul_up(ah, bh)));
}

inline Interval operator/(const Interval& a, const Interval& b) {
    using namespace rnd;
    const double al = a.lo(), ah = a.hi(), bl = b.lo(), bh = b.hi();
    if (bl > 0) {
        if (al >= 0) return Interval::raw(div_down(al, bh), div_up(ah, bl));
        if (ah <= 0) return Interval::raw(div_down(al, bl), div_up(ah, bh));
        return Interval::raw(div_down(al, bl), div_up(ah, bl));
    }
    if (bh < 0) {
        if (al >= 0) return Interval::raw(div_down(ah, bh), div_up(al, bl));
        if (ah <= 0) return Interval::raw(div_down(ah, bl), div_up(al, bh));
        return Interval::raw(div_down(ah, bh), div_up(al, bh));
    }
    throw Error(ErrorCode::DivisionByZeroInterval, "divisor interval contains zero");
}

inline Interval& Interval::operator+=(const Interval& b) noexcept { return *this = *this + b; }
inline Interval& Interval::operator-=(const Interval& b) noexcept { return *this = *this - b; }
inline Interval& Interval::operator*=(const Interval& b) noexcept { return *this = *this * b; }
inline Interval& Interval::operator/=(const Interval& b) { return *this = *this / b; }

inline Interval sqr(const Interval& a) noexcept {
    using namespace rnd;
    if (a.lo() >= 0) return Interval::raw(mul_down(a.lo(), a.lo()), mul_up(a.hi(), a.hi()));
    if (a.hi() <= 0) return Interval::raw(mul_down(a.hi(), a.hi()), mul_up(a.lo(), a.lo()));
    double m = std::max(-a.lo(), a.hi());
    return Interval::raw(0.0, mul_up(m, m));
}

inline Interval abs(const Interval& a) noexcept {
    if (a.lo() >= 0) return a;
    if (a.hi() <= 0) return -a;
    return Interval::raw(0.0, std::max(-a.lo(), a.hi()));
}

inline Interval hull(const Interval& a, const Interval& b) noexcept {
    return Interval::raw(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

inline std::optional<Interval> meet(const Interval& a, const Interval& b) noexcept {
    double lo = std::max(a.lo(), b.lo());
    double hi = std::min(a.hi(), b.hi());
    if (lo > hi) return std::nullopt;
    return Interval::raw(lo, hi);
}

// Strict policy: throws DomainError when a.lo < 0.
Interval sqrt(const Interval& a);
// Truncation policy: uses a ∩ [0, inf); throws DomainError only if that is empty.
Interval sqrt_truncated(const Interval& a);
Interval pow(const Interval& a, int n);
// a^e for real e, requires a > 0 (or a >= 0 with e > 0)
Interval pow(const Interval& a, const Interval& e);
Interval exp(const Interval& a);
Interval log(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval atan(const Interval& a);

// π and related constants as tight enclosures
Interval pi_interval() noexcept;

// widen by absolute and relative amounts
inline Interval inflate(const Interval& a, double abs_eps, double rel = 0.0) noexcept {
    double r = abs_eps + rel * a.rad();
    return Interval::raw(rnd::sub_down(a.lo(), r), rnd::add_up(a.hi(), r));
}

std::string to_string(const Interval& a);

}  // namespace librate
