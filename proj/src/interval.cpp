#include "librate/interval.hpp"

#include <cfenv>
#include <charconv>
#include <cstdlib>

namespace librate {

namespace {

constexpr double kPiLo = 3.141592653589793116;  // fl(pi) < pi
const double kPiHi = rnd::next_up(kPiLo);

double pad_down(double v, int ulps = 2) {
    for (int i = 0; i < ulps; ++i) v = rnd::next_down(v);
    return v;
}
double pad_up(double v, int ulps = 2) {
    for (int i = 0; i < ulps; ++i) v = rnd::next_up(v);
    return v;
}

// Conservatively decide whether some c + k*period lies in [lo, hi].
bool may_contain_phase(double lo, double hi, double c, double period) {
    double t = std::floor((lo - c) / period);
    double tol = 1e-12 * (1.0 + std::fabs(lo) + std::fabs(hi));
    for (int j = -1; j <= 3; ++j) {
        double p = c + (t + j) * period;
        if (p >= lo - tol && p <= hi + tol) return true;
    }
    return false;
}

double pow_down_pos(double x, int n) {
    double r = 1.0;
    double b = x;
    while (n > 0) {
        if (n & 1) r = rnd::mul_down(r, b);
        n >>= 1;
        if (n) b = rnd::mul_down(b, b);
    }
    return r;
}

double pow_up_pos(double x, int n) {
    double r = 1.0;
    double b = x;
    while (n > 0) {
        if (n & 1) r = rnd::mul_up(r, b);
        n >>= 1;
        if (n) b = rnd::mul_up(b, b);
    }
    return r;
}

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

const char* error_name(ErrorCode c) noexcept {
    switch (c) {
        case ErrorCode::DivisionByZeroInterval: return "DivisionByZeroInterval";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::SingularEnclosure: return "SingularEnclosure";
        case ErrorCode::CollisionBox: return "CollisionBox";
        case ErrorCode::IsolationFailed: return "IsolationFailed";
        case ErrorCode::StepFailure: return "StepFailure";
        case ErrorCode::BlowUp: return "BlowUp";
        case ErrorCode::NoTransversalCrossing: return "NoTransversalCrossing";
        case ErrorCode::ConstraintUndecided: return "ConstraintUndecided";
        case ErrorCode::NewtonFailed: return "NewtonFailed";
        case ErrorCode::SlopeFailed: return "SlopeFailed";
        case ErrorCode::EnergyDerivativeVanishes: return "EnergyDerivativeVanishes";
        case ErrorCode::EigSplitFailed: return "EigSplitFailed";
        case ErrorCode::BadBlockStructure: return "BadBlockStructure";
        case ErrorCode::EigenFailure: return "EigenFailure";
        case ErrorCode::ResonanceDivisionFailure: return "ResonanceDivisionFailure";
        case ErrorCode::InclusionFailed: return "InclusionFailed";
        case ErrorCode::SignUndecided: return "SignUndecided";
        case ErrorCode::DenominatorZero: return "DenominatorZero";
        case ErrorCode::ChainGap: return "ChainGap";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::MissingCertificate: return "MissingCertificate";
        case ErrorCode::IOError: return "IOError";
    }
    return "Unknown";
}

Interval Interval::from_decimal(const std::string& s) {
    // strtod honours the current rounding mode in glibc
    const int saved = std::fegetround();
    char* end = nullptr;
    std::fesetround(FE_DOWNWARD);
    double lo = std::strtod(s.c_str(), &end);
    std::fesetround(FE_UPWARD);
    double hi = std::strtod(s.c_str(), nullptr);
    std::fesetround(saved);
    if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::InvalidArgument, "not a number: " + s);
    if (!(lo <= hi) || hi - lo > std::fabs(rnd::next_up(lo) - lo) * 2) {
        double d = std::strtod(s.c_str(), nullptr);
        return Interval::raw(rnd::next_down(d), rnd::next_up(d));
    }
    return Interval::raw(lo, hi);
}

Interval pi_interval() noexcept { return Interval::raw(kPiLo, kPiHi); }

Interval sqrt(const Interval& a) {
    if (a.lo() < 0) throw Error(ErrorCode::DomainError, "sqrt of interval with negative part");
    return Interval::raw(rnd::sqrt_down(a.lo()), rnd::sqrt_up(a.hi()));
}

Interval sqrt_truncated(const Interval& a) {
    if (a.hi() < 0) throw Error(ErrorCode::DomainError, "sqrt of negative interval");
    return Interval::raw(rnd::sqrt_down(std::max(a.lo(), 0.0)), rnd::sqrt_up(a.hi()));
}

Interval pow(const Interval& a, int n) {
    if (n == 0) return Interval(1.0);
    if (n < 0) return Interval(1.0) / pow(a, -n);
    if (n == 1) return a;
    if (n % 2 == 0) {
        Interval m = abs(a);
        return Interval::raw(pow_down_pos(m.lo(), n), pow_up_pos(m.hi(), n));
    }
    double lo = a.lo() >= 0 ? pow_down_pos(a.lo(), n) : -pow_up_pos(-a.lo(), n);
    double hi = a.hi() >= 0 ? pow_up_pos(a.hi(), n) : -pow_down_pos(-a.hi(), n);
    return Interval::raw(lo, hi);
}

Interval exp(const Interval& a) {
    double lo = std::max(0.0, pad_down(std::exp(a.lo())));
    double hi = pad_up(std::exp(a.hi()));
    return Interval::raw(lo, hi);
}

Interval log(const Interval& a) {
    if (a.lo() <= 0) throw Error(ErrorCode::DomainError, "log of interval not strictly positive");
    return Interval::raw(pad_down(std::log(a.lo())), pad_up(std::log(a.hi())));
}

Interval pow(const Interval& a, const Interval& e) {
    if (a.lo() == 0.0 && a.hi() == 0.0 && e.lo() > 0) return Interval(0.0);
    if (a.lo() <= 0) throw Error(ErrorCode::DomainError, "real power of non-positive interval");
    return exp(e * log(a));
}

Interval sin(const Interval& a) {
    if (a.lo() == 0.0 && a.hi() == 0.0) return a;
    if (!std::isfinite(a.lo()) || !std::isfinite(a.hi()) || a.width() >= 2 * kPiLo ||
        std::fabs(a.lo()) > 1e8 || std::fabs(a.hi()) > 1e8)
        return Interval::raw(-1.0, 1.0);
    double sl = std::sin(a.lo()), sh = std::sin(a.hi());
    double lo = pad_down(std::min(sl, sh));
    double hi = pad_up(std::max(sl, sh));
    if (may_contain_phase(a.lo(), a.hi(), 0.5 * kPiLo, 2 * kPiLo)) hi = 1.0;
    if (may_contain_phase(a.lo(), a.hi(), -0.5 * kPiLo, 2 * kPiLo)) lo = -1.0;
    return Interval::raw(std::max(lo, -1.0), std::min(hi, 1.0));
}

Interval cos(const Interval& a) {
    if (!std::isfinite(a.lo()) || !std::isfinite(a.hi()) || a.width() >= 2 * kPiLo ||
        std::fabs(a.lo()) > 1e8 || std::fabs(a.hi()) > 1e8)
        return Interval::raw(-1.0, 1.0);
    double cl = std::cos(a.lo()), ch = std::cos(a.hi());
    double lo = pad_down(std::min(cl, ch));
    double hi = pad_up(std::max(cl, ch));
    if (may_contain_phase(a.lo(), a.hi(), 0.0, 2 * kPiLo)) hi = 1.0;
    if (may_contain_phase(a.lo(), a.hi(), kPiLo, 2 * kPiLo)) lo = -1.0;
    return Interval::raw(std::max(lo, -1.0), std::min(hi, 1.0));
}

Interval atan(const Interval& a) {
    if (a.lo() == 0.0 && a.hi() == 0.0) return a;
    const double half_pi_hi = rnd::next_up(0.5 * kPiHi);
    double lo = pad_down(std::atan(a.lo()));
    double hi = pad_up(std::atan(a.hi()));
    return Interval::raw(std::max(lo, -half_pi_hi), std::min(hi, half_pi_hi));
}

std::string to_string(const Interval& a) { return "[" + shortest(a.lo()) + ", " + shortest(a.hi()) + "]"; }

}  // namespace librate
