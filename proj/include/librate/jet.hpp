#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "librate/error.hpp"

namespace librate {

// Truncated univariate power series c[0] + c[1] s + ... + c[deg] s^deg.
class Jet {
public:
    static constexpr int kMaxDegree = 8;

    Jet() { c_.fill(0.0); }
    Jet(double v) {  // NOLINT: constants convert implicitly
        c_.fill(0.0);
        c_[0] = v;
    }
    static Jet variable(int degree, double value, double slope = 1.0) {
        Jet j = constant(degree, value);
        if (degree >= 1) j.c_[1] = slope;
        return j;
    }
    static Jet constant(int degree, double value) {
        if (degree < 0 || degree > kMaxDegree) throw Error(ErrorCode::InvalidArgument, "jet degree out of range");
        Jet j(value);
        j.deg_ = degree;
        return j;
    }

    int degree() const { return deg_; }
    double& operator[](int i) { return c_[i]; }
    double operator[](int i) const { return c_[i]; }
    void set_degree(int d) { deg_ = d; }

    Jet& operator+=(const Jet& b) {
        deg_ = std::max(deg_, b.deg_);
        for (int i = 0; i <= deg_; ++i) c_[i] += b.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& b) {
        deg_ = std::max(deg_, b.deg_);
        for (int i = 0; i <= deg_; ++i) c_[i] -= b.c_[i];
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(const Jet& a) {
        Jet r = a;
        for (int i = 0; i <= r.deg_; ++i) r.c_[i] = -r.c_[i];
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        r.deg_ = std::max(a.deg_, b.deg_);
        if (a.deg_ == 0) {
            for (int i = 0; i <= r.deg_; ++i) r.c_[i] = a.c_[0] * b.c_[i];
            return r;
        }
        if (b.deg_ == 0) {
            for (int i = 0; i <= r.deg_; ++i) r.c_[i] = a.c_[i] * b.c_[0];
            return r;
        }
        for (int k = 0; k <= r.deg_; ++k) {
            double s = 0;
            for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
            r.c_[k] = s;
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet r;
        r.deg_ = std::max(a.deg_, b.deg_);
        for (int k = 0; k <= r.deg_; ++k) {
            double s = a.c_[k];
            for (int j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
            r.c_[k] = s / b.c_[0];
        }
        return r;
    }

private:
    std::array<double, kMaxDegree + 1> c_;
    int deg_ = 0;
};

// u^alpha via the standard power recurrence; needs u[0] > 0.
inline Jet pow(const Jet& u, double alpha) {
    Jet w = Jet::constant(u.degree(), std::pow(u[0], alpha));
    for (int k = 1; k <= u.degree(); ++k) {
        double s = 0;
        for (int j = 0; j < k; ++j) s += (alpha * (k - j) - j) * u[k - j] * w[j];
        w[k] = s / (k * u[0]);
    }
    return w;
}

}  // namespace librate
