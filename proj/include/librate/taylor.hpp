#pragma once

#include <vector>

#include "librate/interval.hpp"
#include "librate/jet.hpp"
#include "librate/model.hpp"

namespace librate {

template <class T>
struct SeriesTraits;

template <>
struct SeriesTraits<double> {
    static double one_minus(double mu) { return 1.0 - mu; }
    static double inv_pow32(double u) {
        if (!(u > kCollisionRadius * kCollisionRadius)) throw Error(ErrorCode::CollisionBox, "collision");
        return 1.0 / (u * std::sqrt(u));
    }
    static double magnitude(double v) { return std::fabs(v); }
};

template <>
struct SeriesTraits<Interval> {
    static Interval one_minus(double mu) { return Interval(1.0) - Interval(mu); }
    static Interval inv_pow32(const Interval& u) {
        if (!(u.lo() > kCollisionRadius * kCollisionRadius)) throw Error(ErrorCode::CollisionBox, "box touches a primary");
        return Interval(1.0) / (u * sqrt(u));
    }
    static double magnitude(const Interval& v) { return v.mag(); }
};

template <>
struct SeriesTraits<Jet> {
    static Jet one_minus(double mu) { return Jet(1.0 - mu); }
    static Jet inv_pow32(const Jet& u) {
        if (!(u[0] > kCollisionRadius * kCollisionRadius)) throw Error(ErrorCode::CollisionBox, "collision");
        return pow(u, -1.5);
    }
    static double magnitude(const Jet& v) { return std::fabs(v[0]); }
};

// Taylor coefficients in time of the PRC3BP flow, optionally with the
// first variational equation. V is stored row-major, V(r, c).
template <class T>
class Prc3bpTaylor {
public:
    Prc3bpTaylor(double mu, int max_order, bool variational)
        : mu_(mu), max_order_(max_order), var_(variational) {
        auto alloc = [&](std::vector<T>& v) { v.assign(max_order + 1, T(0.0)); };
        for (auto& s : x_) alloc(s);
        alloc(dx1_);
        alloc(dx2_);
        alloc(yy_);
        alloc(d11_);
        alloc(d22_);
        alloc(u1_);
        alloc(u2_);
        alloc(w1_);
        alloc(w2_);
        if (var_) {
            for (auto& s : v_) alloc(s);
            alloc(v1_);
            alloc(v2_);
            alloc(dy1_);
            alloc(dy2_);
            alloc(exx_);
            alloc(eyy_);
            alloc(oxy_);
        }
    }

    int max_order() const { return max_order_; }
    bool variational() const { return var_; }

    // x0: 4 entries; V0: 16 entries row-major (ignored unless variational).
    void compute(const T* x0, const T* V0, int order) {
        if (order > max_order_) throw Error(ErrorCode::InvalidArgument, "Taylor order exceeds allocation");
        order_ = order;
        const T mu(mu_);
        const T m1 = SeriesTraits<T>::one_minus(mu_);
        const T three(3.0);
        for (int i = 0; i < 4; ++i) x_[i][0] = x0[i];
        if (var_)
            for (int j = 0; j < 16; ++j) v_[j][0] = V0[j];
        auto& X = x_[0];
        auto& Y = x_[1];
        auto& PX = x_[2];
        auto& PY = x_[3];
        T inv_u1(0.0), inv_u2(0.0);
        for (int k = 0; k < order; ++k) {
            dx1_[k] = k == 0 ? X[0] - mu : X[k];
            dx2_[k] = k == 0 ? (X[0] + T(1.0)) - mu : X[k];
            yy_[k] = conv(Y, Y, k);
            d11_[k] = conv(dx1_, dx1_, k);
            d22_[k] = conv(dx2_, dx2_, k);
            u1_[k] = d11_[k] + yy_[k];
            u2_[k] = d22_[k] + yy_[k];
            if (k == 0) {
                w1_[0] = SeriesTraits<T>::inv_pow32(u1_[0]);
                w2_[0] = SeriesTraits<T>::inv_pow32(u2_[0]);
                inv_u1 = T(1.0) / u1_[0];
                inv_u2 = T(1.0) / u2_[0];
            } else {
                w1_[k] = power_step(u1_, w1_, -1.5, k, inv_u1);
                w2_[k] = power_step(u2_, w2_, -1.5, k, inv_u2);
            }
            T ox = X[k] - m1 * conv(dx1_, w1_, k) - mu * conv(dx2_, w2_, k);
            T oy = Y[k] - m1 * conv(Y, w1_, k) - mu * conv(Y, w2_, k);
            const T kk(static_cast<double>(k + 1));
            X[k + 1] = (PX[k] + Y[k]) / kk;
            Y[k + 1] = (PY[k] - X[k]) / kk;
            PX[k + 1] = (PY[k] - X[k] + ox) / kk;
            PY[k + 1] = (oy - PX[k] - Y[k]) / kk;
            if (!var_) continue;
            if (k == 0) {
                v1_[0] = w1_[0] * inv_u1;
                v2_[0] = w2_[0] * inv_u2;
            } else {
                v1_[k] = power_step(u1_, v1_, -2.5, k, inv_u1);
                v2_[k] = power_step(u2_, v2_, -2.5, k, inv_u2);
            }
            dy1_[k] = conv(dx1_, Y, k);
            dy2_[k] = conv(dx2_, Y, k);
            exx_[k] = three * (m1 * conv(d11_, v1_, k) + mu * conv(d22_, v2_, k)) - m1 * w1_[k] - mu * w2_[k];
            eyy_[k] = three * (m1 * conv(yy_, v1_, k) + mu * conv(yy_, v2_, k)) - m1 * w1_[k] - mu * w2_[k];
            oxy_[k] = three * (m1 * conv(dy1_, v1_, k) + mu * conv(dy2_, v2_, k));
            for (int c = 0; c < 4; ++c) {
                auto& a = v_[c];
                auto& b = v_[4 + c];
                auto& cc = v_[8 + c];
                auto& d = v_[12 + c];
                a[k + 1] = (b[k] + cc[k]) / kk;
                b[k + 1] = (d[k] - a[k]) / kk;
                cc[k + 1] = (conv(exx_, a, k) + conv(oxy_, b, k) + d[k]) / kk;
                d[k + 1] = (conv(oxy_, a, k) + conv(eyy_, b, k) - cc[k]) / kk;
            }
        }
    }

    int order() const { return order_; }
    const T& x(int i, int k) const { return x_[i][k]; }
    const T& v(int r, int c, int k) const { return v_[4 * r + c][k]; }

private:
    static T conv(const std::vector<T>& a, const std::vector<T>& b, int k) {
        T s = a[0] * b[k];
        for (int j = 1; j <= k; ++j) s += a[j] * b[k - j];
        return s;
    }

    static T power_step(const std::vector<T>& u, const std::vector<T>& w, double alpha, int k, const T& inv_u0) {
        T s = T(alpha * k) * u[k] * w[0];
        for (int j = 1; j < k; ++j) s += T(alpha * (k - j) - j) * u[k - j] * w[j];
        return s * inv_u0 / T(static_cast<double>(k));
    }

    double mu_;
    int max_order_;
    bool var_;
    int order_ = 0;
    std::vector<T> x_[4];
    std::vector<T> v_[16];
    std::vector<T> dx1_, dx2_, yy_, d11_, d22_, u1_, u2_, w1_, w2_;
    std::vector<T> v1_, v2_, dy1_, dy2_, exx_, eyy_, oxy_;
};

}  // namespace librate
