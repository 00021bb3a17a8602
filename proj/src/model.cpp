#include "librate/model.hpp"

namespace librate {

namespace {

struct Potential {
    Interval dx1, dx2, y;
    Interval w1, w2;  // r^-3
    Interval v1, v2;  // r^-5
    Interval r1, r2;
};

Potential potential_terms(const Interval& x, const Interval& y, const ModelParams& p, bool second) {
    Potential t;
    t.dx1 = x - Interval(p.mu);
    t.dx2 = (x + Interval(1.0)) - Interval(p.mu);
    t.y = y;
    Interval yy = sqr(y);
    Interval s1 = sqr(t.dx1) + yy;
    Interval s2 = sqr(t.dx2) + yy;
    constexpr double r2min = kCollisionRadius * kCollisionRadius;
    if (s1.lo() <= r2min || s2.lo() <= r2min) throw Error(ErrorCode::CollisionBox, "box touches a primary");
    t.r1 = sqrt(s1);
    t.r2 = sqrt(s2);
    t.w1 = Interval(1.0) / (s1 * t.r1);
    t.w2 = Interval(1.0) / (s2 * t.r2);
    if (second) {
        t.v1 = t.w1 / s1;
        t.v2 = t.w2 / s2;
    }
    return t;
}

}  // namespace

void ModelParams::validate() const {
    if (!(mu > 0.0 && mu < 0.5)) throw Error(ErrorCode::ConfigError, "mu must satisfy 0 < mu < 1/2");
}

State make_state(Interval x, Interval y, Interval px, Interval py) { return State{x, y, px, py}; }

State make_state(const Vector& p) { return IVector::from(p); }

Interval omega(const Interval& x, const Interval& y, const ModelParams& params) {
    Potential t = potential_terms(x, y, params, false);
    Interval m1 = Interval(1.0) - Interval(params.mu);
    return (sqr(x) + sqr(y)) * Interval(0.5) + m1 / t.r1 + Interval(params.mu) / t.r2;
}

Interval hamiltonian(const State& q, const ModelParams& params) {
    Interval kin = (sqr(q[PX] + q[Y]) + sqr(q[PY] - q[X])) * Interval(0.5);
    return kin - omega(q[X], q[Y], params);
}

IVector hamiltonian_gradient(const State& q, const ModelParams& params) {
    Potential t = potential_terms(q[X], q[Y], params, false);
    Interval m1 = Interval(1.0) - Interval(params.mu);
    Interval mu(params.mu);
    Interval ox = q[X] - m1 * t.dx1 * t.w1 - mu * t.dx2 * t.w2;
    Interval oy = q[Y] - m1 * q[Y] * t.w1 - mu * q[Y] * t.w2;
    Interval a = q[PX] + q[Y];
    Interval b = q[PY] - q[X];
    return IVector{-b - ox, a - oy, a, b};
}

IVector vector_field(const State& q, const ModelParams& params) {
    Potential t = potential_terms(q[X], q[Y], params, false);
    Interval m1 = Interval(1.0) - Interval(params.mu);
    Interval mu(params.mu);
    Interval ox = q[X] - m1 * t.dx1 * t.w1 - mu * t.dx2 * t.w2;
    Interval oy = q[Y] - m1 * q[Y] * t.w1 - mu * q[Y] * t.w2;
    Interval a = q[PX] + q[Y];
    Interval b = q[PY] - q[X];
    return IVector{a, b, b + ox, oy - a};
}

IMatrix variational_field(const State& q, const ModelParams& params) {
    Potential t = potential_terms(q[X], q[Y], params, true);
    Interval m1 = Interval(1.0) - Interval(params.mu);
    Interval mu(params.mu);
    Interval three(3.0);
    Interval yy = sqr(q[Y]);
    Interval oxx = Interval(1.0) - m1 * (t.w1 - three * sqr(t.dx1) * t.v1) - mu * (t.w2 - three * sqr(t.dx2) * t.v2);
    Interval oyy = Interval(1.0) - m1 * (t.w1 - three * yy * t.v1) - mu * (t.w2 - three * yy * t.v2);
    Interval oxy = three * m1 * t.dx1 * q[Y] * t.v1 + three * mu * t.dx2 * q[Y] * t.v2;
    Interval one(1.0);
    return IMatrix{{0.0, 1.0, 1.0, 0.0},
                   {-1.0, 0.0, 0.0, 1.0},
                   {oxx - one, oxy, 0.0, 1.0},
                   {oxy, oyy - one, -1.0, 0.0}};
}

State symmetry_S(const State& q) { return State{q[X], -q[Y], -q[PX], q[PY]}; }

HillRegion hill_region_test(const Interval& x, const Interval& y, const EnergyLevel& h, const ModelParams& params) {
    Interval om = omega(x, y, params);
    Interval minus_h = -h.h;
    if (om.lo() > minus_h.hi()) return HillRegion::Inside;
    if (om.hi() < minus_h.lo()) return HillRegion::Outside;
    return HillRegion::Boundary;
}

namespace {

// Ω_x on the x-axis and its derivative, over a box in x.
Interval axis_force(const Interval& x, const ModelParams& p) {
    Potential t = potential_terms(x, Interval(0.0), p, false);
    Interval m1 = Interval(1.0) - Interval(p.mu);
    return x - m1 * t.dx1 * t.w1 - Interval(p.mu) * t.dx2 * t.w2;
}

Interval axis_force_dx(const Interval& x, const ModelParams& p) {
    Potential t = potential_terms(x, Interval(0.0), p, false);
    Interval m1 = Interval(1.0) - Interval(p.mu);
    return Interval(1.0) + Interval(2.0) * m1 * t.w1 + Interval(2.0) * Interval(p.mu) * t.w2;
}

double axis_force_d(double x, const ModelParams& p) {
    double d1 = x - p.mu, d2 = x + 1 - p.mu;
    return x - (1 - p.mu) * d1 / std::pow(std::fabs(d1), 3) - p.mu * d2 / std::pow(std::fabs(d2), 3);
}

State certify_collinear(double a, double b, const ModelParams& p) {
    // Ω_x is increasing on each gap between singularities; bisect to a float root.
    double fa = axis_force_d(a, p);
    for (int it = 0; it < 200 && b - a > 0; ++it) {
        double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        double fm = axis_force_d(m, p);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    double x0 = 0.5 * (a + b);
    for (double r : {1e-14, 1e-12, 1e-10, 1e-8}) {
        Interval X = Interval::raw(x0 - r, x0 + r);
        IMatrix D(1, 1, axis_force_dx(X, p));
        IVector f{axis_force(Interval(x0), p)};
        Vector x0v(1);
        x0v(0) = x0;
        NewtonOutcome n = interval_newton(f, D, IVector{X}, x0v);
        if (n.status == NewtonStatus::UniqueZeroProven) {
            Interval xs = n.refined[0];
            return State{xs, Interval(0.0), Interval(0.0), xs};
        }
    }
    throw Error(ErrorCode::IsolationFailed, "interval Newton failed to isolate a collinear point");
}

}  // namespace

LibrationPoints libration_points(const ModelParams& params) {
    params.validate();
    const double mu = params.mu;
    const double eps = 1e-3 * mu;
    LibrationPoints L;
    L.L1 = certify_collinear(-3.0, -1.0 + mu - eps, params);
    L.L2 = certify_collinear(-1.0 + mu + eps, mu - eps, params);
    L.L3 = certify_collinear(mu + eps, 3.0, params);
    return L;
}

double hamiltonian(const Vector& q, const ModelParams& params) {
    const double mu = params.mu;
    double r1 = std::hypot(q(0) - mu, q(1));
    double r2 = std::hypot(q(0) + 1 - mu, q(1));
    double om = 0.5 * (q(0) * q(0) + q(1) * q(1)) + (1 - mu) / r1 + mu / r2;
    double a = q(2) + q(1), b = q(3) - q(0);
    return 0.5 * (a * a + b * b) - om;
}

Vector vector_field(const Vector& q, const ModelParams& params) {
    const double mu = params.mu;
    double d1 = q(0) - mu, d2 = q(0) + 1 - mu;
    double r1 = std::hypot(d1, q(1)), r2 = std::hypot(d2, q(1));
    double w1 = 1 / (r1 * r1 * r1), w2 = 1 / (r2 * r2 * r2);
    double ox = q(0) - (1 - mu) * d1 * w1 - mu * d2 * w2;
    double oy = q(1) - (1 - mu) * q(1) * w1 - mu * q(1) * w2;
    double a = q(2) + q(1), b = q(3) - q(0);
    Vector f(4);
    f << a, b, b + ox, oy - a;
    return f;
}

}  // namespace librate
