#include "librate/nonrigorous.hpp"

#include <limits>
#include <vector>

#include "librate/taylor.hpp"

namespace librate {

namespace {

template <class T>
double step_size(const Prc3bpTaylor<T>& tay, int p, double tol, double max_step) {
    double cp = 0, cp1 = 0;
    for (int i = 0; i < 4; ++i) {
        cp = std::max(cp, SeriesTraits<T>::magnitude(tay.x(i, p)));
        cp1 = std::max(cp1, SeriesTraits<T>::magnitude(tay.x(i, p - 1)));
    }
    double h = max_step;
    if (cp > 0) h = std::min(h, std::pow(tol / cp, 1.0 / p));
    if (cp1 > 0) h = std::min(h, std::pow(tol / cp1, 1.0 / (p - 1)));
    return 0.9 * h;
}

template <class T>
void horner_state(const Prc3bpTaylor<T>& tay, int p, double s, T* out) {
    for (int i = 0; i < 4; ++i) {
        T acc = tay.x(i, p);
        for (int k = p - 1; k >= 0; --k) acc = acc * T(s) + tay.x(i, k);
        out[i] = acc;
    }
}

template <class T>
void horner_var(const Prc3bpTaylor<T>& tay, int p, double s, T* out) {
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            T acc = tay.v(r, c, p);
            for (int k = p - 1; k >= 0; --k) acc = acc * T(s) + tay.v(r, c, k);
            out[4 * r + c] = acc;
        }
}

double horner_dy(const Prc3bpTaylor<double>& tay, int p, double s) {
    double acc = p * tay.x(1, p);
    for (int k = p - 1; k >= 1; --k) acc = acc * s + k * tay.x(1, k);
    return acc;
}

template <class T>
void integrate(const ModelParams& prm, int p, double tol, double max_step, T* x, T* V, double t) {
    const bool var = V != nullptr;
    Prc3bpTaylor<T> tay(prm.mu, p, var);
    const double dir = t < 0 ? -1.0 : 1.0;
    double done = 0;
    const double total = std::fabs(t);
    int guard = 0;
    while (done < total) {
        if (++guard > 10000000) throw Error(ErrorCode::StepFailure, "too many steps");
        tay.compute(x, V, p);
        double h = step_size(tay, p, tol, max_step);
        bool last = false;
        if (done + h >= total) {
            h = total - done;
            last = true;
        }
        horner_state(tay, p, dir * h, x);
        if (var) horner_var(tay, p, dir * h, V);
        done = last ? total : done + h;
    }
}

}  // namespace

NonrigorousIntegrator::NonrigorousIntegrator(ModelParams params, int order, double tolerance, double max_step)
    : params_(params), order_(order), tol_(tolerance), max_step_(max_step) {}

Vector NonrigorousIntegrator::flow(const Vector& q, double t) const {
    double x[4] = {q(0), q(1), q(2), q(3)};
    integrate<double>(params_, order_, tol_, max_step_, x, nullptr, t);
    Vector r(4);
    r << x[0], x[1], x[2], x[3];
    return r;
}

PointFlow NonrigorousIntegrator::flow_var(const Vector& q, double t) const {
    double x[4] = {q(0), q(1), q(2), q(3)};
    double V[16] = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    integrate<double>(params_, order_, tol_, max_step_, x, V, t);
    PointFlow out;
    out.state = Vector(4);
    out.state << x[0], x[1], x[2], x[3];
    out.DPhi = Matrix(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out.DPhi(r, c) = V[4 * r + c];
    out.time = t;
    return out;
}

std::array<Jet, 4> NonrigorousIntegrator::flow_jet(const std::array<Jet, 4>& q, double t) const {
    std::array<Jet, 4> x = q;
    integrate<Jet>(params_, order_, tol_, max_step_, x.data(), nullptr, t);
    return x;
}

PointFlow NonrigorousIntegrator::section(const Vector& q, int n, bool positive_x_only, int direction,
                                         double t_max) const {
    const int p = order_;
    Prc3bpTaylor<double> tay(params_.mu, p, true);
    double x[4] = {q(0), q(1), q(2), q(3)};
    double V[16] = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    const double dir = direction < 0 ? -1.0 : 1.0;
    double t = 0;
    int found = 0;
    while (std::fabs(t) < t_max) {
        tay.compute(x, V, p);
        double h = dir * step_size(tay, p, tol_, max_step_);
        double xn[4], Vn[16];
        horner_state(tay, p, h, xn);
        horner_var(tay, p, h, Vn);
        const double y0 = x[1], y1 = xn[1];
        bool crossed = (y0 != 0.0 || t != 0.0) && ((y0 > 0 && y1 <= 0) || (y0 < 0 && y1 >= 0));
        if (y0 == 0.0 && t != 0.0) crossed = false;
        if (crossed) {
            double s = h * y0 / (y0 - y1);
            for (int it = 0; it < 50; ++it) {
                double xs[4];
                horner_state(tay, p, s, xs);
                double ds = xs[1] / horner_dy(tay, p, s);
                s -= ds;
                if (std::fabs(ds) < 1e-17) break;
            }
            double xs[4], Vs[16];
            horner_state(tay, p, s, xs);
            horner_var(tay, p, s, Vs);
            if (!positive_x_only || xs[0] > 0) {
                if (++found == n) {
                    PointFlow out;
                    out.state = Vector(4);
                    out.state << xs[0], xs[1], xs[2], xs[3];
                    out.time = t + s;
                    out.DPhi = Matrix(4, 4);
                    for (int r = 0; r < 4; ++r)
                        for (int c = 0; c < 4; ++c) out.DPhi(r, c) = Vs[4 * r + c];
                    Vector f = vector_field(out.state, params_);
                    out.DP = out.DPhi;
                    for (int r = 0; r < 4; ++r)
                        for (int c = 0; c < 4; ++c) out.DP(r, c) -= f(r) / f(1) * out.DPhi(1, c);
                    return out;
                }
            }
        }
        std::copy(xn, xn + 4, x);
        std::copy(Vn, Vn + 16, V);
        t += h;
    }
    throw Error(ErrorCode::NoTransversalCrossing, "no section crossing within time budget");
}

SymmetricSeed shoot_symmetric_orbit(const NonrigorousIntegrator& nr, double x, double py_guess) {
    double py = py_guess;
    for (int it = 0; it < 30; ++it) {
        Vector q(4);
        q << x, 0, 0, py;
        PointFlow hit = nr.section(q, 1, false);
        double f = hit.state(2);
        double d = hit.DP(2, 3);
        double dpy = f / d;
        py -= dpy;
        if (std::fabs(dpy) <= 4 * std::numeric_limits<double>::epsilon() * (1 + std::fabs(py))) {
            q << x, 0, 0, py;
            hit = nr.section(q, 1, false);
            SymmetricSeed s;
            s.x = x;
            s.py = py;
            s.slope = -hit.DP(2, 0) / hit.DP(2, 3);
            s.half_period = hit.time;
            return s;
        }
    }
    throw Error(ErrorCode::NewtonFailed, "symmetric orbit shooting did not converge");
}

}  // namespace librate
