#include "librate/integrator.hpp"

#include <algorithm>
#include <numeric>

#include "librate/taylor.hpp"

namespace librate {

void IntegratorOptions::validate() const {
    if (taylor_order < 4 || taylor_order > 60) throw Error(ErrorCode::ConfigError, "taylor_order must be in [4, 60]");
    if (!(abs_tolerance > 0)) throw Error(ErrorCode::ConfigError, "abs_tolerance must be positive");
    if (!(max_step > 0) || !(min_step > 0) || min_step > max_step)
        throw Error(ErrorCode::ConfigError, "need 0 < min_step <= max_step");
    if (!(width_cap > 0)) throw Error(ErrorCode::ConfigError, "width_cap must be positive");
}

const char* section_name(SectionId id) {
    switch (id) {
        case SectionId::HalfTurn: return "half_turn";
        case SectionId::FullTurn: return "full_turn";
        case SectionId::SigmaG: return "sigma_G";
    }
    return "?";
}

IMatrix SectionCrossing::DP3() const {
    static constexpr std::size_t idx[3] = {X, PX, PY};
    IMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m(i, j) = DP(idx[i], idx[j]);
    return m;
}

LohnerSet LohnerSet::from_box(const IVector& box) {
    LohnerSet s;
    const std::size_t n = box.size();
    s.xbar = box.mid();
    s.C = Matrix::Identity(n, n);
    s.r0 = box - IVector::from(s.xbar);
    s.B = Matrix::Identity(n, n);
    s.r = IVector(n);
    s.Vbar = Matrix::Identity(n, n);
    s.Bv = Matrix::Identity(n, n);
    s.Rv = IMatrix(n, n);
    return s;
}

LohnerSet LohnerSet::from_affine(const IVector& center, const Matrix& C, const IVector& r0, const IVector& extra) {
    LohnerSet s;
    const std::size_t n = center.size();
    s.xbar = center.mid();
    s.C = C;
    s.r0 = r0;
    s.B = Matrix::Identity(n, n);
    s.r = center - IVector::from(s.xbar);
    if (extra.size() == n) s.r = s.r + extra;
    s.Vbar = Matrix::Identity(n, n);
    s.Bv = Matrix::Identity(n, n);
    s.Rv = IMatrix(n, n);
    return s;
}

IVector LohnerSet::hull() const { return IVector::from(xbar) + C * r0 + B * r; }

IMatrix LohnerSet::derivative() const { return IMatrix::from(Vbar) + Bv * Rv; }

struct Integrator::StepData {
    double h = 0;
    int p = 0;
    std::vector<IVector> cc;  // center, state only
    std::vector<IMatrix> cV;  // box, variational
    IVector rx;               // order p+1 coefficient on the rough enclosure
    IMatrix rV;
    IVector Wx;
};

Integrator::Integrator(ModelParams params, IntegratorOptions opts) : params_(params), opts_(opts) {
    params_.validate();
    opts_.validate();
}

Integrator::~Integrator() = default;

namespace {

Interval horner(const std::vector<IVector>& c, std::size_t i, const Interval& s) {
    Interval acc = c.back()[i];
    for (std::size_t k = c.size() - 1; k-- > 0;) acc = acc * s + c[k][i];
    return acc;
}

Interval horner(const std::vector<IMatrix>& c, std::size_t r, std::size_t col, const Interval& s) {
    Interval acc = c.back()(r, col);
    for (std::size_t k = c.size() - 1; k-- > 0;) acc = acc * s + c[k](r, col);
    return acc;
}

Interval widen(const Interval& a, double factor) {
    double d = factor * a.width() + 1e-15 * (1.0 + a.mag());
    return inflate(a, d);
}

// Orthonormal frame from the columns of A, processed in order of decreasing weight.
Matrix qr_frame(const Matrix& A, const std::vector<double>& weight) {
    const Eigen::Index n = A.cols();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> key(n);
    bool any = false;
    for (Eigen::Index j = 0; j < n; ++j) any = any || weight[j] > 0;
    for (Eigen::Index j = 0; j < n; ++j) key[j] = A.col(j).norm() * (any ? weight[j] : 1.0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return key[a] > key[b]; });
    Matrix Ap(A.rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) Ap.col(j) = A.col(order[j]);
    Eigen::HouseholderQR<Matrix> qr(Ap);
    Matrix Q = qr.householderQ();
    return Q;
}

}  // namespace

bool Integrator::prepare_step(const LohnerSet& s, double h, bool exact, StepData& d) const {
    const int p = opts_.taylor_order;
    const double mu = params_.mu;
    IVector X = hull(s.hull(), IVector::from(s.xbar));

    Prc3bpTaylor<Interval> tc(mu, p, false);
    Interval xc[4] = {s.xbar(0), s.xbar(1), s.xbar(2), s.xbar(3)};
    tc.compute(xc, nullptr, p);
    if (!exact) {
        double cp = 0, cp1 = 0;
        for (int i = 0; i < 4; ++i) {
            cp = std::max(cp, tc.x(i, p).mag());
            cp1 = std::max(cp1, tc.x(i, p - 1).mag());
        }
        double hs = opts_.max_step;
        if (cp > 0) hs = std::min(hs, std::pow(opts_.abs_tolerance / cp, 1.0 / p));
        if (cp1 > 0) hs = std::min(hs, std::pow(opts_.abs_tolerance / cp1, 1.0 / (p - 1)));
        hs *= 0.9;
        hs = std::max(hs, opts_.min_step);
        h = std::copysign(std::min(std::fabs(h), hs), h);
    }

    Prc3bpTaylor<Interval> tx(mu, p, true);
    Interval xb[4] = {X[0], X[1], X[2], X[3]};
    Interval V0[16];
    for (int i = 0; i < 16; ++i) V0[i] = Interval(i % 5 == 0 ? 1.0 : 0.0);
    tx.compute(xb, V0, p);

    Prc3bpTaylor<Interval> tw(mu, p + 1, true);
    for (;;) {
        const Interval sint = hull(Interval(0.0), Interval(h));
        const Interval sp1 = pow(sint, p + 1);
        Interval Yx[4], YV[16], Wx[4], WV[16];
        for (int i = 0; i < 4; ++i) {
            Interval acc = tx.x(i, p);
            for (int k = p - 1; k >= 0; --k) acc = acc * sint + tx.x(i, k);
            Yx[i] = acc;
            Wx[i] = widen(acc, 0.1);
        }
        for (int j = 0; j < 16; ++j) {
            Interval acc = tx.v(j / 4, j % 4, p);
            for (int k = p - 1; k >= 0; --k) acc = acc * sint + tx.v(j / 4, j % 4, k);
            YV[j] = acc;
            WV[j] = widen(acc, 0.1);
        }
        bool ok = false;
        for (int it = 0; it < 6 && !ok; ++it) {
            try {
                tw.compute(Wx, WV, p + 1);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::CollisionBox) throw;
                break;
            }
            ok = true;
            Interval Zx[4], ZV[16];
            for (int i = 0; i < 4; ++i) {
                Zx[i] = Yx[i] + sp1 * tw.x(i, p + 1);
                if (!Zx[i].interior_of(Wx[i])) ok = false;
            }
            for (int j = 0; j < 16; ++j) {
                ZV[j] = YV[j] + sp1 * tw.v(j / 4, j % 4, p + 1);
                if (!ZV[j].interior_of(WV[j])) ok = false;
            }
            if (!ok) {
                for (int i = 0; i < 4; ++i) Wx[i] = widen(hull(Wx[i], Zx[i]), 0.5);
                for (int j = 0; j < 16; ++j) WV[j] = widen(hull(WV[j], ZV[j]), 0.5);
            }
        }
        if (ok) {
            d.h = h;
            d.p = p;
            d.cc.assign(p + 1, IVector(4));
            d.cV.assign(p + 1, IMatrix(4, 4));
            for (int k = 0; k <= p; ++k) {
                for (int i = 0; i < 4; ++i) d.cc[k][i] = tc.x(i, k);
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c) d.cV[k](r, c) = tx.v(r, c, k);
            }
            d.rx = IVector(4);
            d.rV = IMatrix(4, 4);
            d.Wx = IVector(4);
            for (int i = 0; i < 4; ++i) {
                d.rx[i] = tw.x(i, p + 1);
                d.Wx[i] = Wx[i];
            }
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) d.rV(r, c) = tw.v(r, c, p + 1);
            return true;
        }
        if (exact) return false;
        h *= 0.5;
        if (std::fabs(h) < opts_.min_step) throw Error(ErrorCode::StepFailure, "cannot validate a step above min_step");
    }
}

LohnerSet Integrator::advance(const LohnerSet& s, const StepData& d, const Interval& dt) const {
    const std::size_t n = 4;
    IVector Tc(n);
    for (std::size_t i = 0; i < n; ++i) Tc[i] = horner(d.cc, i, dt);
    IMatrix J(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) J(r, c) = horner(d.cV, r, c, dt);
    const Interval dtp = pow(dt, d.p + 1);
    IVector Rx = dtp * d.rx;
    IMatrix RV = dtp * d.rV;

    LohnerSet o;
    o.t = s.t + dt;

    IMatrix JC = J * s.C;
    o.C = JC.mid();
    IMatrix JB = J * s.B;
    IVector y = Tc + Rx + (JC - IMatrix::from(o.C)) * s.r0;
    o.xbar = y.mid();
    std::vector<double> wr(n);
    for (std::size_t j = 0; j < n; ++j) wr[j] = s.r[j].rad();
    o.B = qr_frame(JB.mid(), wr);
    IMatrix Binv = inverse_enclosure(o.B);
    o.r0 = s.r0;
    o.r = (Binv * JB) * s.r + Binv * (y - IVector::from(o.xbar));

    IMatrix Jf = J + RV;
    IMatrix JV = Jf * s.Vbar;
    o.Vbar = JV.mid();
    IMatrix JBv = Jf * s.Bv;
    std::vector<double> wv(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t c = 0; c < n; ++c) wv[j] = std::max(wv[j], s.Rv(j, c).rad());
    o.Bv = qr_frame(JBv.mid(), wv);
    IMatrix Bvinv = inverse_enclosure(o.Bv);
    o.Rv = (Bvinv * JBv) * s.Rv + Bvinv * (JV - IMatrix::from(o.Vbar));
    return o;
}

void Integrator::check_width(const LohnerSet& s) const {
    if (s.hull().max_width() > opts_.width_cap) throw Error(ErrorCode::BlowUp, "enclosure width exceeds cap");
}

FlowEnclosure Integrator::flow(const LohnerSet& s, const Interval& T) const {
    FlowEnclosure out;
    if (T.lo() < 0 && T.hi() > 0) throw Error(ErrorCode::InvalidArgument, "time interval straddles zero");
    if (T.lo() == 0 && T.hi() == 0) {
        out.t_span = s.t;
        out.set = s;
        out.state_out = s.hull();
        out.deriv_out = s.derivative();
        return out;
    }
    const double dir = T.hi() > 0 ? 1.0 : -1.0;
    LohnerSet cur = s;
    StepData d;
    for (;;) {
        if (++out.steps > opts_.max_steps) throw Error(ErrorCode::StepFailure, "step budget exhausted");
        Interval rem = dir > 0 ? T - cur.t : cur.t - T;  // remaining magnitude
        if (rem.hi() <= 0) break;
        prepare_step(cur, dir * opts_.max_step, false, d);
        if (std::fabs(d.h) >= rem.lo()) {
            StepData fin;
            if (prepare_step(cur, dir * rem.hi(), true, fin)) {
                Interval dt = dir > 0 ? rem : -rem;
                if (rem.lo() < 0) dt = dir > 0 ? Interval::raw(0.0, rem.hi()) : Interval::raw(-rem.hi(), 0.0);
                cur = advance(cur, fin, dt);
                check_width(cur);
                break;
            }
            double h = 0.5 * std::max(rem.lo(), opts_.min_step);
            if (!prepare_step(cur, dir * h, true, d)) throw Error(ErrorCode::StepFailure, "final step not validated");
        }
        cur = advance(cur, d, Interval(d.h));
        check_width(cur);
    }
    out.t_span = cur.t;
    out.state_out = cur.hull();
    out.deriv_out = cur.derivative();
    out.set = std::move(cur);
    return out;
}

SectionCrossing Integrator::crossing(const LohnerSet& s, SectionId id, int n, int dir, const Interval& energy) const {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n_crossings must be >= 1");
    const double tdir = dir < 0 ? -1.0 : 1.0;
    LohnerSet cur = s;
    int count = 0;
    long steps = 0;
    int sign = 0;  // current sign of y, 0 while leaving the section
    {
        Interval y0 = cur.hull()[Y];
        if (y0.positive()) sign = 1;
        else if (y0.negative()) sign = -1;
    }
    StepData d;
    double h_cap = tdir * opts_.max_step;
    for (;;) {
        if (++steps > opts_.max_steps) throw Error(ErrorCode::NoTransversalCrossing, "step budget exhausted before crossing");
        prepare_step(cur, h_cap, false, d);
        h_cap = tdir * opts_.max_step;
        const Interval fy = d.Wx[PY] - d.Wx[X];  // ydot on the rough enclosure
        const Interval Wy = d.Wx[Y];

        if (sign == 0) {
            if (fy.contains_zero()) {
                if (std::fabs(d.h) > 2 * opts_.min_step) {
                    h_cap = 0.5 * d.h;
                    continue;
                }
                throw Error(ErrorCode::NoTransversalCrossing, "initial set not transversal to the section");
            }
            LohnerSet nxt = advance(cur, d, Interval(d.h));
            check_width(nxt);
            Interval yn = nxt.hull()[Y];
            int move = (fy.positive() ? 1 : -1) * (tdir > 0 ? 1 : -1);
            if ((move > 0 && yn.positive()) || (move < 0 && yn.negative())) sign = move;
            cur = std::move(nxt);
            continue;
        }
        if ((sign > 0 && Wy.positive()) || (sign < 0 && Wy.negative())) {
            cur = advance(cur, d, Interval(d.h));
            check_width(cur);
            continue;
        }
        if (fy.contains_zero()) {
            if (std::fabs(d.h) > 2 * opts_.min_step) {
                h_cap = 0.5 * d.h;
                continue;
            }
            throw Error(ErrorCode::NoTransversalCrossing, "ydot not bounded away from zero near the section");
        }
        const int move = (fy.positive() ? 1 : -1) * (tdir > 0 ? 1 : -1);
        if (move == sign) {
            cur = advance(cur, d, Interval(d.h));
            check_width(cur);
            continue;
        }
        LohnerSet nxt = advance(cur, d, Interval(d.h));
        check_width(nxt);
        const Interval yn = nxt.hull()[Y];
        if ((sign > 0 && yn.positive()) || (sign < 0 && yn.negative())) {
            cur = std::move(nxt);
            continue;
        }
        // center crossing time estimate, as a magnitude in [0, |h|]
        const double habs = std::fabs(d.h);
        auto ypoly = [&](double sm, double* dy) {
            double t = tdir * sm;
            double acc = d.cc[d.p][Y].mid(), dacc = 0;
            for (int k = d.p - 1; k >= 0; --k) {
                dacc = dacc * t + acc;
                acc = acc * t + d.cc[k][Y].mid();
            }
            if (dy) *dy = dacc * tdir;
            return acc;
        };
        double sstar = 0.5 * habs;
        for (int it = 0; it < 60; ++it) {
            double dy;
            double v = ypoly(sstar, &dy);
            if (dy == 0) break;
            double ns = std::clamp(sstar - v / dy, 0.0, habs);
            if (std::fabs(ns - sstar) < 1e-17) {
                sstar = ns;
                break;
            }
            sstar = ns;
        }
        const double spread = cur.hull()[Y].rad() / std::max(fy.mig(), 1e-300);
        if (!((sign > 0 && yn.negative()) || (sign < 0 && yn.positive()))) {
            // set straddles the section at the end of the step: stop short of the crossing window
            double hs = sstar - 4 * spread - 1e-12;
            if (hs < opts_.min_step) hs = 0.5 * sstar;
            if (hs < opts_.min_step) throw Error(ErrorCode::NoTransversalCrossing, "crossing window too wide");
            h_cap = tdir * hs;
            continue;
        }
        // every trajectory crosses within this step
        bool counted = true;
        if (id == SectionId::SigmaG) {
            if (d.Wx[X].negative()) counted = false;
        }
        if (counted) {
            double delta = 2 * spread + 1e-13 * habs + 1e-16;
            double lo = 0, hi = habs;
            bool bracket = false;
            for (int it = 0; it < 40 && !bracket; ++it) {
                lo = std::max(0.0, sstar - delta);
                hi = std::min(habs, sstar + delta);
                Interval ylo = lo == 0 ? cur.hull()[Y] : advance(cur, d, Interval(tdir * lo)).hull()[Y];
                Interval yhi = hi == habs ? yn : advance(cur, d, Interval(tdir * hi)).hull()[Y];
                bool okl = sign > 0 ? ylo.positive() : ylo.negative();
                bool okh = sign > 0 ? yhi.negative() : yhi.positive();
                bracket = okl && okh;
                delta *= 4;
            }
            if (!bracket) throw Error(ErrorCode::NoTransversalCrossing, "could not bracket the crossing time");
            Interval dt = tdir > 0 ? Interval::raw(lo, hi) : Interval::raw(-hi, -lo);
            LohnerSet at = advance(cur, d, dt);
            IVector box = at.hull();
            box[Y] = Interval(0.0);
            IMatrix DPhi_cross = at.derivative();
            Interval t_cross = at.t;
            {
                // P(x) = Phi(tc, x) - (f/f_y)(W) Phi_y(tc, x), W the window enclosure
                const IVector W = at.hull();
                const IVector fW = vector_field(W, params_);
                if (fW[Y].contains_zero()) throw Error(ErrorCode::NoTransversalCrossing, "ydot contains zero in the crossing window");
                const LohnerSet atc = advance(cur, d, Interval(tdir * 0.5 * (lo + hi)));
                Matrix Wm = Matrix::Identity(4, 4);
                IVector gdev(4);
                for (std::size_t r = 0; r < 4; ++r) {
                    if (r == Y) continue;
                    const Interval g = fW[r] / fW[Y];
                    Wm(r, Y) = -g.mid();
                    gdev[r] = g - Interval(g.mid());
                }
                const Interval Sy = atc.hull()[Y];
                const IVector proj = mul_exact(Wm, atc.xbar) + mul_exact(Wm, atc.C) * atc.r0 + mul_exact(Wm, atc.B) * atc.r;
                for (std::size_t r = 0; r < 4; ++r) {
                    if (r == Y) continue;
                    if (auto m = meet(box[r], proj[r] - gdev[r] * Sy)) box[r] = *m;
                }
                const Interval dtc = -(Sy / fW[Y]);
                if (auto m = meet(t_cross, atc.t + dtc)) t_cross = *m;
                const IMatrix corr = atc.derivative() + dtc * (variational_field(W, params_) * at.derivative());
                for (std::size_t r = 0; r < 4; ++r)
                    for (std::size_t c = 0; c < 4; ++c)
                        if (auto m = meet(DPhi_cross(r, c), corr(r, c))) DPhi_cross(r, c) = *m;
            }
            if (id == SectionId::SigmaG) {
                if (box[X].negative()) counted = false;
                else if (!box[X].positive()) throw Error(ErrorCode::ConstraintUndecided, "crossing box straddles x = 0");
            }
            if (counted && ++count == n) {
                if (id == SectionId::SigmaG) {
                    Interval bound = Interval(2.0) * (energy + omega(box[X], box[Y], params_));
                    if (!(sqr(box[PX]).hi() < bound.lo()))
                        throw Error(ErrorCode::ConstraintUndecided, "px^2 bound of the section not certified");
                }
                SectionCrossing out;
                out.section_id = id;
                out.crossing_box = box;
                out.return_time = t_cross;
                out.DPhi = DPhi_cross;
                IVector f = vector_field(box, params_);
                if (f[Y].contains_zero()) throw Error(ErrorCode::NoTransversalCrossing, "ydot contains zero at crossing");
                out.DP = IMatrix(4, 4);
                for (std::size_t r = 0; r < 4; ++r) {
                    Interval g = r == Y ? Interval(1.0) : f[r] / f[Y];
                    for (std::size_t c = 0; c < 4; ++c)
                        out.DP(r, c) = r == Y ? Interval(0.0) : out.DPhi(r, c) - g * out.DPhi(Y, c);
                }
                out.ydot = IVector{f[Y]};
                out.steps = steps;
                return out;
            }
        }
        sign = -sign;
        cur = std::move(nxt);
    }
}

FlowEnclosure flow_enclose(const State& q, const Interval& T, const ModelParams& params, const IntegratorOptions& opts) {
    Integrator I(params, opts);
    return I.flow(LohnerSet::from_box(q), T);
}

SectionCrossing poincare_map(const State& q, SectionId section, int n_crossings, const ModelParams& params,
                             const IntegratorOptions& opts) {
    Integrator I(params, opts);
    return I.crossing(LohnerSet::from_box(q), section, n_crossings, 1);
}

SectionCrossing hit_section_G(const LohnerSet& s, const Interval& energy, const ModelParams& params,
                              const IntegratorOptions& opts, int dir) {
    Integrator I(params, opts);
    return I.crossing(s, SectionId::SigmaG, 1, dir, energy);
}

}  // namespace librate
