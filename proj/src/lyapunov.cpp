#include "librate/lyapunov.hpp"

#include <cmath>

#include "librate/parallel.hpp"

namespace librate {

FamilyBox FamilyBox::make(double x0, double r, double py0, double a, double j0_rad, double j1_rad) {
    FamilyBox b;
    b.x0 = x0;
    b.I = Interval(x0) + Interval::sym(r);
    b.py0 = py0;
    b.J0 = Interval(py0) + Interval::sym(j0_rad);
    b.J1 = Interval(py0) + Interval::sym(j1_rad);
    b.a = a;
    return b;
}

void FamilyBox::validate() const {
    if (!I.contains(x0) || !J0.contains(py0)) throw Error(ErrorCode::InvalidArgument, "box centres outside their intervals");
    if (!J0.subset_of(J1)) throw Error(ErrorCode::InvalidArgument, "J0 must be contained in J1");
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "slope a is not finite");
}

LohnerSet FamilyBox::U0_set() const {
    Matrix C = Matrix::Zero(4, 1);
    C(PY, 0) = 1.0;
    return LohnerSet::from_affine(make_state(x0, 0.0, 0.0, py0), C, IVector{J0 - Interval(py0)});
}

LohnerSet FamilyBox::U_set() const {
    Matrix C = Matrix::Zero(4, 2);
    C(X, 0) = 1.0;
    C(PY, 0) = a;
    C(PY, 1) = 1.0;
    return LohnerSet::from_affine(make_state(x0, 0.0, 0.0, py0), C, IVector{I - Interval(x0), J1 - Interval(py0)});
}

State FamilyBox::U_hull() const { return make_state(I, 0.0, 0.0, Interval(a) * (I - Interval(x0)) + J1); }

namespace {

Interval energy_at(const FamilyBox& b, double x, const ModelParams& params) {
    Interval xi(x);
    return hamiltonian(make_state(xi, 0.0, 0.0, Interval(b.a) * (xi - Interval(b.x0)) + b.J1), params);
}

Interval exact_width(const Interval& v) { return Interval(v.hi()) - Interval(v.lo()); }

}  // namespace

constexpr int kMaxSlopePieces = 8;

FamilyCertificate verify_family_box(const FamilyBox& box, const ModelParams& params, const IntegratorOptions& opts) {
    FamilyCertificate cert;
    cert.box = box;
    try {
        box.validate();
        Integrator integ(params, opts);

        SectionCrossing pt = integ.crossing(LohnerSet::from_box(make_state(box.x0, 0.0, 0.0, box.py0)), SectionId::HalfTurn, 1);
        SectionCrossing u0 = integ.crossing(box.U0_set(), SectionId::HalfTurn, 1);
        cert.px_image_U0 = u0.crossing_box[PX];
        const Interval d23_0 = u0.DP(PX, PY);
        if (d23_0.contains_zero()) {
            cert.status = Verdict::fail(ErrorCode::NewtonFailed, "dP23 on U0 contains zero");
            return cert;
        }
        cert.newton_set = Interval(box.py0) - pt.crossing_box[PX] / d23_0;
        if (!cert.newton_set.subset_of(box.J0)) {
            cert.status = Verdict::fail(ErrorCode::NewtonFailed, "N = " + to_string(cert.newton_set) + " not inside J0");
            return cert;
        }

        // alpha on the halves of U left and right of x0, each split further when wrapping eats the margin
        const Interval margin = (exact_width(box.J1) - exact_width(box.J0)) / exact_width(box.I);
        const Interval off = box.I - Interval(box.x0);
        Matrix C = Matrix::Zero(4, 2);
        C(X, 0) = 1.0;
        C(PY, 0) = box.a;
        C(PY, 1) = 1.0;
        auto slope_on = [&](double lo, double hi, Interval& T, bool first) {
            const double m = 0.5 * (lo + hi);
            const IVector center =
                make_state(Interval(box.x0) + Interval(m), 0.0, 0.0, Interval(box.py0) + Interval(box.a) * Interval(m));
            SectionCrossing u = integ.crossing(
                LohnerSet::from_affine(center, C, IVector{Interval(lo, hi) - Interval(m), box.J1 - Interval(box.py0)}),
                SectionId::HalfTurn, 1);
            const Interval d23 = u.DP(PX, PY);
            if (d23.contains_zero()) throw Error(ErrorCode::SlopeFailed, "dP23 on U contains zero");
            T = first ? u.return_time : hull(T, u.return_time);
            return Interval(-(u.DP(PX, X) / d23));
        };
        bool slope_ok = false;
        for (int pieces = 1; pieces <= kMaxSlopePieces && !slope_ok; pieces *= 2) {
            Interval T;
            Interval side[2];
            for (int s = 0; s < 2; ++s) {
                const double from = s == 0 ? off.lo() : 0.0, to = s == 0 ? 0.0 : off.hi();
                for (int k = 0; k < pieces; ++k) {
                    const double lo = k == 0 ? from : from + (to - from) * k / pieces;
                    const double hi = k + 1 == pieces ? to : from + (to - from) * (k + 1) / pieces;
                    const Interval ak = slope_on(lo, hi, T, s == 0 && k == 0);
                    side[s] = k == 0 ? ak : hull(side[s], ak);
                }
            }
            cert.kappa_slope_left = side[0];
            cert.kappa_slope_right = side[1];
            cert.kappa_slope = hull(side[0], side[1]);
            cert.half_time = T;
            slope_ok = abs(cert.kappa_slope - Interval(box.a)).hi() < margin.lo();
        }
        if (!slope_ok) {
            cert.status = Verdict::fail(ErrorCode::SlopeFailed, "|alpha - a| not below (|J1|-|J0|)/|I|");
            return cert;
        }
        cert.energy_left = energy_at(box, box.I.lo(), params);
        cert.energy_right = energy_at(box, box.I.hi(), params);
        cert.status = Verdict::ok();
        energy_foliation(cert, params);
    } catch (const Error& e) {
        cert.status = Verdict::from(e);
    }
    return cert;
}

Interval energy_foliation(FamilyCertificate& cert, const ModelParams& params) {
    if (!cert.status.verified) throw Error(ErrorCode::MissingCertificate, "family box not verified");
    IVector g = hamiltonian_gradient(cert.box.U_hull(), params);
    cert.dH_dx = g[0] + g[3] * cert.kappa_slope;
    return cert.dH_dx;
}

HyperbolicityCertificate hyperbolicity_from_dP(const IMatrix& dP, const IVector& gradH) {
    HyperbolicityCertificate h;
    const Interval Hx = gradH[0];
    if (Hx.contains_zero()) {
        h.status = Verdict::fail(ErrorCode::EnergyDerivativeVanishes, "dH/dx contains zero on U");
        return h;
    }
    h.A_row = IMatrix(1, 2);
    h.A_row(0, 0) = -(gradH[2] / Hx);
    h.A_row(0, 1) = -(gradH[3] / Hx);
    h.B_mat = IMatrix(2, 2);
    const std::size_t idx[2] = {PX, PY};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) h.B_mat(i, j) = dP(idx[i], X) * h.A_row(0, j) + dP(idx[i], idx[j]);
    // The reduced map is area preserving on the energy level, so det = 1 at every fixed point.
    Eig2 e = eig2_real_unimodular(h.B_mat(0, 0) + h.B_mat(1, 1));
    h.lambda1 = e.lambda1;
    h.lambda2 = e.lambda2;
    if (!e.verified_real_split) {
        h.status = Verdict::fail(ErrorCode::EigSplitFailed, "eigenvalues of B not certified real and distinct");
        return h;
    }
    if (!(e.lambda1.mig() > 1.0 && e.lambda2.mag() < 1.0)) {
        h.status = Verdict::fail(ErrorCode::EigSplitFailed, "|lambda1| > 1 > |lambda2| not certified");
        return h;
    }
    h.status = Verdict::ok();
    return h;
}

HyperbolicityCertificate verify_hyperbolicity(const FamilyCertificate& cert, const ModelParams& params,
                                              const IntegratorOptions& opts) {
    HyperbolicityCertificate h;
    h.index = cert.index;
    if (!cert.status.verified) {
        h.status = Verdict::fail(ErrorCode::MissingCertificate, "family box not verified");
        return h;
    }
    try {
        Integrator integ(params, opts);
        SectionCrossing full = integ.crossing(cert.box.U_set(), SectionId::FullTurn, 2);
        h = hyperbolicity_from_dP(full.DP, hamiltonian_gradient(cert.box.U_hull(), params));
        h.return_time = full.return_time;
    } catch (const Error& e) {
        h.status = Verdict::from(e);
    }
    h.index = cert.index;
    return h;
}

std::vector<FamilySeed> generate_seeds(const std::vector<double>& xs, double py_guess, const ModelParams& params) {
    NonrigorousIntegrator nr(params);
    std::vector<FamilySeed> out;
    out.reserve(xs.size());
    double guess = py_guess;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        SymmetricSeed s = shoot_symmetric_orbit(nr, xs[i], guess);
        out.push_back({s.x, s.py, s.slope});
        if (i + 1 < xs.size()) guess = s.py + s.slope * (xs[i + 1] - xs[i]);
    }
    return out;
}

ContinuationResult continue_family(const std::vector<FamilySeed>& seeds, const ContinuationOptions& copt,
                                   const ModelParams& params, const IntegratorOptions& opts) {
    ContinuationResult res;
    const std::size_t n = seeds.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double gap = std::fabs(seeds[i + 1].x - seeds[i].x);
        if (gap > (2.0 - copt.min_overlap) * copt.r)
            throw Error(ErrorCode::ChainGap, "boxes " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                                 " do not overlap by the required margin");
    }
    res.certs.resize(n);
    parallel_for(n, copt.threads, [&](std::size_t i) {
        const FamilySeed& s = seeds[i];
        res.certs[i] = verify_family_box(FamilyBox::make(s.x, copt.r, s.py, s.a, copt.j0_rad, copt.j1_rad), params, opts);
        res.certs[i].index = i;
    });
    res.all_verified = true;
    for (const auto& c : res.certs) res.all_verified = res.all_verified && c.status.verified;

    // |kappa(x) - polyline(x)| <= |N_i - py_i| + |alpha_i - s| |x - x_i| on I_i
    if (res.all_verified && n > 0) {
        double tube = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& c = res.certs[i];
            double base = abs(c.newton_set - Interval(seeds[i].py)).hi();
            double worst = 0;
            for (int side : {-1, 1}) {
                std::size_t j = side < 0 ? i - 1 : i + 1;
                if ((side < 0 && i == 0) || (side > 0 && i + 1 >= n)) continue;
                Interval s = (Interval(seeds[j].py) - Interval(seeds[i].py)) / (Interval(seeds[j].x) - Interval(seeds[i].x));
                const Interval& half = seeds[j].x < seeds[i].x ? c.kappa_slope_left : c.kappa_slope_right;
                worst = std::max(worst, (abs(half - s) * Interval(copt.r)).hi());
            }
            if (n == 1)
                for (const Interval& half : {c.kappa_slope_left, c.kappa_slope_right})
                    worst = std::max(worst, (abs(half - Interval(seeds[i].a)) * Interval(copt.r)).hi());
            tube = std::max(tube, rnd::add_up(base, worst));
        }
        res.tube_radius = tube;
    }
    return res;
}

}  // namespace librate
