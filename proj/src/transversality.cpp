#include "librate/transversality.hpp"

#include <algorithm>

#include "librate/parallel.hpp"

namespace librate {

SectionProbe SectionProbe::make(double x_m, double half_width, const LocalBox& box) {
    SectionProbe p;
    p.x_m = x_m;
    p.x_l = x_m - half_width;
    p.x_r = x_m + half_width;
    p.alpha = box.alpha;
    p.B_c = box.central_at(p.x_r);
    if (!(box.B0[0].hi() < p.x_l)) throw Error(ErrorCode::InvalidArgument, "probe must lie beyond B0 in x");
    p.validate();
    return p;
}

void SectionProbe::validate() const {
    if (!(x_l < x_r)) throw Error(ErrorCode::InvalidArgument, "probe needs x_l < x_r");
    if (!(x_l <= x_m && x_m <= x_r)) throw Error(ErrorCode::InvalidArgument, "x_m outside [x_l, x_r]");
    if (B_c.size() != 3) throw Error(ErrorCode::InvalidArgument, "B_c must be 3-dimensional");
    if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
}

IVector SectionProbe::B_E() const { return IVector{Interval(x_l, x_r), B_c[0], B_c[1], B_c[2]}; }

IVector SectionProbe::edge(bool right) const {
    return IVector{Interval(right ? x_r : x_l), B_c[0], B_c[1], B_c[2]};
}

namespace {

SectionCrossing unstable_crossing(const Chart& chart, const IVector& box, const Interval& energy,
                                  const ModelParams& params, const IntegratorOptions& opts) {
    return hit_section_G(chart_set(chart, box), energy, params, opts, 1);
}

LohnerSet mirror(LohnerSet s) {
    for (std::size_t r : {std::size_t(Y), std::size_t(PX)}) {
        s.xbar(r) = -s.xbar(r);
        s.C.row(r) *= -1.0;
        s.B.row(r) *= -1.0;
    }
    return s;
}

Interval split(const Interval& v, int i, int n) {
    const double h = (v.hi() - v.lo()) / n;
    const double a = i == 0 ? v.lo() : v.lo() + h * i;
    const double b = i == n - 1 ? v.hi() : v.lo() + h * (i + 1);
    return Interval(a, b);
}

}  // namespace

CrossingCheck check_crossing(const SectionProbe& probe, const Chart& chart, const ModelParams& params,
                             const IntegratorOptions& opts) {
    probe.validate();
    CrossingCheck out;
    out.energy = hamiltonian(chart_to_phase(chart, probe.B_E()), params);
    out.left_image = unstable_crossing(chart, probe.edge(false), out.energy, params, opts).crossing_box;
    out.right_image = unstable_crossing(chart, probe.edge(true), out.energy, params, opts).crossing_box;
    const Interval l = out.left_image[PX], r = out.right_image[PX];
    if (l.contains_zero() || r.contains_zero()) {
        out.status = Verdict::fail(ErrorCode::SignUndecided, "px of an edge image straddles 0: left " + to_string(l) +
                                                                 " right " + to_string(r));
    } else if (!(l.negative() && r.positive())) {
        out.status = Verdict::fail(ErrorCode::SignUndecided, "edge images not on opposite sides: left " +
                                                                 to_string(l) + " right " + to_string(r));
    } else {
        out.status = Verdict::ok();
    }
    return out;
}

FanImage fan_image(const IMatrix& DG, double alpha) {
    if (DG.rows() != 4 || DG.cols() != 4) throw Error(ErrorCode::InvalidArgument, "DG must be 4x4");
    const Interval cone = Interval::sym(sqrt(Interval(alpha)).hi());
    FanImage f{DG(X, 0), DG(PX, 0)};
    for (std::size_t j = 1; j < 4; ++j) {
        f.dx += DG(X, j) * cone;
        f.dpx += DG(PX, j) * cone;
    }
    return f;
}

SlopeBound slope_bound(const SectionProbe& probe, const Chart& chart, const ModelParams& params,
                       const IntegratorOptions& opts, const SlopeOptions& sopt) {
    probe.validate();
    if (sopt.x_parts < 1 || sopt.c_parts < 1) throw Error(ErrorCode::InvalidArgument, "subdivision counts must be positive");
    const IVector BE = probe.B_E();
    const Interval energy = hamiltonian(chart_to_phase(chart, BE), params);
    const std::size_t n = static_cast<std::size_t>(sopt.x_parts) * sopt.c_parts;
    std::vector<Interval> dx(n), dpx(n);
    parallel_for(n, sopt.threads, [&](std::size_t k) {
        IVector box = BE;
        box[0] = split(BE[0], static_cast<int>(k) / sopt.c_parts, sopt.x_parts);
        box[3] = split(BE[3], static_cast<int>(k) % sopt.c_parts, sopt.c_parts);
        const SectionCrossing sc = unstable_crossing(chart, box, energy, params, opts);
        const FanImage f = fan_image((sc.DP * chart.C) * psi_jacobian(chart, box), probe.alpha);
        dx[k] = f.dx;
        dpx[k] = f.dpx;
    });
    SlopeBound out;
    out.parts = static_cast<int>(n);
    out.dx = dx[0];
    out.dpx = dpx[0];
    for (std::size_t k = 0; k < n; ++k) {
        if (dx[k].contains_zero())
            throw Error(ErrorCode::DenominatorZero, "pi_x DG V+ contains 0 on part " + std::to_string(k));
        const Interval ak = dpx[k] / dx[k];
        out.a = k == 0 ? ak : hull(out.a, ak);
        out.dx = hull(out.dx, dx[k]);
        out.dpx = hull(out.dpx, dpx[k]);
    }
    if (out.dx.contains_zero()) throw Error(ErrorCode::DenominatorZero, "pi_x DG V+ changes sign across B_E");
    return out;
}

Interval transversal_angle_deg(const Interval& a) {
    const Interval deg = Interval(180.0) / pi_interval();
    // 2 atan(a) is the angle between slopes a and -a, folded into [0, 90]
    const Interval phi = Interval(2.0) * atan(abs(a)) * deg;
    if (phi.hi() <= 90.0) return phi;
    const Interval folded = Interval(180.0) - phi;
    if (phi.lo() >= 90.0) return folded;
    return Interval(std::min(phi.lo(), folded.lo()), 90.0);
}

SectionCrossing stable_crossing(const Chart& chart, const IVector& box, const ModelParams& params,
                                const IntegratorOptions& opts) {
    const Interval energy = hamiltonian(chart_to_phase(chart, box), params);
    return hit_section_G(mirror(chart_set(chart, box)), energy, params, opts, -1);
}

IntersectionCertificate certify_transversal(const SectionProbe& probe, const Chart& chart,
                                            const FiberCertificate& fiber, const FamilyCertificate& family,
                                            const HyperbolicityCertificate& hyp, const ModelParams& params,
                                            const IntegratorOptions& opts, const SlopeOptions& sopt) {
    IntersectionCertificate cert;
    cert.probe = probe;
    try {
        probe.validate();
        if (!family.status.verified || !hyp.status.verified || !fiber.status.verified) {
            cert.status = Verdict::fail(ErrorCode::MissingCertificate, "family, hyperbolicity and fiber certificates required");
            return cert;
        }
        if (fiber.box.x_hi < probe.x_r || fiber.box.alpha != probe.alpha) {
            cert.status = Verdict::fail(ErrorCode::MissingCertificate, "fiber enclosure does not cover the probe");
            return cert;
        }
        const IVector need = fiber.box.central_at(probe.x_r);
        for (int i = 0; i < 3; ++i)
            if (!need[i].subset_of(probe.B_c[i])) {
                cert.status = Verdict::fail(ErrorCode::InvalidArgument, "B_c does not contain the fiber range");
                return cert;
            }
        CrossingCheck cc = check_crossing(probe, chart, params, opts);
        cert.left_image = cc.left_image;
        cert.right_image = cc.right_image;
        if (!cc.status.verified) {
            cert.status = cc.status;
            return cert;
        }
        SlopeBound sb = slope_bound(probe, chart, params, opts, sopt);
        cert.slope_a = sb.a;
        cert.slope_parts = sb.parts;
        cert.angle_deg = transversal_angle_deg(sb.a);
        if (!sb.a.positive()) {
            cert.status = Verdict::fail(ErrorCode::SignUndecided, "slope enclosure not positive: " + to_string(sb.a));
            return cert;
        }
        cert.status = Verdict::ok();
    } catch (const Error& e) {
        cert.status = Verdict::from(e);
    }
    return cert;
}

}  // namespace librate
