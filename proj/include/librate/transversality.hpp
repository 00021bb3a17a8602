#pragma once

#include "librate/chart.hpp"

namespace librate {

// B_E = [x_l, x_r] x B_c in local chart coordinates.
struct SectionProbe {
    double x_l = 0, x_m = 0, x_r = 0;
    IVector B_c;  // 3 central coordinates
    double alpha = 0;

    static SectionProbe make(double x_m, double half_width, const LocalBox& box);
    void validate() const;
    IVector B_E() const;
    IVector edge(bool right) const;
};

struct CrossingCheck {
    State left_image, right_image;
    Interval energy;  // H on q0 + C psi(B_E)
    Verdict status;
};

// Sign conditions px(G(B_E^l)) < 0 < px(G(B_E^r)).
CrossingCheck check_crossing(const SectionProbe& probe, const Chart& chart, const ModelParams& params,
                             const IntegratorOptions& opts);

struct SlopeOptions {
    int x_parts = 20;  // split of [x_l, x_r]
    int c_parts = 5;   // split of the last central coordinate
    unsigned threads = 1;
};

struct SlopeBound {
    Interval a;
    Interval dx;   // pi_x DG V+ over all parts
    Interval dpx;  // pi_px DG V+
    int parts = 0;
};

// (pi_x, pi_px) of DG applied to V+ = {1} x [-sqrt(alpha), sqrt(alpha)]^3
struct FanImage {
    Interval dx, dpx;
};
FanImage fan_image(const IMatrix& DG, double alpha);

// Throws DenominatorZero when pi_x DG V+ is not sign definite.
SlopeBound slope_bound(const SectionProbe& probe, const Chart& chart, const ModelParams& params,
                       const IntegratorOptions& opts, const SlopeOptions& sopt = {});

// Acute angle in degrees between lines of slope a and -a.
Interval transversal_angle_deg(const Interval& a);

// First hit of the stable fiber image S(q0 + C psi(box)) with Sigma in backward time.
SectionCrossing stable_crossing(const Chart& chart, const IVector& box, const ModelParams& params,
                                const IntegratorOptions& opts);

struct IntersectionCertificate {
    SectionProbe probe;
    State left_image, right_image;
    Interval slope_a;
    Interval angle_deg;
    int slope_parts = 0;
    Verdict status;
};

IntersectionCertificate certify_transversal(const SectionProbe& probe, const Chart& chart,
                                            const FiberCertificate& fiber, const FamilyCertificate& family,
                                            const HyperbolicityCertificate& hyp, const ModelParams& params,
                                            const IntegratorOptions& opts, const SlopeOptions& sopt = {});

}  // namespace librate
