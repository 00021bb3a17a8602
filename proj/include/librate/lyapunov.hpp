#pragma once

#include <vector>

#include "librate/integrator.hpp"
#include "librate/nonrigorous.hpp"

namespace librate {

// I = x0 + [-r, r]; J0, J1 centred at py0; U is the slanted strip
//   {(x, 0, 0, py) : x in I, py = a (x - x0) + iota, iota in J1}.
struct FamilyBox {
    double x0 = 0;
    Interval I;
    double py0 = 0;
    Interval J0, J1;
    double a = 0;

    static FamilyBox make(double x0, double r, double py0, double a, double j0_rad, double j1_rad);
    void validate() const;

    // U0 = {x0} x {0} x {0} x J0 and U as Lohner sets in the 4-dimensional phase space
    LohnerSet U0_set() const;
    LohnerSet U_set() const;
    State U_hull() const;
};

struct FamilyCertificate {
    FamilyBox box;
    Interval newton_set;    // N, must lie in J0
    Interval kappa_slope;   // [alpha]
    Interval kappa_slope_left, kappa_slope_right;  // on I left / right of x0
    Interval dH_dx;         // d/dx H(q(x)) on I
    Interval half_time;     // half-turn time on U
    Interval px_image_U0;   // px of the half-turn image of U0
    Interval energy_left;   // H on U restricted to x = lower end of I
    Interval energy_right;
    Verdict status;
    std::size_t index = 0;
};

struct HyperbolicityCertificate {
    IMatrix A_row;  // 1 x 2
    IMatrix B_mat;  // 2 x 2
    Interval lambda1, lambda2;
    Interval return_time;
    Verdict status;
    std::size_t index = 0;
};

FamilyCertificate verify_family_box(const FamilyBox& box, const ModelParams& params, const IntegratorOptions& opts);

// dH/dx along the family on I from the slope enclosure; fills cert.dH_dx as well.
Interval energy_foliation(FamilyCertificate& cert, const ModelParams& params);

HyperbolicityCertificate verify_hyperbolicity(const FamilyCertificate& cert, const ModelParams& params,
                                              const IntegratorOptions& opts);
// B from the second-return derivative on U and the energy gradient; exposed for tests.
HyperbolicityCertificate hyperbolicity_from_dP(const IMatrix& dP, const IVector& gradH);

struct FamilySeed {
    double x = 0, py = 0, a = 0;
};

// Non-rigorous shooting along the family, continuing py with the slope.
std::vector<FamilySeed> generate_seeds(const std::vector<double>& xs, double py_guess, const ModelParams& params);

struct ContinuationOptions {
    double r = 1.1007716e-6;  // half width of each I_i
    double j0_rad = 1e-13;
    double j1_rad = 5e-8;
    double min_overlap = 0.01;  // fraction of r
    unsigned threads = 1;
};

struct ContinuationResult {
    std::vector<FamilyCertificate> certs;
    double tube_radius = 0;  // distance from kappa to the polyline through the seeds (upper bound)
    bool all_verified = false;
};

// Throws ChainGap if consecutive I_i do not overlap by min_overlap * r.
ContinuationResult continue_family(const std::vector<FamilySeed>& seeds, const ContinuationOptions& copt,
                                   const ModelParams& params, const IntegratorOptions& opts);

}  // namespace librate
