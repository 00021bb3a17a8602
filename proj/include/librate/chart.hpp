#pragma once

#include <array>
#include <optional>
#include <vector>

#include "librate/cones.hpp"
#include "librate/integrator.hpp"
#include "librate/lyapunov.hpp"

namespace librate {

// Coefficients c[0] + c[1] s + ... in increasing degree.
using Poly = std::vector<double>;

Interval poly_eval(const Poly& p, const Interval& s);
double poly_eval(const Poly& p, double s);
Poly poly_derivative(const Poly& p);

// Local coordinates v = (x, y1, y2, y3) near q0:  q = q0 + C psi(v).
struct Chart {
    Vector q0;
    Matrix C;
    IMatrix C_inv;
    std::array<Poly, 4> K;
    double lambda = 0;
    Interval T;  // return time enclosure

    void validate() const;
    int degree() const;
    double sigma() const { return K[0].size() > 1 ? K[0][1] : 0.0; }
};

// The literal chart data used for the fiber and transversality computations;
// lambda and T come from a hyperbolicity run.
Chart reference_chart(double lambda, const Interval& T);

// Non-rigorous: C from the eigen-decomposition of DPhi over one period at the box
// centre, K solving the conjugacy equation order by order with K'(0) = (sigma, 0, 0, 0).
Chart fit_chart(const FamilyCertificate& family, const ModelParams& params, int degree = 4, double sigma = 0.1);

// |Phi~(K(s)) - K(lambda s)| at a point, computed non-rigorously.
double conjugacy_residual(const Chart& chart, double s, const ModelParams& params);

IVector psi_eval(const Chart& chart, const IVector& v);
Vector psi_eval(const Chart& chart, const Vector& v);
IMatrix psi_jacobian(const Chart& chart, const IVector& box);
Matrix psi_jacobian(const Chart& chart, const Vector& v);
// q0 + C psi(v) over a box
IVector chart_to_phase(const Chart& chart, const IVector& v);
// Affine Lohner representation of q0 + C psi(box) (mean value form).
LohnerSet chart_set(const Chart& chart, const IVector& box);

// Enclosure of the fixed points psi^-1(C^-1(q(x) - q0)), x in I.
IVector enclose_B0(const Chart& chart, const FamilyCertificate& family);

struct LocalImage {
    IVector U2;     // F(U1) lies in lambda(U2)
    IVector image;  // lambda(U2)
    IMatrix DPhi;   // DPhi_T over q0 + C psi(U1)
    int inflations = 0;
};

// Without a candidate, U2 is grown from the image of the midpoint (x2, at most 5 times).
LocalImage F_image(const Chart& chart, const IVector& U1, const std::optional<IVector>& U2_candidate,
                   const Integrator& integ);

IMatrix DF_enclose(const Chart& chart, const IVector& Bi, const IVector& F_of_Bi, const IMatrix& DPhi);
IMatrix DF_enclose(const Chart& chart, const IVector& Bi, const IVector& F_of_Bi, const ModelParams& params,
                   const IntegratorOptions& opts);

// B = union over v in B0 of the cone at v, cut to x in [x_lo, x_hi], split into N slabs along x.
struct LocalBox {
    IVector B0;
    double x_lo = 0, x_hi = 0;
    int N = 1;
    double alpha = 0;

    void validate() const;
    IVector slab(int i) const;
    // bound on the central coordinates of B for x in [x_lo, x]
    IVector central_at(double x) const;
};

struct FiberOptions {
    double alpha = 2.56e-6;
    double x_lo = -1e-11;
    double x_hi = 5e-7;
    int N = 150;
    double m = 2.0;
    unsigned threads = 1;
};

struct FiberCertificate {
    LocalBox box;
    IMatrix DF;  // hull over all slabs
    std::vector<IVector> images;  // lambda(U2) per slab
    ConeCertificate cone;
    Verdict status;
};

FiberCertificate enclose_fibers(const Chart& chart, const IVector& B0, const FiberOptions& fopt,
                                const ModelParams& params, const IntegratorOptions& opts);

}  // namespace librate
