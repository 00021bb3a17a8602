#pragma once

#include "librate/linalg.hpp"

namespace librate {

// Q(x, y) = alpha x^2 - |y|^2 with one unstable coordinate x and dim_c central ones.
struct ConeForm {
    double alpha = 0;
    int dim_c = 3;

    void validate() const;
    Matrix C_Q() const;
    double Q(const Vector& v) const;
};

struct ConeCheck {
    bool pass = false;
    double margin = 0;  // lower bound of (lhs - rhs); positive iff pass
    double epsilon = 0;  // bound on the norm of the off-diagonal block
    double M = 0;        // spectral bound, Q-increase check only
};

struct ConeCertificate {
    double alpha = 0;
    double m = 0;
    ConeCheck cc1;  // Q increase
    ConeCheck cc2;  // expansion
    double lipschitz = 0;  // sqrt(alpha)
    Verdict status;
};

// ||A v|| > m ||v|| on the cone, via (a11 - eps sqrt(alpha)) / sqrt(1 + alpha) > m.
ConeCheck check_expansion(const IMatrix& A, const ConeForm& cone, double m);
// Q(A v) > 0 on the cone, via d11 - 2 eps > M alpha for D = A^T C_Q A.
ConeCheck check_Q_increase(const IMatrix& A, const ConeForm& cone);
// Rejects m <= 1 and non-positive alpha with InvalidArgument.
ConeCertificate certify_unstable_disc(const IMatrix& DF, const ConeForm& cone, double m);

}  // namespace librate
