#include "librate/cones.hpp"

#include <cmath>

namespace librate {

void ConeForm::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "cone opening must be >= 0");
    if (dim_c < 1) throw Error(ErrorCode::InvalidArgument, "cone needs at least one central coordinate");
}

Matrix ConeForm::C_Q() const {
    Matrix c = -Matrix::Identity(dim_c + 1, dim_c + 1);
    c(0, 0) = alpha;
    return c;
}

double ConeForm::Q(const Vector& v) const { return alpha * v(0) * v(0) - v.tail(v.size() - 1).squaredNorm(); }

namespace {

void check_shape(const IMatrix& A, const ConeForm& cone) {
    cone.validate();
    const std::size_t n = static_cast<std::size_t>(cone.dim_c) + 1;
    if (A.rows() != n || A.cols() != n) throw Error(ErrorCode::BadBlockStructure, "matrix size does not match the cone");
}

// upper bound of the Euclidean norm of the magnitudes of row 0, columns 1..n-1
double tail_norm(const IMatrix& A) {
    Interval s(0.0);
    for (std::size_t j = 1; j < A.cols(); ++j) s += sqr(Interval(A(0, j).mag()));
    return sqrt(s).hi();
}

}  // namespace

ConeCheck check_expansion(const IMatrix& A, const ConeForm& cone, double m) {
    check_shape(A, cone);
    ConeCheck c;
    c.epsilon = tail_norm(A);
    const Interval a11(A(0, 0).lo());
    if (!(a11.lo() > 0)) throw Error(ErrorCode::BadBlockStructure, "a11 must be positive");
    const Interval al(cone.alpha);
    Interval lhs = (a11 - Interval(c.epsilon) * sqrt(al)) / sqrt(Interval(1.0) + al);
    c.margin = (lhs - Interval(m)).lo();
    c.pass = c.margin > 0;
    return c;
}

ConeCheck check_Q_increase(const IMatrix& A, const ConeForm& cone) {
    check_shape(A, cone);
    const std::size_t n = A.rows();
    const Interval al(cone.alpha);
    // D = alpha a0^T a0 - sum_{i>0} a_i^T a_i, symmetric by construction
    IMatrix D(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n; ++k) {
            Interval s = al * A(0, j) * A(0, k);
            for (std::size_t i = 1; i < n; ++i) s -= A(i, j) * A(i, k);
            D(j, k) = s;
            D(k, j) = s;
        }
    ConeCheck c;
    c.epsilon = tail_norm(D);
    IMatrix Bl(n - 1, n - 1);
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t k = 1; k < n; ++k) Bl(j - 1, k - 1) = D(j, k);
    // strict spectral bound: any M > -g works, M > 0 required
    c.M = rnd::next_up(std::max(-gershgorin_min_eig(Bl), 0.0));
    // the cross term is bounded with |y| <= sqrt(alpha)|x|, which needs the factor max(1, sqrt(alpha))
    const Interval cross = Interval(2.0 * c.epsilon) * Interval(std::max(1.0, sqrt(al).hi()));
    c.margin = (Interval(D(0, 0).lo()) - cross - Interval(c.M) * al).lo();
    c.pass = D(0, 0).lo() > 0 && c.margin > 0;
    return c;
}

ConeCertificate certify_unstable_disc(const IMatrix& DF, const ConeForm& cone, double m) {
    if (!(m > 1.0)) throw Error(ErrorCode::InvalidArgument, "expansion constant m must exceed 1");
    if (!(cone.alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "cone opening must be positive");
    ConeCertificate cert;
    cert.alpha = cone.alpha;
    cert.m = m;
    cert.lipschitz = std::sqrt(cone.alpha);
    try {
        cert.cc1 = check_Q_increase(DF, cone);
        cert.cc2 = check_expansion(DF, cone, m);
    } catch (const Error& e) {
        cert.status = Verdict::from(e);
        return cert;
    }
    if (!cert.cc1.pass)
        cert.status = Verdict::fail(ErrorCode::InclusionFailed, "Q increase not certified");
    else if (!cert.cc2.pass)
        cert.status = Verdict::fail(ErrorCode::InclusionFailed, "expansion by m not certified");
    else
        cert.status = Verdict::ok();
    return cert;
}

}  // namespace librate
