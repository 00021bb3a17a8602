#include "librate/linalg.hpp"

#include <cassert>

namespace librate {

IVector IVector::from(const Vector& p) {
    IVector r(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) r[i] = Interval(p(i));
    return r;
}

Vector IVector::mid() const {
    Vector m(size());
    for (std::size_t i = 0; i < size(); ++i) m(i) = v_[i].mid();
    return m;
}

double IVector::max_rad() const {
    double r = 0;
    for (const auto& x : v_) r = std::max(r, x.rad());
    return r;
}

double IVector::max_width() const {
    double r = 0;
    for (const auto& x : v_) r = std::max(r, x.width());
    return r;
}

bool IVector::subset_of(const IVector& o) const {
    if (o.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (!v_[i].subset_of(o[i])) return false;
    return true;
}

bool IVector::interior_of(const IVector& o) const {
    if (o.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (!v_[i].interior_of(o[i])) return false;
    return true;
}

bool IVector::overlaps(const IVector& o) const {
    if (o.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (!v_[i].overlaps(o[i])) return false;
    return true;
}

bool IVector::contains(const Vector& p) const {
    if (static_cast<std::size_t>(p.size()) != size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (!v_[i].contains(p(i))) return false;
    return true;
}

IVector operator+(const IVector& a, const IVector& b) {
    assert(a.size() == b.size());
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

IVector operator-(const IVector& a, const IVector& b) {
    assert(a.size() == b.size());
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

IVector operator-(const IVector& a) {
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

IVector operator*(const Interval& s, const IVector& a) {
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

IVector hull(const IVector& a, const IVector& b) {
    assert(a.size() == b.size());
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
    return r;
}

double norm2_upper(const IVector& a) {
    Interval s(0.0);
    for (const auto& x : a) s += sqr(Interval(x.mag()));
    return sqrt(s).hi();
}

IVector centered(const IVector& a) {
    IVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - Interval(a[i].mid());
    return r;
}

IMatrix::IMatrix(std::initializer_list<std::initializer_list<Interval>> rows) {
    r_ = rows.size();
    c_ = r_ ? rows.begin()->size() : 0;
    d_.reserve(r_ * c_);
    for (const auto& row : rows) {
        if (row.size() != c_) throw Error(ErrorCode::InvalidArgument, "ragged matrix literal");
        for (const auto& x : row) d_.push_back(x);
    }
}

IMatrix IMatrix::identity(std::size_t n) {
    IMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Interval(1.0);
    return m;
}

IMatrix IMatrix::from(const Matrix& m) {
    IMatrix r(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = Interval(m(i, j));
    return r;
}

Matrix IMatrix::mid() const {
    Matrix m(r_, c_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < c_; ++j) m(i, j) = (*this)(i, j).mid();
    return m;
}

Matrix IMatrix::mag() const {
    Matrix m(r_, c_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < c_; ++j) m(i, j) = (*this)(i, j).mag();
    return m;
}

double IMatrix::max_rad() const {
    double r = 0;
    for (const auto& x : d_) r = std::max(r, x.rad());
    return r;
}

IMatrix IMatrix::transpose() const {
    IMatrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IVector IMatrix::col(std::size_t j) const {
    IVector v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
}

IVector IMatrix::row(std::size_t i) const {
    IVector v(c_);
    for (std::size_t j = 0; j < c_; ++j) v[j] = (*this)(i, j);
    return v;
}

void IMatrix::set_col(std::size_t j, const IVector& v) {
    for (std::size_t i = 0; i < r_; ++i) (*this)(i, j) = v[i];
}

bool IMatrix::subset_of(const IMatrix& o) const {
    if (o.r_ != r_ || o.c_ != c_) return false;
    for (std::size_t k = 0; k < d_.size(); ++k)
        if (!d_[k].subset_of(o.d_[k])) return false;
    return true;
}

bool IMatrix::overlaps(const IMatrix& o) const {
    if (o.r_ != r_ || o.c_ != c_) return false;
    for (std::size_t k = 0; k < d_.size(); ++k)
        if (!d_[k].overlaps(o.d_[k])) return false;
    return true;
}

IMatrix operator+(const IMatrix& a, const IMatrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    IMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

IMatrix operator-(const IMatrix& a, const IMatrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    IMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

IMatrix operator*(const IMatrix& a, const IMatrix& b) {
    assert(a.cols() == b.rows());
    IMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Interval s(0.0);
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

IMatrix operator*(const IMatrix& a, const Matrix& b) {
    assert(a.cols() == static_cast<std::size_t>(b.rows()));
    IMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            Interval s(0.0);
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * Interval(b(k, j));
            r(i, j) = s;
        }
    return r;
}

IMatrix operator*(const Matrix& a, const IMatrix& b) {
    assert(static_cast<std::size_t>(a.cols()) == b.rows());
    IMatrix r(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            Interval s(0.0);
            for (std::size_t k = 0; k < b.rows(); ++k) s += Interval(a(i, k)) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

IMatrix operator*(const Interval& s, const IMatrix& a) {
    IMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
    return r;
}

IVector operator*(const IMatrix& a, const IVector& v) {
    assert(a.cols() == v.size());
    IVector r(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Interval s(0.0);
        for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * v[k];
        r[i] = s;
    }
    return r;
}

IVector operator*(const Matrix& a, const IVector& v) {
    assert(static_cast<std::size_t>(a.cols()) == v.size());
    IVector r(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        Interval s(0.0);
        for (std::size_t k = 0; k < v.size(); ++k) s += Interval(a(i, k)) * v[k];
        r[i] = s;
    }
    return r;
}

IMatrix hull(const IMatrix& a, const IMatrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    IMatrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = hull(a(i, j), b(i, j));
    return r;
}

IMatrix mul_exact(const Matrix& a, const Matrix& b) { return IMatrix::from(a) * b; }

IVector mul_exact(const Matrix& a, const Vector& v) { return a * IVector::from(v); }

namespace {

// Gaussian elimination with partial pivoting on mignitude; A is n x n, B is n x k, both modified.
void eliminate(IMatrix& A, IMatrix& B) {
    const std::size_t n = A.rows();
    const std::size_t k = B.cols();
    for (std::size_t p = 0; p < n; ++p) {
        std::size_t best = p;
        double best_mig = A(p, p).mig();
        for (std::size_t i = p + 1; i < n; ++i) {
            if (A(i, p).mig() > best_mig) {
                best_mig = A(i, p).mig();
                best = i;
            }
        }
        if (best_mig <= 0.0) throw Error(ErrorCode::SingularEnclosure, "pivot interval contains zero");
        if (best != p) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A(p, j), A(best, j));
            for (std::size_t j = 0; j < k; ++j) std::swap(B(p, j), B(best, j));
        }
        const Interval piv = A(p, p);
        for (std::size_t i = p + 1; i < n; ++i) {
            if (A(i, p) == Interval(0.0)) continue;
            Interval m = A(i, p) / piv;
            A(i, p) = Interval(0.0);
            for (std::size_t j = p + 1; j < n; ++j) A(i, j) -= m * A(p, j);
            for (std::size_t j = 0; j < k; ++j) B(i, j) -= m * B(p, j);
        }
    }
    for (std::size_t jj = 0; jj < k; ++jj) {
        for (std::size_t ii = n; ii-- > 0;) {
            Interval s = B(ii, jj);
            for (std::size_t j = ii + 1; j < n; ++j) s -= A(ii, j) * B(j, jj);
            B(ii, jj) = s / A(ii, ii);
        }
    }
}

Matrix approx_inverse(const Matrix& m) {
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularEnclosure, "midpoint matrix is singular");
    return lu.inverse();
}

}  // namespace

IMatrix solve_linear(const IMatrix& A, const IMatrix& B) {
    if (A.rows() != A.cols() || A.rows() != B.rows())
        throw Error(ErrorCode::InvalidArgument, "solve_linear dimension mismatch");
    const std::size_t n = A.rows();
    if (n == 1) {
        IMatrix r(1, B.cols());
        if (A(0, 0).contains_zero()) throw Error(ErrorCode::SingularEnclosure, "scalar contains zero");
        for (std::size_t j = 0; j < B.cols(); ++j) r(0, j) = B(0, j) / A(0, 0);
        return r;
    }
    Matrix R = approx_inverse(A.mid());
    IMatrix PA = R * A;
    IMatrix PB = R * B;
    eliminate(PA, PB);
    return PB;
}

IVector solve_linear(const IMatrix& A, const IVector& b) {
    IMatrix B(b.size(), 1);
    B.set_col(0, b);
    return solve_linear(A, B).col(0);
}

IMatrix inverse_enclosure(const Matrix& M) {
    const auto n = static_cast<std::size_t>(M.rows());
    Matrix X = approx_inverse(M);
    IMatrix E = IMatrix::identity(n) - mul_exact(X, M);
    // row-sum norms, rounded upward
    Interval delta(0.0), xnorm(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Interval se(0.0), sx(0.0);
        for (std::size_t j = 0; j < n; ++j) {
            se += Interval(E(i, j).mag());
            sx += Interval(std::fabs(X(i, j)));
        }
        delta = Interval(std::max(delta.hi(), se.hi()));
        xnorm = Interval(std::max(xnorm.hi(), sx.hi()));
    }
    if (!(delta.hi() < 1.0)) throw Error(ErrorCode::SingularEnclosure, "inverse refinement does not contract");
    // M^-1 = X + E X + sum_{k>=2} E^k X
    Interval tail = sqr(delta) * xnorm / (Interval(1.0) - delta);
    IMatrix R = IMatrix::from(X) + E * X;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) R(i, j) += Interval::sym(tail.hi());
    return R;
}

IMatrix inverse_enclosure(const IMatrix& M) {
    return solve_linear(M, IMatrix::identity(M.rows()));
}

Interval det(const IMatrix& M) {
    if (M.rows() != M.cols()) throw Error(ErrorCode::InvalidArgument, "det of non-square matrix");
    const std::size_t n = M.rows();
    if (n == 1) return M(0, 0);
    if (n == 2) return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    // cofactor expansion along the first row
    Interval s(0.0);
    for (std::size_t j = 0; j < n; ++j) {
        IMatrix minor(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t c = 0, cc = 0; c < n; ++c)
                if (c != j) minor(i - 1, cc++) = M(i, c);
        Interval t = M(0, j) * det(minor);
        s = (j % 2 == 0) ? s + t : s - t;
    }
    return s;
}

NewtonOutcome interval_newton(const IVector& f_at_point, const IMatrix& Df_on_box, const IVector& X,
                              const Vector& x0) {
    NewtonOutcome out;
    out.refined = X;
    try {
        IVector step = solve_linear(Df_on_box, f_at_point);
        out.refined = IVector::from(x0) - step;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SingularEnclosure || e.code() == ErrorCode::DivisionByZeroInterval) return out;
        throw;
    }
    if (out.refined.subset_of(X)) out.status = NewtonStatus::UniqueZeroProven;
    return out;
}

Eig2 eig2_real(const IMatrix& B) {
    if (B.rows() != 2 || B.cols() != 2) throw Error(ErrorCode::InvalidArgument, "eig2_real needs a 2x2 matrix");
    Eig2 r;
    Interval tr = B(0, 0) + B(1, 1);
    Interval dt = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
    Interval disc = sqr(tr) - Interval(4.0) * dt;
    if (!(disc.lo() > 0)) {
        r.lambda1 = Interval::entire();
        r.lambda2 = Interval::entire();
        return r;
    }
    r.verified_real_split = true;
    Interval sq = sqrt(disc);
    Interval plus = (tr + sq) * Interval(0.5);
    Interval minus = (tr - sq) * Interval(0.5);
    if (tr.hi() < 0) std::swap(plus, minus);
    r.lambda1 = plus;
    r.lambda2 = minus;
    if (!plus.contains_zero()) {
        if (auto m = meet(minus, dt / plus)) r.lambda2 = *m;
    }
    return r;
}

Eig2 eig2_real_unimodular(const Interval& trace) {
    Eig2 r;
    Interval disc = sqr(trace) - Interval(4.0);
    if (!(disc.lo() > 0)) {
        r.lambda1 = Interval::entire();
        r.lambda2 = Interval::entire();
        return r;
    }
    r.verified_real_split = true;
    Interval sq = sqrt(disc);
    Interval plus = (trace + sq) * Interval(0.5);
    Interval minus = (trace - sq) * Interval(0.5);
    if (trace.hi() < 0) std::swap(plus, minus);
    r.lambda1 = plus;
    r.lambda2 = minus;
    if (auto m = meet(minus, Interval(1.0) / plus)) r.lambda2 = *m;
    return r;
}

double gershgorin_min_eig(const IMatrix& Bsym) {
    if (Bsym.rows() != Bsym.cols()) throw Error(ErrorCode::InvalidArgument, "gershgorin needs a square matrix");
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < Bsym.rows(); ++i) {
        Interval radius(0.0);
        for (std::size_t j = 0; j < Bsym.cols(); ++j)
            if (j != i) radius += Interval(Bsym(i, j).mag());
        g = std::min(g, (Interval(Bsym(i, i).lo()) - radius).lo());
    }
    return g;
}

}  // namespace librate
