#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "librate/interval.hpp"

namespace librate {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class IVector {
public:
    IVector() = default;
    explicit IVector(std::size_t n, Interval v = Interval(0.0)) : v_(n, v) {}
    IVector(std::initializer_list<Interval> l) : v_(l) {}
    static IVector from(const Vector& p);

    std::size_t size() const noexcept { return v_.size(); }
    Interval& operator[](std::size_t i) { return v_[i]; }
    const Interval& operator[](std::size_t i) const { return v_[i]; }
    auto begin() noexcept { return v_.begin(); }
    auto end() noexcept { return v_.end(); }
    auto begin() const noexcept { return v_.begin(); }
    auto end() const noexcept { return v_.end(); }

    Vector mid() const;
    double max_rad() const;
    double max_width() const;
    bool subset_of(const IVector& o) const;
    bool interior_of(const IVector& o) const;
    bool overlaps(const IVector& o) const;
    bool contains(const Vector& p) const;

    friend bool operator==(const IVector& a, const IVector& b) { return a.v_ == b.v_; }

private:
    std::vector<Interval> v_;
};

IVector operator+(const IVector& a, const IVector& b);
IVector operator-(const IVector& a, const IVector& b);
IVector operator-(const IVector& a);
IVector operator*(const Interval& s, const IVector& a);
IVector hull(const IVector& a, const IVector& b);
// enclosure of the Euclidean norm bound sup ||v||
double norm2_upper(const IVector& a);
// box minus its midpoint
IVector centered(const IVector& a);

class IMatrix {
public:
    IMatrix() = default;
    IMatrix(std::size_t rows, std::size_t cols, Interval v = Interval(0.0)) : r_(rows), c_(cols), d_(rows * cols, v) {}
    IMatrix(std::initializer_list<std::initializer_list<Interval>> rows);
    static IMatrix identity(std::size_t n);
    static IMatrix from(const Matrix& m);

    std::size_t rows() const noexcept { return r_; }
    std::size_t cols() const noexcept { return c_; }
    Interval& operator()(std::size_t i, std::size_t j) { return d_[i * c_ + j]; }
    const Interval& operator()(std::size_t i, std::size_t j) const { return d_[i * c_ + j]; }

    Matrix mid() const;
    Matrix mag() const;
    double max_rad() const;
    IMatrix transpose() const;
    IVector col(std::size_t j) const;
    IVector row(std::size_t i) const;
    void set_col(std::size_t j, const IVector& v);
    bool subset_of(const IMatrix& o) const;
    bool overlaps(const IMatrix& o) const;

    friend bool operator==(const IMatrix& a, const IMatrix& b) {
        return a.r_ == b.r_ && a.c_ == b.c_ && a.d_ == b.d_;
    }

private:
    std::size_t r_ = 0, c_ = 0;
    std::vector<Interval> d_;
};

IMatrix operator+(const IMatrix& a, const IMatrix& b);
IMatrix operator-(const IMatrix& a, const IMatrix& b);
IMatrix operator*(const IMatrix& a, const IMatrix& b);
IMatrix operator*(const IMatrix& a, const Matrix& b);
IMatrix operator*(const Matrix& a, const IMatrix& b);
IMatrix operator*(const Interval& s, const IMatrix& a);
IVector operator*(const IMatrix& a, const IVector& v);
IVector operator*(const Matrix& a, const IVector& v);
IMatrix hull(const IMatrix& a, const IMatrix& b);
// rigorous product of two point matrices
IMatrix mul_exact(const Matrix& a, const Matrix& b);
IVector mul_exact(const Matrix& a, const Vector& v);

// Enclosure of {A^-1 b : A in A, b in b}; throws SingularEnclosure.
IVector solve_linear(const IMatrix& A, const IVector& b);
// Columnwise version, sharing one elimination.
IMatrix solve_linear(const IMatrix& A, const IMatrix& B);
// Enclosure of the inverse of a point matrix; throws SingularEnclosure.
IMatrix inverse_enclosure(const Matrix& M);
IMatrix inverse_enclosure(const IMatrix& M);
Interval det(const IMatrix& M);

enum class NewtonStatus { UniqueZeroProven, Inconclusive };

struct NewtonOutcome {
    NewtonStatus status = NewtonStatus::Inconclusive;
    IVector refined;
};

NewtonOutcome interval_newton(const IVector& f_at_point, const IMatrix& Df_on_box, const IVector& X, const Vector& x0);

struct Eig2 {
    Interval lambda1;  // larger modulus
    Interval lambda2;
    bool verified_real_split = false;
};

// Interval quadratic formula for a generic 2x2 interval matrix.
Eig2 eig2_real(const IMatrix& B);
// Same for a map known to have unit determinant; only the trace enters.
Eig2 eig2_real_unimodular(const Interval& trace);

// Lower bound g with spec(B) >= g for every symmetric B in Bsym.
double gershgorin_min_eig(const IMatrix& Bsym);

}  // namespace librate
