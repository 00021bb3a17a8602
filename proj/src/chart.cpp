#include "librate/chart.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "librate/nonrigorous.hpp"
#include "librate/parallel.hpp"

namespace librate {

Interval poly_eval(const Poly& p, const Interval& s) {
    Interval r(0.0);
    for (std::size_t k = p.size(); k-- > 0;) r = r * s + Interval(p[k]);
    return r;
}

double poly_eval(const Poly& p, double s) {
    double r = 0;
    for (std::size_t k = p.size(); k-- > 0;) r = r * s + p[k];
    return r;
}

Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return Poly{0.0};
    Poly d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<double>(k);
    return d;
}

void Chart::validate() const {
    if (q0.size() != 4 || C.rows() != 4 || C.cols() != 4 || C_inv.rows() != 4)
        throw Error(ErrorCode::InvalidArgument, "chart dimensions");
    for (int i = 0; i < 4; ++i)
        if (K[i].empty()) throw Error(ErrorCode::InvalidArgument, "empty chart polynomial");
    if (K[0][0] != 0.0) throw Error(ErrorCode::InvalidArgument, "K0 must vanish at 0");
    for (int i = 1; i < 4; ++i)
        for (std::size_t k = 0; k < std::min<std::size_t>(2, K[i].size()); ++k)
            if (K[i][k] != 0.0) throw Error(ErrorCode::InvalidArgument, "K1..K3 must start at degree 2");
    if (!(lambda > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
    if (!(T.lo() > 0.0)) throw Error(ErrorCode::InvalidArgument, "return time must be positive");
    IMatrix prod = IMatrix::from(C) * C_inv;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (!prod(i, j).contains(i == j ? 1.0 : 0.0))
                throw Error(ErrorCode::SingularEnclosure, "C_inv does not enclose the inverse of C");
}

int Chart::degree() const {
    std::size_t d = 0;
    for (const auto& k : K) d = std::max(d, k.size());
    return static_cast<int>(d) - 1;
}

Chart reference_chart(double lambda, const Interval& T) {
    Chart c;
    c.q0 = Vector(4);
    c.q0 << -0.9510055339445208, 0.0, 0.0, -0.8368041796469730;
    c.C = Matrix(4, 4);
    c.C << 0.197841, -0.197841, 0, 0.221884,
           -0.221884, -0.221884, 0.773671, 0,
           1, 1, -1, 0,
           -0.255717, 0.255717, 0, -1;
    c.C_inv = inverse_enclosure(c.C);
    c.K[0] = {0.0, 0.1, -0.0621591, 0.0375888, -0.0200645};
    c.K[1] = {0.0, 0.0, 0.000533561, -0.00723085, 0.00827176};
    c.K[2] = {0.0, 0.0, -0.0151949, 0.009304476, -0.00427633};
    c.K[3] = {0.0, 0.0, 0.0269670, -0.0275820, 0.0203022};
    c.lambda = lambda;
    c.T = T;
    return c;
}

namespace {

Vector phi_tilde(const Chart& c, const NonrigorousIntegrator& nr, double tau, const Vector& v) {
    Matrix Cinv = c.C_inv.mid();
    return Cinv * (nr.flow(c.q0 + c.C * v, tau) - c.q0);
}

Vector K_at(const Chart& c, double s) {
    Vector k(4);
    for (int i = 0; i < 4; ++i) k(i) = poly_eval(c.K[i], s);
    return k;
}

}  // namespace

Chart fit_chart(const FamilyCertificate& family, const ModelParams& params, int degree, double sigma) {
    if (!family.status.verified) throw Error(ErrorCode::MissingCertificate, "family box not verified");
    if (degree < 1 || degree > Jet::kMaxDegree) throw Error(ErrorCode::InvalidArgument, "chart degree out of range");
    if (!(sigma > 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");

    const FamilyBox& b = family.box;
    Chart c;
    c.q0 = Vector(4);
    c.q0 << b.x0, 0.0, 0.0, b.py0;

    NonrigorousIntegrator nr(params);
    const double tau = nr.section(c.q0, 2, false).time;
    const Matrix D = nr.flow_var(c.q0, tau).DPhi;

    Eigen::EigenSolver<Matrix> es(D);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigen-decomposition of DPhi failed");
    int iu = 0, is = 0;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(iu))) iu = i;
        if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(is))) is = i;
    }
    const auto lu = es.eigenvalues()(iu), ls = es.eigenvalues()(is);
    if (std::fabs(lu.imag()) > 1e-9 * std::abs(lu) || std::fabs(ls.imag()) > 1e-9 || !(lu.real() > 1.0))
        throw Error(ErrorCode::EigenFailure, "no real saddle pair in DPhi");
    Vector u = es.eigenvectors().col(iu).real();
    Vector s = es.eigenvectors().col(is).real();
    if (u(PX) == 0 || s(PX) == 0) throw Error(ErrorCode::EigenFailure, "saddle eigenvector has no px component");
    u /= u(PX);
    s /= s(PX);

    Vector f = vector_field(c.q0, params);
    if (f(PX) == 0 || b.a == 0) throw Error(ErrorCode::EigenFailure, "degenerate central directions");
    f /= -f(PX);
    Vector w(4);
    w << -1.0 / b.a, 0.0, 0.0, -1.0;

    c.C = Matrix(4, 4);
    c.C << u, s, f, w;
    c.C_inv = inverse_enclosure(c.C);
    c.lambda = lu.real();
    c.T = Interval(tau);

    const Matrix Cinv = c.C_inv.mid();
    const Matrix L = Cinv * D * c.C;
    for (auto& k : c.K) k.assign(degree + 1, 0.0);
    c.K[0][1] = sigma;

    for (int k = 2; k <= degree; ++k) {
        std::array<Jet, 4> z;
        for (int j = 0; j < 4; ++j) {
            z[j] = Jet::constant(k, c.q0(j));
            for (int i = 0; i < 4; ++i)
                for (int p = 1; p < k; ++p) z[j][p] += c.C(j, i) * c.K[i][p];
        }
        std::array<Jet, 4> out = nr.flow_jet(z, tau);
        Vector raw(4);
        for (int j = 0; j < 4; ++j) raw(j) = out[j][k];
        const Vector R = Cinv * raw;
        const double lk = std::pow(c.lambda, k);
        for (int i = 0; i < 4; ++i) {
            const double mu_i = std::abs(es.eigenvalues()(i));
            if (std::fabs(lk - mu_i) < 1e-12 * lk)
                throw Error(ErrorCode::ResonanceDivisionFailure, "lambda^" + std::to_string(k) + " hits an eigenvalue");
        }
        Matrix S = lk * Matrix::Identity(4, 4) - L;
        Eigen::FullPivLU<Matrix> lu_s(S);
        if (!lu_s.isInvertible()) throw Error(ErrorCode::ResonanceDivisionFailure, "singular order-k system");
        Vector Kk = lu_s.solve(R);
        for (int i = 0; i < 4; ++i) c.K[i][k] = Kk(i);
    }
    for (int i = 1; i < 4; ++i) c.K[i][1] = 0.0;
    return c;
}

double conjugacy_residual(const Chart& chart, double s, const ModelParams& params) {
    NonrigorousIntegrator nr(params);
    return (phi_tilde(chart, nr, chart.T.mid(), K_at(chart, s)) - K_at(chart, chart.lambda * s)).norm();
}

IVector psi_eval(const Chart& chart, const IVector& v) {
    const Interval& x = v[0];
    IVector out(4);
    Interval lin(0.0);
    for (int i = 1; i < 4; ++i) lin += v[i] * poly_eval(poly_derivative(chart.K[i]), x);
    out[0] = poly_eval(chart.K[0], x) - lin;
    const Interval dk0 = poly_eval(poly_derivative(chart.K[0]), x);
    for (int i = 1; i < 4; ++i) out[i] = poly_eval(chart.K[i], x) + v[i] * dk0;
    return out;
}

Vector psi_eval(const Chart& chart, const Vector& v) {
    Vector out(4);
    double lin = 0;
    for (int i = 1; i < 4; ++i) lin += v(i) * poly_eval(poly_derivative(chart.K[i]), v(0));
    out(0) = poly_eval(chart.K[0], v(0)) - lin;
    const double dk0 = poly_eval(poly_derivative(chart.K[0]), v(0));
    for (int i = 1; i < 4; ++i) out(i) = poly_eval(chart.K[i], v(0)) + v(i) * dk0;
    return out;
}

IMatrix psi_jacobian(const Chart& chart, const IVector& box) {
    const Interval& x = box[0];
    IMatrix J(4, 4);
    const Interval dk0 = poly_eval(poly_derivative(chart.K[0]), x);
    const Interval ddk0 = poly_eval(poly_derivative(poly_derivative(chart.K[0])), x);
    Interval j00 = dk0;
    for (int i = 1; i < 4; ++i) {
        const Poly d = poly_derivative(chart.K[i]);
        const Interval dki = poly_eval(d, x);
        j00 -= box[i] * poly_eval(poly_derivative(d), x);
        J(0, i) = -dki;
        J(i, 0) = dki + box[i] * ddk0;
        J(i, i) = dk0;
    }
    J(0, 0) = j00;
    return J;
}

Matrix psi_jacobian(const Chart& chart, const Vector& v) {
    IVector b(4);
    for (int i = 0; i < 4; ++i) b[i] = Interval(v(i));
    return psi_jacobian(chart, b).mid();
}

IVector chart_to_phase(const Chart& chart, const IVector& v) {
    return IVector::from(chart.q0) + chart.C * psi_eval(chart, v);
}

LohnerSet chart_set(const Chart& chart, const IVector& box) {
    const Vector vc = box.mid();
    const IVector pc = IVector::from(vc);
    const IVector r0 = box - pc;
    const Matrix Dc = psi_jacobian(chart, vc);
    // psi(box) - psi(vc) - Dc (box - vc) lies in (Dpsi(box) - Dc)(box - vc)
    const IVector extra = chart.C * ((psi_jacobian(chart, box) - IMatrix::from(Dc)) * r0);
    const IMatrix CD = mul_exact(chart.C, Dc);
    // the float product C Dc is the frame; its rounding error goes into the remainder
    const Matrix frame = CD.mid();
    const IVector frame_err = (CD - IMatrix::from(frame)) * r0;
    return LohnerSet::from_affine(chart_to_phase(chart, pc), frame, r0, extra + frame_err);
}

IVector enclose_B0(const Chart& chart, const FamilyCertificate& family) {
    chart.validate();
    const FamilyBox& fb = family.box;
    if (!family.status.verified) throw Error(ErrorCode::MissingCertificate, "family box not verified");
    if (fb.x0 != chart.q0(X) || fb.py0 != chart.q0(PY) || chart.q0(Y) != 0 || chart.q0(PX) != 0)
        throw Error(ErrorCode::InvalidArgument, "chart centre differs from the family box centre");

    Matrix A = Matrix::Identity(4, 4);
    A(PY, X) = fb.a;
    Matrix Ainv = Matrix::Identity(4, 4);
    Ainv(PY, X) = -fb.a;
    const IVector q{fb.I - Interval(fb.x0), Interval(0.0), Interval(0.0), fb.J1 - Interval(fb.py0)};

    const Matrix R = (psi_jacobian(chart, Vector(Vector::Zero(4))).inverse() * chart.C_inv.mid() * A);
    const IMatrix AinvC = mul_exact(Ainv, chart.C);

    double scale = 0;
    for (const auto& qi : q) scale = std::max(scale, qi.mag());
    IVector Bx(4);
    for (int i = 0; i < 4; ++i) Bx[i] = Interval::sym(1.1 * q[i].mag() + 1e-3 * scale + 1e-300);

    for (int attempt = 0; attempt < 8; ++attempt) {
        const IMatrix Dg = AinvC * psi_jacobian(chart, R * Bx) * R;
        const IVector M = solve_linear(Dg, q);
        if (M.subset_of(Bx)) return R * M;
        IVector grown = hull(Bx, M);
        for (auto& g : grown) g = inflate(g, 0.0, 0.5);
        Bx = grown;
    }
    throw Error(ErrorCode::InclusionFailed, "Newton preimage operator not inside the candidate box");
}

namespace {

IVector apply_lambda(double lambda, const IVector& v) {
    IVector out = v;
    out[0] = Interval(lambda) * v[0];
    return out;
}

// v2 with C psi(lambda v2) + q0 = target, plain Newton on psi.
Vector preimage_guess(const Chart& c, const Vector& target) {
    const Matrix Cinv = c.C_inv.mid();
    const Vector rhs = Cinv * (target - c.q0);
    Vector w = rhs / c.sigma();
    for (int it = 0; it < 30; ++it) {
        Vector dw = psi_jacobian(c, w).lu().solve(psi_eval(c, w) - rhs);
        w -= dw;
        if (dw.norm() <= 1e-16 * (1 + w.norm())) break;
    }
    w(0) /= c.lambda;
    return w;
}

}  // namespace

LocalImage F_image(const Chart& chart, const IVector& U1, const std::optional<IVector>& U2_candidate,
                   const Integrator& integ) {
    if (U1.size() != 4) throw Error(ErrorCode::InvalidArgument, "U1 must be 4-dimensional");
    const Vector v1 = U1.mid();
    const IVector pv1 = IVector::from(v1);
    const IVector Bc = U1 - pv1;

    const FlowEnclosure centre = integ.flow(LohnerSet::from_box(chart_to_phase(chart, pv1)), chart.T);
    const FlowEnclosure set = integ.flow(chart_set(chart, U1), chart.T);

    LocalImage out;
    out.DPhi = set.deriv_out;
    const IMatrix dG1 = (out.DPhi * chart.C) * psi_jacobian(chart, U1);

    const Vector v0 = preimage_guess(chart, centre.state_out.mid());
    const IVector pv0 = IVector::from(v0);
    const IVector g = centre.state_out - chart_to_phase(chart, apply_lambda(chart.lambda, pv0));
    IMatrix Dl = IMatrix::identity(4);
    Dl(0, 0) = Interval(chart.lambda);

    // N = v0 + X^-1 G(T, v1, v0) + (X^-1 dG/dv1) B  with  X = C Dpsi(lambda U2) Dlambda
    auto newton = [&](const IVector& U2) {
        const IMatrix Xm = (IMatrix::from(chart.C) * psi_jacobian(chart, apply_lambda(chart.lambda, U2))) * Dl;
        return pv0 + solve_linear(Xm, g) + solve_linear(Xm, dG1) * Bc;
    };

    if (U2_candidate) {
        const IVector N = newton(*U2_candidate);
        if (!N.subset_of(*U2_candidate)) throw Error(ErrorCode::InclusionFailed, "N not inside the candidate U2");
        out.U2 = N;
        out.image = apply_lambda(chart.lambda, N);
        return out;
    }

    IVector U2 = hull(newton(pv0), pv0);
    for (int k = 0; k <= 5; ++k) {
        IVector grown(4);
        for (int i = 0; i < 4; ++i) {
            const double r = U2[i].rad();
            grown[i] = Interval(U2[i].mid()) + Interval::sym(2.0 * r + 1e-300);
        }
        const IVector N = newton(grown);
        if (N.subset_of(grown)) {
            out.U2 = N;
            out.image = apply_lambda(chart.lambda, N);
            out.inflations = k;
            return out;
        }
        U2 = hull(grown, N);
    }
    throw Error(ErrorCode::InclusionFailed, "no U2 found after 5 inflations");
}

IMatrix DF_enclose(const Chart& chart, const IVector& Bi, const IVector& F_of_Bi, const IMatrix& DPhi) {
    const IMatrix inner = chart.C_inv * ((DPhi * chart.C) * psi_jacobian(chart, Bi));
    return solve_linear(psi_jacobian(chart, F_of_Bi), inner);
}

IMatrix DF_enclose(const Chart& chart, const IVector& Bi, const IVector& F_of_Bi, const ModelParams& params,
                   const IntegratorOptions& opts) {
    Integrator integ(params, opts);
    return DF_enclose(chart, Bi, F_of_Bi, integ.flow(chart_set(chart, Bi), chart.T).deriv_out);
}

void LocalBox::validate() const {
    if (B0.size() != 4) throw Error(ErrorCode::InvalidArgument, "B0 must be 4-dimensional");
    for (const auto& b : B0)
        if (!b.contains_zero()) throw Error(ErrorCode::InvalidArgument, "B0 must contain 0");
    if (!(x_lo < x_hi)) throw Error(ErrorCode::InvalidArgument, "x_lo must be below x_hi");
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
    if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
}

IVector LocalBox::central_at(double x) const {
    // |y - y0| <= sqrt(alpha) |x - x0| for the cone at v = (x0, y0) in B0
    const double reach = std::max(rnd::sub_up(x, B0[0].lo()), rnd::sub_up(B0[0].hi(), x_lo));
    const double r = rnd::mul_up(sqrt(Interval(alpha)).hi(), std::max(reach, 0.0));
    IVector c(3);
    for (int i = 0; i < 3; ++i) c[i] = B0[i + 1] + Interval::sym(r);
    return c;
}

IVector LocalBox::slab(int i) const {
    if (i < 0 || i >= N) throw Error(ErrorCode::InvalidArgument, "slab index out of range");
    const double h = (x_hi - x_lo) / N;
    const double a = i == 0 ? x_lo : x_lo + h * i;
    const double b = i == N - 1 ? x_hi : x_lo + h * (i + 1);
    IVector c = central_at(b);
    return IVector{Interval(a, b), c[0], c[1], c[2]};
}

FiberCertificate enclose_fibers(const Chart& chart, const IVector& B0, const FiberOptions& fopt,
                                const ModelParams& params, const IntegratorOptions& opts) {
    FiberCertificate cert;
    cert.box = LocalBox{B0, fopt.x_lo, fopt.x_hi, fopt.N, fopt.alpha};
    try {
        chart.validate();
        cert.box.validate();
        if (!(fopt.x_lo < B0[0].lo()) || !(fopt.x_hi > B0[0].hi()))
            throw Error(ErrorCode::InvalidArgument, "[x_lo, x_hi] must reach past B0");
        Integrator integ(params, opts);
        std::vector<IMatrix> dfs(fopt.N);
        cert.images.resize(fopt.N);
        parallel_for(fopt.N, fopt.threads, [&](std::size_t i) {
            const IVector Bi = cert.box.slab(static_cast<int>(i));
            LocalImage img = F_image(chart, Bi, std::nullopt, integ);
            dfs[i] = DF_enclose(chart, Bi, img.image, img.DPhi);
            cert.images[i] = img.image;
        });
        cert.DF = dfs[0];
        for (std::size_t i = 1; i < dfs.size(); ++i) cert.DF = hull(cert.DF, dfs[i]);
        cert.cone = certify_unstable_disc(cert.DF, ConeForm{fopt.alpha, 3}, fopt.m);
        cert.status = cert.cone.status;
    } catch (const Error& e) {
        cert.status = Verdict::from(e);
    }
    return cert;
}

}  // namespace librate
