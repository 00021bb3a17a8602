#include <cmath>
#include <random>

#include "doctest.h"
#include "librate/chart.hpp"

using namespace librate;

namespace {

const ModelParams kP{};
const IntegratorOptions kOpt{};

struct Setup {
    FamilyCertificate family;
    HyperbolicityCertificate hyp;
    Chart chart;
    IVector B0;
};

const Setup& setup() {
    static const Setup s = [] {
        Setup r;
        r.family = verify_family_box(
            FamilyBox::make(-0.9510055339445208, 1e-9, -0.836804179646973, -4.506866203376769, 1e-13, 1e-12), kP, kOpt);
        r.hyp = verify_hyperbolicity(r.family, kP, kOpt);
        r.chart = reference_chart(r.hyp.lambda1.mid(), r.hyp.return_time);
        r.B0 = enclose_B0(r.chart, r.family);
        return r;
    }();
    return s;
}

IVector point(double a, double b, double c, double d) { return IVector{Interval(a), Interval(b), Interval(c), Interval(d)}; }

}  // namespace

TEST_CASE("polynomial helpers") {
    Poly p{1.0, -2.0, 3.0};
    CHECK(poly_eval(p, 2.0) == 9.0);
    CHECK(poly_eval(p, Interval(2.0)) == Interval(9.0));
    CHECK(poly_eval(p, Interval(0.0, 1.0)).contains(poly_eval(p, 0.3)));
    CHECK(poly_derivative(p) == Poly{-2.0, 6.0});
    CHECK(poly_derivative(Poly{5.0}) == Poly{0.0});
}

TEST_CASE("reference chart invariants") {
    const Chart& c = setup().chart;
    REQUIRE(setup().hyp.status.verified);
    CHECK_NOTHROW(c.validate());
    CHECK(c.degree() == 4);
    CHECK(c.sigma() == 0.1);
    Chart bad = c;
    bad.K[2][1] = 1e-3;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = c;
    bad.C_inv = IMatrix::identity(4);
    CHECK_THROWS_AS(bad.validate(), Error);

    // C_inv DPhi C is close to real Jordan form at q0
    FlowEnclosure fe = flow_enclose(IVector::from(c.q0), c.T, kP, kOpt);
    Matrix J = (c.C_inv * (fe.deriv_out * c.C)).mid();
    CHECK(J(0, 0) > 1450.24);
    CHECK(J(0, 0) < 1481.68);
    for (int j = 1; j < 4; ++j) {
        CHECK(std::fabs(J(0, j)) < 1e-2);
        CHECK(std::fabs(J(j, 0)) < 1e-2);
    }
    CHECK(std::fabs(J(1, 1) * J(0, 0) - 1.0) < 1e-2);
}

TEST_CASE("fit_chart reproduces the listed chart") {
    const Chart fit = fit_chart(setup().family, kP, 4, 0.1);
    const Chart& ref = setup().chart;
    CHECK(fit.K[0][1] == 0.1);
    for (int i = 1; i < 4; ++i) {
        CHECK(fit.K[i][0] == 0.0);
        CHECK(fit.K[i][1] == 0.0);
    }
    CHECK(std::fabs(fit.K[0][2] / -0.0621591 - 1.0) < 0.1);
    for (int i = 0; i < 4; ++i)
        for (int k = 2; k <= 4; ++k) CHECK(fit.K[i][k] == doctest::Approx(ref.K[i][k]).epsilon(1e-4).scale(1e-6));
    CHECK((fit.C - ref.C).cwiseAbs().maxCoeff() < 2e-6);
    CHECK(fit.lambda == doctest::Approx(1466.05).epsilon(1e-4));
    CHECK_NOTHROW(fit.validate());

    FamilyCertificate unverified;
    CHECK_THROWS_AS(fit_chart(unverified, kP), Error);
    CHECK_THROWS_AS(fit_chart(setup().family, kP, 0), Error);

    // residual of the conjugacy is of order d + 1 = 5 in lambda s
    double prev = 0;
    for (double s : {2e-5, 4e-5, 8e-5}) {
        const double res = conjugacy_residual(fit, s, kP);
        const double ls = fit.lambda * s;
        MESSAGE("s " << s << " residual " << res);
        CHECK(res <= 0.05 * std::pow(ls, 5));
        if (prev > 0) {
            CHECK(res / prev > 16.0);
            CHECK(res / prev < 48.0);
        }
        prev = res;
    }
}

TEST_CASE("psi and its Jacobian") {
    const Chart& c = setup().chart;
    for (double x : {-0.05, 1e-6, 0.02, 0.1}) {
        Vector v(4);
        v << x, 0, 0, 0;
        Vector k = psi_eval(c, v);
        for (int i = 0; i < 4; ++i) CHECK(k(i) == poly_eval(c.K[i], x));
    }
    IVector z = psi_eval(c, point(0, 0, 0, 0));
    for (const auto& zi : z) CHECK(zi == Interval(0.0));
    IMatrix J0 = psi_jacobian(c, point(0, 0, 0, 0));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(J0(i, j) == Interval(i == j ? 0.1 : 0.0));

    Vector v(4);
    v << 1e-3, 1e-4, 1e-4, 1e-4;
    Matrix J = psi_jacobian(c, v);
    const double h = 1e-6;
    for (int j = 0; j < 4; ++j) {
        Vector e = Vector::Zero(4);
        e(j) = h;
        Vector fd = (psi_eval(c, Vector(v + e)) - psi_eval(c, Vector(v - e))) / (2 * h);
        for (int i = 0; i < 4; ++i) CHECK(std::fabs(fd(i) - J(i, j)) < 1e-6);
    }

    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    IVector box{Interval(-1e-3, 2e-3), Interval::sym(1e-4), Interval(0.0, 1e-4), Interval::sym(3e-4)};
    IVector pb = psi_eval(c, box);
    IMatrix Jb = psi_jacobian(c, box);
    for (int t = 0; t < 500; ++t) {
        Vector p(4);
        for (int i = 0; i < 4; ++i) p(i) = box[i].mid() + u(g) * box[i].rad() * 0.999;
        CHECK(pb.contains(psi_eval(c, p)));
        CHECK(IMatrix::from(psi_jacobian(c, p)).subset_of(Jb));
    }
}

TEST_CASE("enclose_B0 on the reference data") {
    const Setup& s = setup();
    const double published[4] = {7.91575e-12, 7.91575e-12, 9.29424e-19, 4.50827e-08};
    for (int i = 0; i < 4; ++i) {
        MESSAGE("B0[" << i << "] " << to_string(s.B0[i]));
        CHECK(s.B0[i].contains_zero());
        CHECK(s.B0[i].mag() <= 1.05 * published[i]);
    }
    CHECK(s.B0[2].mag() < 1e-8 * s.B0[3].mag());
    CHECK(s.B0[3].mag() > 0.95 * published[3]);

    IVector phys = chart_to_phase(s.chart, s.B0);
    CHECK(phys[Y].contains_zero());
    CHECK(phys[PX].contains_zero());
    CHECK(phys[X].contains(s.chart.q0(X)));

    FamilyCertificate thin = s.family;
    thin.box.I = Interval(thin.box.x0);
    thin.box.J1 = Interval(thin.box.py0) + Interval::sym(1e-15);
    IVector b = enclose_B0(s.chart, thin);
    for (int i = 0; i < 4; ++i) CHECK(b[i].mag() < 1e-13);

    FamilyCertificate moved = s.family;
    moved.box.x0 += 1e-9;
    CHECK_THROWS_AS(enclose_B0(s.chart, moved), Error);
}

TEST_CASE("F_image and DF_enclose") {
    const Setup& s = setup();
    Integrator integ(kP, kOpt);

    LocalImage fixed = F_image(s.chart, point(0, 0, 0, 0), std::nullopt, integ);
    for (int i = 0; i < 4; ++i) {
        CHECK(fixed.image[i].contains_zero());
        CHECK(fixed.image[i].width() < 1e-5);
    }

    IVector thin{Interval(1e-9, 1.1e-9), Interval(0.0), Interval(0.0), Interval(0.0)};
    LocalImage img = F_image(s.chart, thin, std::nullopt, integ);
    const Interval expect = Interval(s.chart.lambda) * thin[0];
    CHECK(img.image[0].mid() == doctest::Approx(expect.mid()).epsilon(1e-3));
    CHECK(img.image[0].contains(expect.mid()));

    IVector tiny = img.U2;
    for (auto& t : tiny) t = Interval(t.mid());
    CHECK_THROWS_AS(F_image(s.chart, thin, tiny, integ), Error);
    CHECK_NOTHROW(F_image(s.chart, thin, img.U2, integ));

    LocalImage at_b0 = F_image(s.chart, s.B0, std::nullopt, integ);
    IMatrix DF0 = DF_enclose(s.chart, s.B0, at_b0.image, at_b0.DPhi);
    CHECK(DF0(0, 0).overlaps(Interval(1450.24, 1481.68)));
    CHECK(DF0(0, 0).width() < 1.0);

    // first order consistency between nearby images
    IVector other = thin;
    other[0] = thin[0] + Interval(2e-10);
    LocalImage img2 = F_image(s.chart, other, std::nullopt, integ);
    IVector hullbox = hull(thin, other);
    LocalImage big = F_image(s.chart, hullbox, std::nullopt, integ);
    IMatrix DF = DF_enclose(s.chart, hullbox, big.image, big.DPhi);
    for (int i = 0; i < 4; ++i) {
        const double predicted = DF(i, 0).mid() * 2e-10;
        const double actual = img2.image[i].mid() - img.image[i].mid();
        const double slack = img.image[i].width() + img2.image[i].width() + DF(i, 0).rad() * 2e-10;
        CHECK(std::fabs(predicted - actual) <= slack);
    }

    // a wider slab never yields narrower entries
    IVector wide = hullbox;
    wide[0] = Interval(hullbox[0].lo(), hullbox[0].hi() + 2e-9);
    LocalImage wimg = F_image(s.chart, wide, std::nullopt, integ);
    IMatrix DFw = DF_enclose(s.chart, wide, wimg.image, wimg.DPhi);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(DFw(i, j).width() >= DF(i, j).width());
            CHECK(DFw(i, j).overlaps(DF(i, j)));
        }
    IMatrix DFr = DF_enclose(s.chart, hullbox, big.image, kP, kOpt);
    CHECK(DFr.overlaps(DF));
}

TEST_CASE("LocalBox slabs cover B") {
    const Setup& s = setup();
    LocalBox lb{s.B0, -1e-11, 5e-7, 7, 2.56e-6};
    CHECK_NOTHROW(lb.validate());
    double prev = lb.x_lo;
    for (int i = 0; i < lb.N; ++i) {
        IVector b = lb.slab(i);
        CHECK(b[0].lo() == prev);
        prev = b[0].hi();
        for (int k = 1; k < 4; ++k) CHECK(s.B0[k].subset_of(b[k]));
        if (i > 0) CHECK(lb.slab(i - 1)[1].subset_of(b[1]));
    }
    CHECK(prev == lb.x_hi);
    CHECK_THROWS_AS(lb.slab(7), Error);
    LocalBox bad = lb;
    bad.alpha = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = lb;
    bad.B0[1] = Interval(1.0, 2.0);
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("small fiber enclosure") {
    const Setup& s = setup();
    FiberOptions fo;
    fo.x_hi = 3e-8;
    fo.N = 6;
    FiberCertificate fc = enclose_fibers(s.chart, s.B0, fo, kP, kOpt);
    REQUIRE_MESSAGE(fc.status.verified, fc.status.detail);
    CHECK(fc.DF(0, 0).overlaps(Interval(1465.6, 1466.5)));
    CHECK(fc.images.size() == 6);
    CHECK(fc.cone.lipschitz == doctest::Approx(1.6e-3));

    fo.x_lo = 0.0;
    CHECK(enclose_fibers(s.chart, s.B0, fo, kP, kOpt).status.reason == ErrorCode::InvalidArgument);
}
