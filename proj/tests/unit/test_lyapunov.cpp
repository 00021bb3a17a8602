#include "doctest.h"
#include "librate/lyapunov.hpp"

using namespace librate;

namespace {

const ModelParams kP{};
const IntegratorOptions kOpt{};
constexpr double kX0 = -0.9510055339445208;
constexpr double kPy0 = -0.836804179646973;
constexpr double kA = -4.506866203376769;

FamilyBox reference_box() { return FamilyBox::make(kX0, 1e-9, kPy0, kA, 1e-13, 1e-12); }

}  // namespace

TEST_CASE("verify_family_box on the reference box") {
    FamilyCertificate c = verify_family_box(reference_box(), kP, kOpt);
    REQUIRE_MESSAGE(c.status.verified, c.status.detail);
    MESSAGE("kappa' " << to_string(c.kappa_slope) << " dH/dx " << to_string(c.dH_dx) << " N " << to_string(c.newton_set));
    CHECK(c.kappa_slope.overlaps(Interval(-4.506980818, -4.506751634)));
    CHECK(c.dH_dx.overlaps(Interval(-0.3670937615, -0.3670674516)));
    CHECK(c.dH_dx.negative());
    CHECK(c.newton_set.subset_of(c.box.J0));
    CHECK(c.px_image_U0.contains_zero());
    CHECK(c.energy_left.overlaps(Interval(-1.514999999635, -1.514999999631)));
    CHECK(c.energy_right.overlaps(Interval(-1.515000000369, -1.515000000365)));

    HyperbolicityCertificate h = verify_hyperbolicity(c, kP, kOpt);
    REQUIRE_MESSAGE(h.status.verified, h.status.detail);
    MESSAGE("lambda1 " << to_string(h.lambda1) << " lambda2 " << to_string(h.lambda2));
    CHECK(h.lambda1.overlaps(Interval(1450.24, 1481.68)));
    CHECK(h.lambda2.overlaps(Interval(6.74909e-4, 6.89541e-4)));
    CHECK((h.lambda1 * h.lambda2).contains(1.0));
}

// far end of the family: one pass over the whole strip gives a slope just too wide
TEST_CASE("slope enclosure splits the strip when needed") {
    const FamilyBox b = FamilyBox::make(-0.9660224802663339, 1.1007716e-6, -0.7673730491335662, -5.054830320447154,
                                        1e-13, 5e-8);
    FamilyCertificate c = verify_family_box(b, kP, kOpt);
    REQUIRE_MESSAGE(c.status.verified, c.status.detail);
    const double margin = 0.045;  // (|J1| - |J0|) / |I| is about 0.0454
    CHECK(abs(c.kappa_slope - Interval(b.a)).hi() < margin);
}

TEST_CASE("degenerate and off-family boxes fail") {
    FamilyBox same = FamilyBox::make(kX0, 1e-9, kPy0, kA, 1e-12, 1e-12);
    FamilyCertificate c = verify_family_box(same, kP, kOpt);
    CHECK_FALSE(c.status.verified);
    CHECK(c.status.reason == ErrorCode::SlopeFailed);

    FamilyBox off = FamilyBox::make(kX0, 1e-9, kPy0 + 1e-3, kA, 1e-13, 1e-12);
    FamilyCertificate o = verify_family_box(off, kP, kOpt);
    CHECK_FALSE(o.status.verified);
    CHECK(o.status.reason == ErrorCode::NewtonFailed);

    FamilyBox bad = reference_box();
    bad.J0 = Interval(kPy0) + Interval::sym(1e-11);
    CHECK(verify_family_box(bad, kP, kOpt).status.reason == ErrorCode::InvalidArgument);
}

TEST_CASE("hyperbolicity rejects a neutral return map") {
    IVector grad{Interval(-0.4), Interval(0.0), Interval(0.0), Interval(0.1)};
    HyperbolicityCertificate h = hyperbolicity_from_dP(IMatrix::identity(4), grad);
    CHECK_FALSE(h.status.verified);
    CHECK(h.status.reason == ErrorCode::EigSplitFailed);

    IVector flat{Interval(-0.1, 0.1), Interval(0.0), Interval(0.0), Interval(0.1)};
    CHECK(hyperbolicity_from_dP(IMatrix::identity(4), flat).status.reason == ErrorCode::EnergyDerivativeVanishes);

    FamilyCertificate unverified;
    CHECK(verify_hyperbolicity(unverified, kP, kOpt).status.reason == ErrorCode::MissingCertificate);
    CHECK_THROWS_AS(energy_foliation(unverified, kP), Error);
}

TEST_CASE("continuation over a short chain") {
    ContinuationOptions co;
    CHECK(continue_family({}, co, kP, kOpt).certs.empty());

    const double h = 2 * co.r * 0.99;
    std::vector<double> xs;
    for (int i = -2; i <= 2; ++i) xs.push_back(kX0 + i * h);
    std::vector<FamilySeed> seeds = generate_seeds(xs, kPy0 + kA * (xs[0] - kX0), kP);
    REQUIRE(seeds.size() == 5);
    CHECK(std::fabs(seeds[2].py - kPy0) < 1e-13);
    CHECK(std::fabs(seeds[2].a - kA) < 1e-8);

    ContinuationResult res = continue_family(seeds, co, kP, kOpt);
    CHECK(res.all_verified);
    CHECK(res.tube_radius < 5e-8);
    for (std::size_t i = 0; i < res.certs.size(); ++i) {
        CHECK(res.certs[i].index == i);
        CHECK(res.certs[i].dH_dx.negative());
        if (i + 1 < seeds.size()) {
            // finite-difference slope of neighbouring seeds lies in the certified slope range
            double fd = (seeds[i + 1].py - seeds[i].py) / (seeds[i + 1].x - seeds[i].x);
            CHECK(inflate(res.certs[i].kappa_slope, 1e-6).contains(fd));
        }
    }

    std::vector<FamilySeed> gap = {seeds[0], seeds[2]};
    CHECK_THROWS_AS(continue_family(gap, co, kP, kOpt), Error);
}
