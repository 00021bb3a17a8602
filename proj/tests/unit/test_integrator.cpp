#include "doctest.h"
#include "librate/integrator.hpp"
#include "librate/nonrigorous.hpp"

using namespace librate;

namespace {

const ModelParams kP{};
const IntegratorOptions kOpt{};
constexpr double kX0 = -0.9510055339445208;
constexpr double kPy0 = -0.836804179646973;
constexpr double kPeriod = 3.058882912471;

State q0() { return make_state(kX0, 0.0, 0.0, kPy0); }

Vector q0d() {
    Vector v(4);
    v << kX0, 0, 0, kPy0;
    return v;
}

IVector inflate_box(IVector v, double r) {
    for (auto& c : v) c = inflate(c, r);
    return v;
}

bool contains_identity(const IMatrix& M) {
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j)
            if (!M(i, j).contains(i == j ? 1.0 : 0.0)) return false;
    return true;
}

}  // namespace

TEST_CASE("zero time flow is the identity") {
    FlowEnclosure f = flow_enclose(q0(), Interval(0.0), kP, kOpt);
    CHECK(f.state_out == q0());
    CHECK(contains_identity(f.deriv_out));
    CHECK(f.deriv_out.max_rad() == 0.0);
}

TEST_CASE("options validation") {
    IntegratorOptions o;
    o.taylor_order = 1;
    CHECK_THROWS_AS(o.validate(), Error);
    o = IntegratorOptions{};
    o.min_step = -1;
    CHECK_THROWS_AS(o.validate(), Error);
}

TEST_CASE("full period: energy, symplecticity and the reference integrator") {
    FlowEnclosure f = flow_enclose(q0(), Interval(kPeriod), kP, kOpt);
    Interval H0 = hamiltonian(q0(), kP);
    Interval H1 = hamiltonian(f.state_out, kP);
    CHECK(H1.overlaps(H0));
    CHECK(std::fabs(H1.mid() - H0.mid()) <= 10 * (H1.width() + H0.width()));
    CHECK(det(f.deriv_out).contains(1.0));

    NonrigorousIntegrator nr(kP);
    PointFlow ref = nr.flow_var(q0d(), kPeriod);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::fabs(f.state_out[i].mid() - ref.state(i)) < 1e-10);
        CHECK(inflate(f.state_out[i], 1e-12).contains(ref.state(i)));
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(inflate(f.deriv_out(i, j), 1e-8).contains(ref.DPhi(i, j)));
}

TEST_CASE("reversibility") {
    State q = make_state(kX0 + 1e-3, 0.01, 0.02, kPy0);
    FlowEnclosure fwd = flow_enclose(symmetry_S(q), Interval(1.0), kP, kOpt);
    FlowEnclosure bwd = flow_enclose(q, Interval(-1.0), kP, kOpt);
    CHECK(fwd.state_out.overlaps(symmetry_S(bwd.state_out)));
    for (int i = 0; i < 4; ++i) {
        double resid = std::fabs(fwd.state_out[i].mid() - symmetry_S(bwd.state_out)[i].mid());
        CHECK(resid <= 10 * (fwd.state_out[i].width() + bwd.state_out[i].width()) + 1e-15);
    }
}

TEST_CASE("sub-stepping and widening") {
    Integrator I(kP, kOpt);
    LohnerSet s = LohnerSet::from_box(q0());
    FlowEnclosure one = I.flow(s, Interval(2.0));
    FlowEnclosure half = I.flow(s, Interval(0.7));
    FlowEnclosure two = I.flow(half.set, Interval(2.0));
    CHECK(one.state_out.overlaps(two.state_out));
    CHECK(one.deriv_out.overlaps(two.deriv_out));

    IVector wide = inflate_box(q0(), 1e-9);
    FlowEnclosure w = I.flow(LohnerSet::from_box(wide), Interval(2.0));
    CHECK(one.state_out.subset_of(w.state_out));
    CHECK(det(w.deriv_out).contains(1.0));

    FlowEnclosure ts = I.flow(s, Interval(1.0, 1.1));
    FlowEnclosure t1 = I.flow(s, Interval(1.05));
    CHECK(t1.state_out.subset_of(ts.state_out));
}

TEST_CASE("poincare_map full period return time") {
    SectionCrossing c = poincare_map(q0(), SectionId::FullTurn, 2, kP, kOpt);
    CHECK(c.return_time.subset_of(Interval(3.058882598, 3.058883224)));
    CHECK(c.return_time.width() < 1e-5);
    CHECK(c.crossing_box[Y] == Interval(0.0));
    CHECK(c.ydot[0].mig() > 0.1);
    CHECK(c.crossing_box.overlaps(inflate_box(q0(), 1e-9)));
    for (int j = 0; j < 4; ++j) CHECK(c.DP(Y, j) == Interval(0.0));
}

TEST_CASE("half-turn closes on the symmetric set and composes to the full turn") {
    SectionCrossing h = poincare_map(q0(), SectionId::HalfTurn, 1, kP, kOpt);
    CHECK(inflate(h.crossing_box[PX], 1e-10).contains_zero());
    CHECK(h.return_time.overlaps(inflate(Interval(0.5 * kPeriod), 1e-9)));

    Integrator I(kP, kOpt);
    SectionCrossing h2 = I.crossing(LohnerSet::from_box(h.crossing_box), SectionId::HalfTurn, 1);
    SectionCrossing full = poincare_map(q0(), SectionId::FullTurn, 2, kP, kOpt);
    CHECK(h2.crossing_box.overlaps(full.crossing_box));
    CHECK((h.return_time + h2.return_time).overlaps(full.return_time));

    NonrigorousIntegrator nr(kP);
    PointFlow ref = nr.section(q0d(), 1, false);
    CHECK(inflate(h.return_time, 1e-12).contains(ref.time));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(inflate(h.DP(i, j), 1e-8).contains(ref.DP(i, j)));
}

TEST_CASE("hit_section_G counts only right half-plane crossings") {
    Vector q(4);
    q << 0.55, 0.0, 0.0, -0.3;
    NonrigorousIntegrator nr(kP);
    PointFlow ref = nr.section(q, 1, true);
    REQUIRE(ref.state(0) > 0);

    State box = make_state(q);
    Interval H = hamiltonian(box, kP);
    SectionCrossing c = hit_section_G(LohnerSet::from_box(box), H, kP, kOpt);
    CHECK(c.crossing_box[X].positive());
    CHECK(inflate(c.return_time, 1e-12).contains(ref.time));
    CHECK(hamiltonian(c.crossing_box, kP).overlaps(H));
}
