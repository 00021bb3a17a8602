#pragma once

#include <memory>

#include "librate/linalg.hpp"
#include "librate/model.hpp"

namespace librate {

struct IntegratorOptions {
    int taylor_order = 20;
    double abs_tolerance = 1e-19;  // target for |c_p| h^p at the set center
    double max_step = 0.1;
    double min_step = 1e-6;
    double width_cap = 1.0;  // BlowUp when a hull component gets wider
    long max_steps = 1000000;

    void validate() const;
};

// Doubleton set  xbar + C r0 + B r  together with the derivative  V = Vbar + Bv Rv.
struct LohnerSet {
    Vector xbar;
    Matrix C;
    IVector r0;
    Matrix B;
    IVector r;
    Matrix Vbar;
    Matrix Bv;
    IMatrix Rv;
    Interval t{0.0};

    static LohnerSet from_box(const IVector& box);
    // center + C r0 + extra, where center may carry rounding error
    static LohnerSet from_affine(const IVector& center, const Matrix& C, const IVector& r0,
                                 const IVector& extra = IVector());

    IVector hull() const;
    IMatrix derivative() const;
};

struct FlowEnclosure {
    Interval t_span;
    State state_out;
    IMatrix deriv_out;
    LohnerSet set;
    long steps = 0;
};

enum class SectionId { HalfTurn, FullTurn, SigmaG };
const char* section_name(SectionId id);

struct SectionCrossing {
    SectionId section_id = SectionId::HalfTurn;
    State crossing_box;  // y component is exactly 0
    Interval return_time;
    IMatrix DPhi;  // flow derivative at the crossing
    IMatrix DP;    // 4x4, with the section-time correction
    IVector ydot;  // enclosure of ydot on the crossing box (1 entry)
    long steps = 0;

    // rows/cols (x, px, py)
    IMatrix DP3() const;
};

class Integrator {
public:
    Integrator(ModelParams params, IntegratorOptions opts);
    ~Integrator();
    Integrator(const Integrator&) = delete;
    Integrator& operator=(const Integrator&) = delete;

    FlowEnclosure flow(const LohnerSet& s, const Interval& T) const;
    // n-th counted crossing of {y = 0} (time direction dir = +1 or -1).
    // For SigmaG only crossings with x > 0 are counted, and the energy bound is checked.
    SectionCrossing crossing(const LohnerSet& s, SectionId id, int n, int dir = 1,
                             const Interval& energy = Interval::entire()) const;

    const ModelParams& params() const { return params_; }
    const IntegratorOptions& options() const { return opts_; }

private:
    struct StepData;
    bool prepare_step(const LohnerSet& s, double h, bool exact, StepData& d) const;
    LohnerSet advance(const LohnerSet& s, const StepData& d, const Interval& dt) const;
    void check_width(const LohnerSet& s) const;

    ModelParams params_;
    IntegratorOptions opts_;
};

FlowEnclosure flow_enclose(const State& q, const Interval& T, const ModelParams& params, const IntegratorOptions& opts);
SectionCrossing poincare_map(const State& q, SectionId section, int n_crossings, const ModelParams& params,
                             const IntegratorOptions& opts);
SectionCrossing hit_section_G(const LohnerSet& s, const Interval& energy, const ModelParams& params,
                              const IntegratorOptions& opts, int dir = 1);

}  // namespace librate
