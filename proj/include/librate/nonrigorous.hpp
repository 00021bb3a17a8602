#pragma once

#include <array>

#include "librate/jet.hpp"
#include "librate/linalg.hpp"
#include "librate/model.hpp"

namespace librate {

// Plain floating point Taylor integrator used for seeds, charts and oracles.
// Nothing computed here is rigorous.
struct PointFlow {
    Vector state;
    Matrix DPhi;  // empty unless requested
    double time = 0.0;
    Matrix DP;  // section-corrected derivative, only for section hits
};

class NonrigorousIntegrator {
public:
    explicit NonrigorousIntegrator(ModelParams params, int order = 20, double tolerance = 1e-19, double max_step = 0.1);

    Vector flow(const Vector& q, double t) const;
    PointFlow flow_var(const Vector& q, double t) const;
    std::array<Jet, 4> flow_jet(const std::array<Jet, 4>& q, double t) const;

    // n-th crossing of {y = 0}; with positive_x_only, crossings with x <= 0 are skipped.
    // Crossing exactly at t = 0 is not counted. direction -1 integrates backwards.
    PointFlow section(const Vector& q, int n, bool positive_x_only, int direction = 1, double t_max = 200.0) const;

    const ModelParams& params() const { return params_; }

private:
    ModelParams params_;
    int order_;
    double tol_;
    double max_step_;
};

// Newton on py so that px vanishes after the half-turn from (x, 0, 0, py).
struct SymmetricSeed {
    double x = 0, py = 0;
    double slope = 0;       // dpy/dx along the family
    double half_period = 0;
};

SymmetricSeed shoot_symmetric_orbit(const NonrigorousIntegrator& nr, double x, double py_guess);

}  // namespace librate
