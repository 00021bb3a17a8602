#pragma once

#include <array>

#include "librate/linalg.hpp"

namespace librate {

// Coordinates are ordered (x, y, px, py).
using State = IVector;

enum Coord : std::size_t { X = 0, Y = 1, PX = 2, PY = 3 };

struct ModelParams {
    double mu = 0.0009537;

    void validate() const;
};

struct EnergyLevel {
    Interval h;
};

// Distances below this lower bound count as a collision.
inline constexpr double kCollisionRadius = 1e-4;

State make_state(Interval x, Interval y, Interval px, Interval py);
State make_state(const Vector& p);

Interval omega(const Interval& x, const Interval& y, const ModelParams& params);
Interval hamiltonian(const State& q, const ModelParams& params);
IVector vector_field(const State& q, const ModelParams& params);
IMatrix variational_field(const State& q, const ModelParams& params);
// (dH/dx, dH/dy, dH/dpx, dH/dpy)
IVector hamiltonian_gradient(const State& q, const ModelParams& params);
State symmetry_S(const State& q);

enum class HillRegion { Inside, Outside, Boundary };
HillRegion hill_region_test(const Interval& x, const Interval& y, const EnergyLevel& h, const ModelParams& params);

struct LibrationPoints {
    State L1;  // beyond the smaller primary
    State L2;  // between the primaries
    State L3;  // beyond the larger primary
};

// Certified via interval Newton on the collinear equilibrium equation.
LibrationPoints libration_points(const ModelParams& params);

// Plain floating point versions.
double hamiltonian(const Vector& q, const ModelParams& params);
Vector vector_field(const Vector& q, const ModelParams& params);

}  // namespace librate
