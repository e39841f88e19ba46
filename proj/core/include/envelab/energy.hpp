#pragma once

#include "envelab/geometry.hpp"
#include "envelab/radial.hpp"

namespace envelab::energy {

// Monge-Ampere energy difference E(u) - E(v) of rotation-invariant potentials,
// normalized so that translation acts as E(u + c) = E(u) + c. Computed from
// the discrete second-difference curvature measures, exact for
// piecewise-linear profiles:
//   E(u) - E(v) = 1/2 [ int (u - v) d omega_u + int (u - v) d omega_v ]
// with boundary masses slope_left at t = -inf and 1 - slope_right at +inf.
// Requires matching tail slopes (bounded difference).
double energy_diff(const radial::RadialProfile& u, const radial::RadialProfile& v);

// Same quantity evaluated on the dual side: E(u) - E(v) = -int_0^1 (u*-v*) ds.
double energy_diff_dual(const radial::RadialProfile& u, const radial::RadialProfile& v);

// Independent finite-difference route (uniform grid, centered second
// differences); cross-check only, relaxed accuracy. Inputs are full
// potentials as plain callables of t.
double energy_diff_grid(const std::function<double(double)>& u_of_t,
                        const std::function<double(double)>& v_of_t,
                        double t_span = 30.0, int n = 4000);

// d_1 between ordered potentials equals |E(u0) - E(u1)|; rejects unordered
// pairs.
double d1_distance(const radial::RadialProfile& h0, const radial::RadialProfile& h1,
                   double order_tol = 1e-9);

// p-th root of the p-th absolute moment of the initial-rate law of the
// ordered pair (the Finsler length of the connecting segment).
double dp_distance_radial(const radial::RadialProfile& v0, const radial::RadialProfile& v1,
                          double p);

}  // namespace envelab::energy
