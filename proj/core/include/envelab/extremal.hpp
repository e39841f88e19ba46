#pragma once

#include <complex>
#include <vector>

#include "envelab/geometry.hpp"

namespace envelab::extremal {

struct ChebyshevOptions {
    int max_iters = 200;
    double stagnation_rel_tol = 1e-10;  // on the reweighting progress
    int samples_per_arc_per_degree = 16;
    double target_value_gap = 2e-4;  // early exit once the certified gap in
                                     // the potential value is this small
    int exchange_refine_factor = 4;
};

// One weighted polynomial-growth evaluation: the degree-k estimate of the
// envelope gap (u_K - u)(p), i.e. (2/k) log max{ |s(p)|_k : |s|_k <= 1 on K }
// written in potential units. `lower`/`upper` are certified bounds: the
// weighted-least-squares dual value bounds the discrete minimax from below,
// the coefficient sum of the returned polynomial bounds the continuum sup
// from above.
struct ChebyshevValue {
    double value = 0.0;
    double lower = 0.0, upper = 0.0;
    int iterations = 0;
    bool certified = true;  // false when the exchange loop hit max_iters
    double gap() const { return upper - lower; }
};

ChebyshevValue chebyshev_value(const geometry::ChartPoint& p, const geometry::ArcSet& K,
                               const geometry::WeightPotential& h, int k,
                               const ChebyshevOptions& opts = {});

struct FieldGrid {
    int n_radial = 20;
    int n_angular = 36;   // over [0, 2pi); halved automatically under mirror symmetry
    double r_min = 5e-3;  // innermost ring; a near-origin point is added separately
};

struct EnvelopeField {
    int k = 0;
    std::vector<geometry::ChartPoint> nodes;
    std::vector<double> value;  // u_K - u at the node, >= 0, == 0 on K
    std::vector<double> gap;
    std::vector<char> certified;
    double max_gap = 0.0;
};

// Sweep of chebyshev_value over a polar grid in the closed unit disk (the
// reflection z -> 1/conj(z) maps the sweep to the outer chart when both the
// weight and K are reflection invariant; otherwise both halves are swept).
EnvelopeField envelope_field(const geometry::ArcSet& K, const geometry::WeightPotential& h,
                             int k, const FieldGrid& grid = {},
                             const ChebyshevOptions& opts = {}, int threads = 0);

struct CExponent {
    double value = 0.0;
    double gap = 0.0;  // accumulated certification gap at the maximizer
    geometry::ChartPoint argmax;
    double field_K = 0.0, field_full_circle = 0.0;  // at the maximizer
};

// max over the sphere of (u_K - u_{S^1}), estimated at degree k on the grid
// with a local refinement pass around the argmax.
CExponent c_exponent(const geometry::ArcSet& K, const geometry::WeightPotential& h, int k,
                     const FieldGrid& grid = {}, const ChebyshevOptions& opts = {},
                     int threads = 0);

}  // namespace envelab::extremal
