#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace envelab::geometry {

// ---------------------------------------------------------------------------
// Charts on the sphere. The affine chart carries coordinate z, the chart at
// infinity w = 1/z on the overlap. Points away from the chart origins have a
// representation with |coordinate| <= 1 in at least one chart.
// ---------------------------------------------------------------------------

enum class Chart { affine, infinity };

struct ChartPoint {
    Chart chart = Chart::affine;
    std::complex<double> z{0.0, 0.0};

    static ChartPoint affine(std::complex<double> z) { return {Chart::affine, z}; }
    static ChartPoint at_infinity(std::complex<double> w) { return {Chart::infinity, w}; }
    static ChartPoint from_polar(double r, double theta);  // affine chart

    // Same point in the other chart; requires a nonzero coordinate.
    ChartPoint other_chart() const;
    // Representation with |coordinate| <= 1 (either chart works on |z| = 1).
    ChartPoint normalized() const;

    double abs_coord() const { return std::abs(z); }
    // t = log|z|^2 measured in the affine chart (so +inf at the chart at
    // infinity's origin). Finite only away from z = 0 / w = 0.
    double log_abs_sq_affine() const;
};

// Reference potential: log(1 + |z|^2) in the affine chart and the matching
// expression log(1 + |w|^2) in the chart at infinity (the frames differ by the
// twist log|z|^2). Normalized so the curvature form has total mass 1.
double fs_potential(const ChartPoint& p);

// Curvature density of the reference potential against Lebesgue measure of the
// chart coordinate: (1/pi) (1 + |z|^2)^{-2}.
double fs_curvature_density(std::complex<double> z);

// ---------------------------------------------------------------------------
// Quadrature rules
// ---------------------------------------------------------------------------

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Uniform rule on [0, 2pi) with order+1 nodes; integrates trigonometric
// polynomials of degree <= order exactly. Rejects order < 2.
Rule1D circle_rule(int order);

// Rule for integrals over r in [0, inf) against dr, produced by Gauss-Legendre
// in the compactified variable u = r^2/(1+r^2); exact for integrands that are
// polynomial in u (times du/dr). Rejects order < 2.
Rule1D radial_rule(int order);

// Gauss-Legendre on [-1, 1].
Rule1D gauss_legendre(int n);

enum class QuadKind { circle, radial_x_angular };

struct Rule2D {
    // Product rule over the affine chart: nodes (r_i, theta_j), weight factors
    // such that sum w f(r,theta) approximates int f r-form dr dtheta.
    Rule1D radial;
    Rule1D angular;
};

Rule2D product_rule(int radial_order, int angular_order);

// ---------------------------------------------------------------------------
// Measurable sets: finite unions of closed arcs / intervals, kept canonical
// (sorted, disjoint, merged). These are the only sets the lab represents;
// pathological measurable sets are out of the data model.
// ---------------------------------------------------------------------------

class ArcSet {
public:
    ArcSet() = default;
    // Single closed arc centered at `center` with half-angle `half_angle`.
    static ArcSet arc(double center, double half_angle);
    static ArcSet full_circle();
    static ArcSet from_intervals(std::vector<std::pair<double, double>> arcs);

    bool empty() const { return arcs_.empty(); }
    bool is_full_circle() const;
    double total_measure() const;
    bool contains(double theta, double tol = 0.0) const;
    ArcSet rotated(double phi) const;
    // Smallest closed arc [lo, hi] containing the set, as (center, half_angle).
    std::pair<double, double> enclosing_arc() const;

    // Arcs as [lo, hi] with lo in [0, 2pi) and hi in (lo, lo + 2pi].
    const std::vector<std::pair<double, double>>& arcs() const { return arcs_; }

private:
    std::vector<std::pair<double, double>> arcs_;
};

class RadialSet {
public:
    RadialSet() = default;
    // Intervals in t = log|z|^2; endpoints may be +-infinity.
    static RadialSet from_intervals(std::vector<std::pair<double, double>> iv);
    static RadialSet half_line_geq(double t0);  // {t >= t0}
    static RadialSet whole_line();

    bool empty() const { return iv_.empty(); }
    double total_measure() const;  // in t, may be +inf
    bool contains(double t, double tol = 0.0) const;
    const std::vector<std::pair<double, double>>& intervals() const { return iv_; }

private:
    std::vector<std::pair<double, double>> iv_;
};

// Density-point canonical form: closure of the interior of a finite union of
// closed intervals. Degenerate components are removed; an empty result means
// the input was Lebesgue negligible (envelopes of it are undefined).
ArcSet density_canonicalize(const ArcSet& a);
RadialSet density_canonicalize(const RadialSet& a);

// ---------------------------------------------------------------------------
// Sampled weight: h = e^{-phi} * reference, phi stored on a two-chart polar
// grid (geometric radial spacing concentrated near |z| = 1). phi == 0 is the
// reference metric. Immutable after construction.
// ---------------------------------------------------------------------------

class WeightPotential {
public:
    enum class Smoothness { smooth, continuous, bounded_psh };

    static WeightPotential fubini_study();
    static WeightPotential from_function(std::function<double(const ChartPoint&)> phi,
                                         int n_radial = 512, int n_angular = 256,
                                         Smoothness tag = Smoothness::smooth);

    // Reference-relative potential phi at p (interpolated).
    double relative_potential(const ChartPoint& p) const;
    // Full potential fs_potential(p) + phi(p), in the frame of p's chart.
    double full_potential(const ChartPoint& p) const;

    bool is_reference() const { return analytic_zero_; }
    Smoothness tag() const { return tag_; }
    int radial_nodes() const { return n_radial_; }
    int angular_nodes() const { return n_angular_; }

    // Max |phi_affine - phi_infinity| over the overlap annulus 1/2<=|z|<=2,
    // interpolating each chart's grid. Zero-ish for consistent samplings.
    double chart_overlap_discrepancy() const;

private:
    WeightPotential() = default;
    double interp(int chart, double t, double theta) const;

    bool analytic_zero_ = true;
    Smoothness tag_ = Smoothness::smooth;
    int n_radial_ = 0, n_angular_ = 0;
    std::vector<double> t_knots_;          // shared radial grid in t = log|coord|^2
    std::vector<double> values_[2];        // [chart][it * n_angular + ith]
};

}  // namespace envelab::geometry
