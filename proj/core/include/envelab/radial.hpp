#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "envelab/bigfloat.hpp"
#include "envelab/geometry.hpp"
#include "envelab/spectral_measure.hpp"

namespace envelab::radial {

// ---------------------------------------------------------------------------
// Rotation-invariant potentials as convex functions of t = log|z|^2.
//
// A profile is piecewise linear on a finite knot window with exact affine
// tails; convexity and tail slopes in [0, 1] encode positivity and the mass-1
// normalization (slope 0 at -inf, slope 1 at +inf for potentials with no mass
// at the chart origins). All operations below are exact for piecewise-linear
// data. Immutable after construction.
// ---------------------------------------------------------------------------

class RadialProfile {
public:
    RadialProfile(std::vector<double> t, std::vector<double> v,
                  double s_left, double s_right, double convexity_tol = 1e-11);

    static RadialProfile affine(double value_at_zero, double slope);
    // Reference profile log(1 + e^t), sampled on a stretched grid; the tails
    // are affine to ~e^{-span}.
    static RadialProfile fubini_study(int n = 4001, double span = 45.0);
    static RadialProfile from_function(const std::function<double(double)>& f,
                                       double t_lo, double t_hi, int n,
                                       double s_left, double s_right);

    double operator()(double t) const;
    // Subgradient interval [s-, s+] at t.
    std::pair<double, double> subgradient(double t) const;
    double slope_left() const { return s_left_; }
    double slope_right() const { return s_right_; }
    const std::vector<double>& knots() const { return t_; }
    const std::vector<double>& values() const { return v_; }

    // Interior curvature atoms (t_i, slope jump at t_i); for piecewise-linear
    // profiles this is the whole curvature measure away from the chart
    // origins, whose masses are slope_left and 1 - slope_right.
    std::vector<std::pair<double, double>> curvature_atoms() const;

    RadialProfile shifted(double c) const;  // v + c

    friend double max_abs_difference(const RadialProfile& a, const RadialProfile& b);
    // a <= b + tol everywhere (requires matching tail slopes up to tol).
    friend bool dominated_by(const RadialProfile& a, const RadialProfile& b, double tol);

private:
    std::vector<double> t_, v_;
    double s_left_, s_right_;
};

// Convex conjugate v*(s) = sup_t (s t - v(t)), piecewise linear on the slope
// domain [slope_left, slope_right] of v.
class LegendreDual {
public:
    LegendreDual(std::vector<double> s, std::vector<double> w);
    double s_lo() const { return s_.front(); }
    double s_hi() const { return s_.back(); }
    double operator()(double s) const;  // inside the domain
    const std::vector<double>& knots() const { return s_; }
    const std::vector<double>& values() const { return w_; }

private:
    std::vector<double> s_, w_;
};

LegendreDual legendre(const RadialProfile& v);
RadialProfile legendre_inverse(const LegendreDual& w);

// Largest convex function with slopes in [0, 1] lying below the obstacle on S
// (monotone-chain lower hull of the obstacle graph restricted to S, slopes
// clamped by affine extension). Throws on empty S.
RadialProfile radial_envelope(const RadialProfile& obstacle, const geometry::RadialSet& S);
RadialProfile radial_envelope(const std::function<double(double)>& obstacle,
                              const geometry::RadialSet& S,
                              int samples_per_interval = 2048);

// Segment at time tau of the path linear in the Legendre duals; endpoints
// reproduce the inputs.
RadialProfile geodesic(const RadialProfile& v0, const RadialProfile& v1, double tau);

// Initial rate of the path from v0 to v1.
//
// Two sign conventions are in circulation for geodesic rates; the stored one
// is the potential-side derivative d v_tau / d tau at tau = 0, which equals
// (v0* - v1*) composed with the slope map of v0 (so v1 = v0 + c gives rate c,
// and the rate vanishes on the contact set of an ordered pair). The
// metric-side rate is its negation; use `convention` to select.
class GeodesicSpeed {
public:
    enum class Convention { potential_rate, metric_rate };

    // Piecewise-linear rate as a function of the slope variable s in [0, 1].
    const std::vector<double>& s_knots() const { return s_; }
    std::vector<double> values(Convention c = Convention::potential_rate) const;
    double at_slope(double s, Convention c = Convention::potential_rate) const;
    // Rate at a point t (via the slope map of v0; kinks use the midpoint of
    // the subgradient).
    double at_t(double t, Convention c = Convention::potential_rate) const;

    double min_value(Convention c = Convention::potential_rate) const;
    double max_value(Convention c = Convention::potential_rate) const;

private:
    friend GeodesicSpeed geodesic_speed(const RadialProfile&, const RadialProfile&, double);
    std::vector<double> s_, val_;  // potential_rate values
    std::vector<double> v0_knots_, v0_vals_;
    double v0_sl_ = 0, v0_sr_ = 1;
};

// Requires an ordered pair (v0 <= v1 or v1 <= v0 up to tol) with matching tail
// slopes; throws otherwise.
GeodesicSpeed geodesic_speed(const RadialProfile& v0, const RadialProfile& v1,
                             double order_tol = 1e-9);

// Law of the initial rate under the normalized curvature measure of v0; in
// dual variables the law of (v0* - v1*)(s) with s uniform on [0, 1]. Total
// mass 1, compact support.
SpectralMeasure speed_pushforward(const RadialProfile& v0, const RadialProfile& v1,
                                  GeodesicSpeed::Convention c = GeodesicSpeed::Convention::potential_rate,
                                  double flat_tol = 1e-12);

// ---------------------------------------------------------------------------
// Diagonal compressions: for rotation-invariant symbol and weight, monomials
// diagonalize the compression of multiplication-by-f, with
//   lambda_j = int f |z|^{2j} e^{-k v} dmu / int |z|^{2j} e^{-k v} dmu .
// Computed in extended precision (the ratios span e^{-O(k)}).
// ---------------------------------------------------------------------------

struct RadialSymbol {
    enum class Kind { constant, indicator, abslog_capped, pw_linear_in_slope };
    Kind kind = Kind::constant;
    double c = 1.0;                      // constant
    geometry::RadialSet support;         // indicator
    double cap = 1.0;                    // min(|t|/2, cap)
    std::vector<double> s_knots, s_vals; // piecewise linear in slope s = e^t/(1+e^t)

    static RadialSymbol one() { return {}; }
    static RadialSymbol constant(double value);
    static RadialSymbol indicator(geometry::RadialSet S);
    static RadialSymbol abslog_capped(double cap);
    static RadialSymbol pw_linear_in_slope(std::vector<double> s, std::vector<double> v);

    double ess_sup() const;
    bool nonnegative() const;
};

struct DiagonalSpectrum {
    int k = 0;
    // Entry j is -log lambda_j for the monomial z^j (natural log).
    std::vector<double> neg_log;
    SpectralMeasure eta() const;  // atoms at -log(lambda)/k, mass 1/(k+1)
    double neg_log_min_eig() const;          // -log lambda_min
    std::vector<double> sorted_neg_log() const;
};

// Weight: the reference (Fubini-Study) profile handled analytically, or a
// piecewise-linear profile (atomic curvature, exact sums). Profiles must have
// tail slopes exactly 0 and 1.
DiagonalSpectrum diagonal_toeplitz_spectrum(const RadialSymbol& f, int k,
                                            mpfr_prec_t prec = 256);
DiagonalSpectrum diagonal_toeplitz_spectrum(const RadialSymbol& f, const RadialProfile& v,
                                            int k, mpfr_prec_t prec = 256);

// Diagonal Gram moments g_j = int_S |z|^{2j} e^{-k v_FS} dmu_FS, j = 0..k
// (S = whole line when empty optional). Used for the reference-weight Gram
// matrices of rotation-invariant measures.
std::vector<Big> fs_gram_diagonal(int k, const std::optional<geometry::RadialSet>& S,
                                  mpfr_prec_t prec = 256);

// Signed diagonal averages (T_k phi)_j for a bounded rotation-invariant
// function given piecewise-linearly in the slope variable.
std::vector<double> diagonal_toeplitz_averages(const std::vector<double>& s_knots,
                                               const std::vector<double>& s_vals,
                                               int k, mpfr_prec_t prec = 256);

}  // namespace envelab::radial
