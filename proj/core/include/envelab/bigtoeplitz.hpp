#pragma once

#include <functional>
#include <string>
#include <vector>

#include "envelab/bigfloat.hpp"
#include "envelab/geometry.hpp"
#include "envelab/spectral_measure.hpp"

namespace envelab::bigtoeplitz {

// Raised when a computation detects that the configured precision cannot
// resolve the request even after the single allowed escalation.
struct PrecisionExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Real bounded piecewise-smooth symbol on the circle, given by segments with
// explicit breakpoints. Closed-world expression set, evaluable in extended
// precision.
class PiecewiseSymbol {
public:
    struct Segment {
        double lo, hi;  // theta range
        // value(theta) for theta in [lo, hi]
        std::function<Big(const Big& theta, mpfr_prec_t)> value;
        bool endpoint_singular = false;  // derivative blow-up at an endpoint
    };

    static PiecewiseSymbol constant(double c);
    static PiecewiseSymbol arc_indicator(const geometry::ArcSet& K);
    // a0 + sum_m (a_m cos m theta + b_m sin m theta)
    static PiecewiseSymbol trig_poly(double a0, std::vector<double> a, std::vector<double> b);
    // |sin(theta/2)|^power  (vanishes only at theta = 0)
    static PiecewiseSymbol abs_sin_half_pow(double power);

    const std::vector<Segment>& segments() const { return segments_; }
    double ess_sup() const { return ess_sup_; }
    bool is_zero() const { return segments_.empty(); }
    const std::string& name() const { return name_; }

private:
    std::vector<Segment> segments_;
    double ess_sup_ = 0.0;
    std::string name_;
};

// Fourier coefficients a_0..a_k of the symbol, a_j = (1/2pi) int f e^{-ij
// theta} d theta, by per-segment quadrature in extended precision (conjugate
// symmetry a_{-j} = conj(a_j) is implied and not stored).
std::vector<BigComplex> fourier_coeffs(const PiecewiseSymbol& f, int k, mpfr_prec_t prec);

struct HermitianToeplitzMatrix {
    int k = 0;                  // dimension is (k+1) x (k+1)
    std::vector<BigComplex> a;  // a[0..k]
    mpfr_prec_t prec = 256;

    static HermitianToeplitzMatrix from_symbol(const PiecewiseSymbol& f, int k, mpfr_prec_t prec);
    static HermitianToeplitzMatrix from_coeffs(std::vector<BigComplex> coeffs, mpfr_prec_t prec);
    // Real trace of T / (k+1) equals a_0.
    const BigComplex& coeff(int j) const { return a[j]; }
};

// Number of eigenvalues strictly below `shift`, via the inertia of the LDL^*
// factorization of T - shift I. Exact zero pivots are retried with a
// deterministic multiplicative jitter shift*(1 +- 2^{-prec/2}), at most three
// times.
int inertia(const HermitianToeplitzMatrix& T, const Big& shift);

struct LogSpectrum {
    int k = 0;
    // Enclosures [lo, hi] of -log(lambda), sorted increasingly (largest
    // eigenvalue first). Widths are below the requested tolerance.
    std::vector<std::pair<double, double>> neg_log;

    std::vector<double> midpoints() const;
    double neg_log_min_eig() const { return 0.5 * (neg_log.back().first + neg_log.back().second); }
    SpectralMeasure eta() const;  // atoms at -log(lambda)/k, mass 1/(k+1)
};

// All eigenvalues located by bisection on -log(lambda) with inertia counts;
// requires a positive spectrum (symbol >= 0, not a.e. zero). The smallest
// eigenvalue is refined to relative width 2^{-32}. `neg_log_upper_hint` seeds
// the search for the smallest eigenvalue (e.g. from a pilot fit); the range
// is expanded automatically if the hint is too small. Escalates the working
// precision once if the pivot dynamic range exhausts the mantissa, then
// throws PrecisionExhausted.
LogSpectrum log_spectrum(const HermitianToeplitzMatrix& T, double tol_log,
                         double ess_sup_symbol, double neg_log_upper_hint = 50.0);

// Smallest eigenvalue only (same bisection machinery, cheaper).
double neg_log_lambda_min(const HermitianToeplitzMatrix& T, double ess_sup_symbol,
                          double neg_log_upper_hint = 50.0, double rel_tol_log = 2.3e-10);

struct DecayFit {
    double c_hat = 0.0;     // slope of -log lambda_min against k
    double stderr_c = 0.0;  // standard error of the slope
    double intercept = 0.0;
};

// Least-squares fit of -log(lambda_min) = c k + b over >= 4 samples with
// strictly increasing k.
DecayFit fit_decay_exponent(const std::vector<std::pair<int, double>>& k_and_neglog);
// Convenience overload taking raw eigenvalues; rejects lambda <= 0.
DecayFit fit_decay_exponent_lambda(const std::vector<std::pair<int, double>>& k_and_lambda);

// Default mantissa policy: max(256, ceil(1.5 * c_guess * k / log 2) + 128).
mpfr_prec_t precision_policy(double c_guess, int k);

}  // namespace envelab::bigtoeplitz
