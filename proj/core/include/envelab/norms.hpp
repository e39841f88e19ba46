#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "envelab/geometry.hpp"

namespace envelab::norms {

using Gram = Eigen::MatrixXcd;

// Measures the lab integrates against. `fs_area` is the curvature form of the
// reference metric (total mass 1); `arc_length` is d(theta)/2pi restricted to
// an arc set (full circle has mass 1); `weighted_area` multiplies fs_area by
// a bounded density; `radial_restriction` cuts fs_area to a set in t.
struct MeasureSpec {
    enum class Kind { fs_area, arc_length, weighted_area, radial_restriction };
    Kind kind = Kind::fs_area;
    geometry::ArcSet arcs;
    std::function<double(const geometry::ChartPoint&)> density;
    geometry::RadialSet radial;

    static MeasureSpec fs_area();
    static MeasureSpec arc_length(geometry::ArcSet K = geometry::ArcSet::full_circle());
    static MeasureSpec weighted_area(std::function<double(const geometry::ChartPoint&)> f);
    static MeasureSpec radial_restriction(geometry::RadialSet S);

    bool rotation_invariant() const;
};

struct GramOptions {
    int radial_order = 200;
    int angular_order = 128;
};

// Gram matrix of the monomial basis z^0..z^k: G(i,j) = <z^j, z^i>, entries by
// quadrature; exactly diagonal for rotation-invariant measures with the
// reference weight. Throws on empty measures.
Gram gram(const geometry::WeightPotential& h, const MeasureSpec& mu, int k,
          const GramOptions& opt = {});

// Logarithmic relative spectrum of the pair, nonincreasing:
// lambda_j = sup over j-dim subspaces of inf over the subspace of
// log(norm2/norm1) = half the log of the pencil eigenvalues.
struct RelativeSpectrum {
    Eigen::VectorXd lambda;  // nonincreasing
    double d_p(double p) const;
    double sum() const { return lambda.sum(); }
};

RelativeSpectrum relative_spectrum(const Gram& G1, const Gram& G2);

// Spectrum of the transfer map T with <.,.>_{H1} = <exp(-T) .,.>_{H0}, i.e.
// -log of the (G0,G1) pencil eigenvalues, nonincreasing. Equals twice the
// swapped relative spectrum (norm-level vs form-level scaling).
Eigen::VectorXd transfer_spectrum(const Gram& G0, const Gram& G1);

// Sum of the relative spectrum = (1/2)(logdet G2 - logdet G1); `volume_ratio`
// computes it from the pencil, `volume_ratio_logdet` from Cholesky logdets.
double volume_ratio(const Gram& G1, const Gram& G2);
double volume_ratio_logdet(const Gram& G1, const Gram& G2);

// Normalized Schatten p-norm ((1/dim) Tr |X|^p)^(1/p) of A - B, the operators
// given as matrices in a basis whose inner product has Gram matrix `metric`.
// p = inf gives the operator norm. Rejects p < 1.
double schatten_distance(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, double p,
                         const Gram& metric);

struct TransferReport {
    int k = 0;
    // -log eigenvalues of the compression G0^{-1} G1, via a general (LU-based)
    // eigensolve of the unsymmetrized product.
    Eigen::VectorXd toeplitz_neg_log_spectrum;
    // Transfer-map spectrum of the pair via Cholesky whitening.
    Eigen::VectorXd transfer;
    double max_deviation = 0.0;
    bool pass = false;
};

// Builds the compression of multiplication-by-f from the Gram pair
// (Hilb(h, area), Hilb(h, f · area)) and checks that the spectrum of its -log
// coincides with the transfer spectrum of the pair (two independent
// eigenvalue routes).
TransferReport toeplitz_vs_transfer(const std::function<double(const geometry::ChartPoint&)>& f,
                                    const geometry::WeightPotential& h, int k, double tol = 1e-10,
                                    const GramOptions& opt = {});

}  // namespace envelab::norms
