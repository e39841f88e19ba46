#pragma once

#include <utility>
#include <vector>

namespace envelab {

// Probability-like measure on the real line: a finite mixture of point masses
// and uniform densities on intervals. Closed under everything the lab
// produces (pushforwards of piecewise-linear functions, empirical spectra).
class SpectralMeasure {
public:
    struct Atom {
        double x, mass;
    };
    struct Segment {
        double lo, hi, mass;  // uniform on [lo, hi]
    };

    SpectralMeasure() = default;
    static SpectralMeasure dirac(double x) { return SpectralMeasure({{x, 1.0}}, {}); }
    static SpectralMeasure empirical(const std::vector<double>& xs);
    SpectralMeasure(std::vector<Atom> atoms, std::vector<Segment> segments);

    double total_mass() const;
    // Integer-order raw moment of |x|.
    double abs_moment(int p) const;
    double moment(int p) const;
    std::pair<double, double> support() const;
    // Right-continuous CDF F(x) = mu((-inf, x]).
    double cdf(double x) const;
    double cdf_left(double x) const;  // F(x-)

    double kolmogorov_distance(const SpectralMeasure& other) const;
    // Levy metric: inf{ eps : F(x-eps)-eps <= G(x) <= F(x+eps)+eps for all x }.
    double levy_distance(const SpectralMeasure& other) const;

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Segment>& segments() const { return segments_; }

private:
    std::vector<double> breakpoints() const;
    std::vector<Atom> atoms_;
    std::vector<Segment> segments_;
};

}  // namespace envelab
