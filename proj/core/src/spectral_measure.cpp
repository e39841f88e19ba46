#include "envelab/spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace envelab {

SpectralMeasure::SpectralMeasure(std::vector<Atom> atoms, std::vector<Segment> segments) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    for (auto& a : atoms) {
        if (a.mass <= 0) continue;
        if (!atoms_.empty() && std::abs(a.x - atoms_.back().x) <= 1e-15 * (1.0 + std::abs(a.x))) {
            atoms_.back().mass += a.mass;
        } else {
            atoms_.push_back(a);
        }
    }
    for (auto& s : segments) {
        if (s.mass <= 0) continue;
        if (!(s.hi > s.lo)) throw std::invalid_argument("SpectralMeasure: degenerate segment");
        segments_.push_back(s);
    }
    std::sort(segments_.begin(), segments_.end(),
              [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
}

SpectralMeasure SpectralMeasure::empirical(const std::vector<double>& xs) {
    std::vector<Atom> atoms;
    atoms.reserve(xs.size());
    double m = 1.0 / xs.size();
    for (double x : xs) atoms.push_back({x, m});
    return SpectralMeasure(std::move(atoms), {});
}

double SpectralMeasure::total_mass() const {
    double m = 0;
    for (auto& a : atoms_) m += a.mass;
    for (auto& s : segments_) m += s.mass;
    return m;
}

namespace {
// int_lo^hi |x|^p dx for integer p >= 0.
double abs_power_integral(double lo, double hi, int p) {
    auto prim = [p](double x) {  // primitive of |x|^p
        double a = std::pow(std::abs(x), p + 1) / (p + 1);
        return x >= 0 ? a : -a;
    };
    return prim(hi) - prim(lo);
}
double power_integral(double lo, double hi, int p) {
    auto prim = [p](double x) { return std::pow(x, p + 1) / (p + 1); };
    return prim(hi) - prim(lo);
}
}  // namespace

double SpectralMeasure::abs_moment(int p) const {
    if (p < 0) throw std::invalid_argument("abs_moment: p must be >= 0");
    double m = 0;
    for (auto& a : atoms_) m += a.mass * std::pow(std::abs(a.x), p);
    for (auto& s : segments_) m += s.mass / (s.hi - s.lo) * abs_power_integral(s.lo, s.hi, p);
    return m;
}

double SpectralMeasure::moment(int p) const {
    if (p < 0) throw std::invalid_argument("moment: p must be >= 0");
    double m = 0;
    for (auto& a : atoms_) m += a.mass * std::pow(a.x, p);
    for (auto& s : segments_) m += s.mass / (s.hi - s.lo) * power_integral(s.lo, s.hi, p);
    return m;
}

std::pair<double, double> SpectralMeasure::support() const {
    double lo = 1e300, hi = -1e300;
    for (auto& a : atoms_) {
        lo = std::min(lo, a.x);
        hi = std::max(hi, a.x);
    }
    for (auto& s : segments_) {
        lo = std::min(lo, s.lo);
        hi = std::max(hi, s.hi);
    }
    if (lo > hi) throw std::domain_error("support: empty measure");
    return {lo, hi};
}

double SpectralMeasure::cdf(double x) const {
    double m = 0;
    for (auto& a : atoms_)
        if (a.x <= x) m += a.mass;
    for (auto& s : segments_) {
        if (x >= s.hi) m += s.mass;
        else if (x > s.lo) m += s.mass * (x - s.lo) / (s.hi - s.lo);
    }
    return m;
}

double SpectralMeasure::cdf_left(double x) const {
    double m = 0;
    for (auto& a : atoms_)
        if (a.x < x) m += a.mass;
    for (auto& s : segments_) {
        if (x >= s.hi) m += s.mass;
        else if (x > s.lo) m += s.mass * (x - s.lo) / (s.hi - s.lo);
    }
    return m;
}

std::vector<double> SpectralMeasure::breakpoints() const {
    std::vector<double> b;
    for (auto& a : atoms_) b.push_back(a.x);
    for (auto& s : segments_) {
        b.push_back(s.lo);
        b.push_back(s.hi);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

double SpectralMeasure::kolmogorov_distance(const SpectralMeasure& other) const {
    std::vector<double> pts = breakpoints();
    for (double x : other.breakpoints()) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double d = 0;
    for (double x : pts) {
        d = std::max(d, std::abs(cdf(x) - other.cdf(x)));
        d = std::max(d, std::abs(cdf_left(x) - other.cdf_left(x)));
    }
    return d;
}

double SpectralMeasure::levy_distance(const SpectralMeasure& other) const {
    auto violated = [&](double eps) {
        auto check = [&](const SpectralMeasure& F, const SpectralMeasure& G) {
            // need G(x) <= F(x+eps)+eps and G(x) >= F(x-eps)-eps for all x
            std::vector<double> pts = G.breakpoints();
            for (double x : F.breakpoints()) {
                pts.push_back(x - eps);
                pts.push_back(x + eps);
            }
            for (double x : pts) {
                for (double xx : {x, std::nextafter(x, -1e300)}) {
                    if (G.cdf(xx) > F.cdf(xx + eps) + eps + 1e-12) return true;
                    if (G.cdf(xx) < F.cdf_left(xx - eps) - eps - 1e-12) return true;
                }
            }
            return false;
        };
        return check(*this, other) || check(other, *this);
    };
    double lo = 0.0, hi = 1.0;
    auto sup1 = support(), sup2 = other.support();
    hi = std::max(1.0, std::max(std::abs(sup1.second - sup2.first), std::abs(sup2.second - sup1.first)));
    if (!violated(0.0)) return 0.0;
    for (int i = 0; i < 60 && hi - lo > 1e-12; ++i) {
        double mid = 0.5 * (lo + hi);
        if (violated(mid)) lo = mid;
        else hi = mid;
    }
    return hi;
}

}  // namespace envelab
