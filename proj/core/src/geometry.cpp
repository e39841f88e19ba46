#include "envelab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace envelab::geometry {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0) t += kTwoPi;
    // Guard against fmod returning exactly 2pi after the correction.
    if (t >= kTwoPi) t -= kTwoPi;
    return t;
}
}  // namespace

ChartPoint ChartPoint::from_polar(double r, double theta) {
    return affine(std::polar(r, theta));
}

ChartPoint ChartPoint::other_chart() const {
    if (z == std::complex<double>(0.0, 0.0))
        throw std::domain_error("chart origin has no representation in the other chart");
    return {chart == Chart::affine ? Chart::infinity : Chart::affine, 1.0 / z};
}

ChartPoint ChartPoint::normalized() const {
    if (std::abs(z) <= 1.0) return *this;
    return other_chart();
}

double ChartPoint::log_abs_sq_affine() const {
    double t = 2.0 * std::log(std::abs(z));
    return chart == Chart::affine ? t : -t;
}

double fs_potential(const ChartPoint& p) {
    return std::log1p(std::norm(p.z));
}

double fs_curvature_density(std::complex<double> z) {
    double d = 1.0 + std::norm(z);
    return 1.0 / (std::numbers::pi * d * d);
}

Rule1D circle_rule(int order) {
    if (order < 2) throw std::invalid_argument("circle_rule: order must be >= 2");
    int n = order + 1;
    Rule1D r;
    r.nodes.resize(n);
    r.weights.assign(n, kTwoPi / n);
    for (int i = 0; i < n; ++i) r.nodes[i] = kTwoPi * i / n;
    return r;
}

Rule1D gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    // Newton iteration from the Chebyshev-angle initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.nodes[i] = -x;
        r.weights[i] = w;
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

Rule1D radial_rule(int order) {
    if (order < 2) throw std::invalid_argument("radial_rule: order must be >= 2");
    Rule1D gl = gauss_legendre(order);
    Rule1D r;
    r.nodes.resize(order);
    r.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double u = 0.5 * (gl.nodes[i] + 1.0);  // in (0,1)
        double wu = 0.5 * gl.weights[i];
        double rr = std::sqrt(u / (1.0 - u));
        // dr/du = 1 / (2 sqrt(u) (1-u)^{3/2})
        double drdu = 1.0 / (2.0 * std::sqrt(u) * std::pow(1.0 - u, 1.5));
        r.nodes[i] = rr;
        r.weights[i] = wu * drdu;
    }
    return r;
}

Rule2D product_rule(int radial_order, int angular_order) {
    return Rule2D{radial_rule(radial_order), circle_rule(angular_order)};
}

// ---------------------------------------------------------------------------
// ArcSet
// ---------------------------------------------------------------------------

ArcSet ArcSet::arc(double center, double half_angle) {
    if (half_angle <= 0) throw std::invalid_argument("arc: half_angle must be positive");
    if (half_angle >= std::numbers::pi) return full_circle();
    return from_intervals({{center - half_angle, center + half_angle}});
}

ArcSet ArcSet::full_circle() {
    ArcSet a;
    a.arcs_ = {{0.0, kTwoPi}};
    return a;
}

ArcSet ArcSet::from_intervals(std::vector<std::pair<double, double>> arcs) {
    std::vector<std::pair<double, double>> doubled;
    for (auto [lo, hi] : arcs) {
        if (hi < lo) throw std::invalid_argument("ArcSet: arc with hi < lo");
        if (hi - lo >= kTwoPi) return full_circle();
        double l = wrap_angle(lo);
        double len = hi - lo;
        for (int shift = 0; shift < 3; ++shift)
            doubled.push_back({l + shift * kTwoPi, l + len + shift * kTwoPi});
    }
    std::sort(doubled.begin(), doubled.end());
    std::vector<std::pair<double, double>> merged;
    for (auto& a : doubled) {
        if (!merged.empty() && a.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, a.second);
        } else {
            merged.push_back(a);
        }
    }
    // Each circular component appears exactly once with start in [2pi, 4pi);
    // shift those back to get the canonical decomposition.
    std::vector<std::pair<double, double>> canon;
    double measure = 0.0;
    for (auto& a : merged) {
        if (a.first >= kTwoPi && a.first < 2 * kTwoPi) {
            double len = std::min(a.second - a.first, kTwoPi);
            canon.push_back({a.first - kTwoPi, a.first - kTwoPi + len});
            measure += len;
        }
    }
    if (measure >= kTwoPi) return full_circle();
    std::sort(canon.begin(), canon.end());
    ArcSet out;
    out.arcs_ = std::move(canon);
    return out;
}

bool ArcSet::is_full_circle() const {
    return arcs_.size() == 1 && arcs_[0].second - arcs_[0].first >= kTwoPi;
}

double ArcSet::total_measure() const {
    double m = 0.0;
    for (auto& a : arcs_) m += a.second - a.first;
    return std::min(m, kTwoPi);
}

bool ArcSet::contains(double theta, double tol) const {
    double t = wrap_angle(theta);
    for (auto& a : arcs_) {
        if (t >= a.first - tol && t <= a.second + tol) return true;
        if (t + kTwoPi >= a.first - tol && t + kTwoPi <= a.second + tol) return true;
    }
    return false;
}

ArcSet ArcSet::rotated(double phi) const {
    if (is_full_circle()) return *this;
    std::vector<std::pair<double, double>> arcs;
    for (auto& a : arcs_) arcs.push_back({a.first + phi, a.second + phi});
    return from_intervals(std::move(arcs));
}

std::pair<double, double> ArcSet::enclosing_arc() const {
    if (empty()) throw std::domain_error("enclosing_arc: empty set");
    if (is_full_circle()) return {0.0, std::numbers::pi};
    // The complement's largest gap determines the smallest enclosing arc.
    double best_gap = -1.0, gap_start = 0.0;
    size_t n = arcs_.size();
    for (size_t i = 0; i < n; ++i) {
        double end_i = arcs_[i].second;
        double start_next = (i + 1 < n) ? arcs_[i + 1].first : arcs_[0].first + kTwoPi;
        double gap = start_next - end_i;
        if (gap > best_gap) {
            best_gap = gap;
            gap_start = end_i;
        }
    }
    double lo = gap_start + best_gap;         // start of the enclosing arc
    double hi = gap_start + kTwoPi;           // end of it
    double center = wrap_angle(0.5 * (lo + hi));
    double half = 0.5 * (hi - lo);
    return {center, half};
}

// ---------------------------------------------------------------------------
// RadialSet
// ---------------------------------------------------------------------------

RadialSet RadialSet::from_intervals(std::vector<std::pair<double, double>> iv) {
    for (auto& p : iv)
        if (p.second < p.first) throw std::invalid_argument("RadialSet: interval with hi < lo");
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> merged;
    for (auto& a : iv) {
        if (!merged.empty() && a.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, a.second);
        } else {
            merged.push_back(a);
        }
    }
    RadialSet out;
    out.iv_ = std::move(merged);
    return out;
}

RadialSet RadialSet::half_line_geq(double t0) {
    return from_intervals({{t0, std::numeric_limits<double>::infinity()}});
}

RadialSet RadialSet::whole_line() {
    return from_intervals({{-std::numeric_limits<double>::infinity(),
                            std::numeric_limits<double>::infinity()}});
}

double RadialSet::total_measure() const {
    double m = 0.0;
    for (auto& a : iv_) m += a.second - a.first;
    return m;
}

bool RadialSet::contains(double t, double tol) const {
    for (auto& a : iv_)
        if (t >= a.first - tol && t <= a.second + tol) return true;
    return false;
}

ArcSet density_canonicalize(const ArcSet& a) {
    if (a.empty()) return a;
    if (a.is_full_circle()) return a;
    std::vector<std::pair<double, double>> keep;
    for (auto& arc : a.arcs())
        if (arc.second - arc.first > 0.0) keep.push_back(arc);
    if (keep.empty()) return ArcSet();
    return ArcSet::from_intervals(std::move(keep));
}

RadialSet density_canonicalize(const RadialSet& a) {
    std::vector<std::pair<double, double>> keep;
    for (auto& iv : a.intervals())
        if (iv.second - iv.first > 0.0) keep.push_back(iv);
    if (keep.empty()) return RadialSet();
    return RadialSet::from_intervals(std::move(keep));
}

// ---------------------------------------------------------------------------
// WeightPotential
// ---------------------------------------------------------------------------

WeightPotential WeightPotential::fubini_study() {
    WeightPotential w;
    w.analytic_zero_ = true;
    w.tag_ = Smoothness::smooth;
    return w;
}

WeightPotential WeightPotential::from_function(std::function<double(const ChartPoint&)> phi,
                                               int n_radial, int n_angular, Smoothness tag) {
    if (n_radial < 8 || n_angular < 8)
        throw std::invalid_argument("WeightPotential: grid too coarse");
    WeightPotential w;
    w.analytic_zero_ = false;
    w.tag_ = tag;
    w.n_radial_ = n_radial;
    w.n_angular_ = n_angular;
    // Radial knots in t = log|coord|^2 over [-T, log 4], sinh-stretched so the
    // mesh concentrates near t = 0 (|coord| = 1) where envelopes kink.
    const double t_hi = std::log(4.0);
    const double t_lo = -40.0;
    w.t_knots_.resize(n_radial);
    const double a = 3.0;
    for (int i = 0; i < n_radial; ++i) {
        double x = -1.0 + 2.0 * i / (n_radial - 1);
        double s = std::sinh(a * x) / std::sinh(a);  // in [-1,1], dense near 0
        // map [-1,0] -> [t_lo, 0] and [0,1] -> [0, t_hi]
        w.t_knots_[i] = (s < 0) ? -s * t_lo : s * t_hi;
    }
    std::sort(w.t_knots_.begin(), w.t_knots_.end());
    for (int chart = 0; chart < 2; ++chart) {
        w.values_[chart].resize((size_t)n_radial * n_angular);
        for (int i = 0; i < n_radial; ++i) {
            double r = std::exp(0.5 * w.t_knots_[i]);
            for (int j = 0; j < n_angular; ++j) {
                double theta = kTwoPi * j / n_angular;
                ChartPoint p{chart == 0 ? Chart::affine : Chart::infinity,
                             std::polar(r, theta)};
                w.values_[chart][(size_t)i * n_angular + j] = phi(p);
            }
        }
    }
    return w;
}

double WeightPotential::interp(int chart, double t, double theta) const {
    const auto& tk = t_knots_;
    if (t <= tk.front()) t = tk.front();
    if (t >= tk.back()) t = tk.back();
    auto it = std::upper_bound(tk.begin(), tk.end(), t);
    size_t i1 = std::min<size_t>(tk.size() - 1, std::max<size_t>(1, it - tk.begin()));
    size_t i0 = i1 - 1;
    double ft = (t - tk[i0]) / (tk[i1] - tk[i0]);

    double th = wrap_angle(theta);
    double step = kTwoPi / n_angular_;
    size_t j0 = std::min<size_t>(n_angular_ - 1, (size_t)(th / step));
    size_t j1 = (j0 + 1) % n_angular_;
    double fth = (th - j0 * step) / step;

    auto v = [&](size_t i, size_t j) { return values_[chart][i * n_angular_ + j]; };
    double a = v(i0, j0) * (1 - fth) + v(i0, j1) * fth;
    double b = v(i1, j0) * (1 - fth) + v(i1, j1) * fth;
    return a * (1 - ft) + b * ft;
}

double WeightPotential::relative_potential(const ChartPoint& p) const {
    if (analytic_zero_) return 0.0;
    ChartPoint q = p.normalized();
    int chart = q.chart == Chart::affine ? 0 : 1;
    double t = 2.0 * std::log(std::max(1e-300, std::abs(q.z)));
    double theta = std::arg(q.z);
    return interp(chart, t, theta);
}

double WeightPotential::full_potential(const ChartPoint& p) const {
    return fs_potential(p) + relative_potential(p);
}

double WeightPotential::chart_overlap_discrepancy() const {
    if (analytic_zero_) return 0.0;
    double worst = 0.0;
    for (int ir = 0; ir <= 24; ++ir) {
        double r = 0.5 * std::pow(4.0, ir / 24.0);  // r in [1/2, 2]
        for (int j = 0; j < 64; ++j) {
            double theta = kTwoPi * j / 64;
            double t = 2.0 * std::log(r);
            double a = interp(0, t, theta);
            // Same point in the infinity chart: w = 1/z, |w| = 1/r, arg = -theta.
            double b = interp(1, -t, -theta);
            worst = std::max(worst, std::abs(a - b));
        }
    }
    return worst;
}

}  // namespace envelab::geometry
