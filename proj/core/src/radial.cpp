#include "envelab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace envelab::radial {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void dedup_increasing(std::vector<double>& x, std::vector<double>& y, double tol) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!xs.empty() && x[i] - xs.back() <= tol) continue;
        xs.push_back(x[i]);
        ys.push_back(y[i]);
    }
    x.swap(xs);
    y.swap(ys);
}
}  // namespace

// ---------------------------------------------------------------------------
// RadialProfile
// ---------------------------------------------------------------------------

RadialProfile::RadialProfile(std::vector<double> t, std::vector<double> v,
                             double s_left, double s_right, double convexity_tol)
    : t_(std::move(t)), v_(std::move(v)), s_left_(s_left), s_right_(s_right) {
    if (t_.empty() || t_.size() != v_.size())
        throw std::invalid_argument("RadialProfile: empty or mismatched knots");
    for (size_t i = 1; i < t_.size(); ++i)
        if (!(t_[i] > t_[i - 1]))
            throw std::invalid_argument("RadialProfile: knots must be strictly increasing");
    if (s_left_ < -convexity_tol || s_right_ > 1 + convexity_tol || s_left_ > s_right_ + convexity_tol)
        throw std::invalid_argument("RadialProfile: tail slopes outside [0,1]");
    s_left_ = std::clamp(s_left_, 0.0, 1.0);
    s_right_ = std::clamp(s_right_, 0.0, 1.0);
    double prev = s_left_;
    for (size_t i = 1; i < t_.size(); ++i) {
        double s = (v_[i] - v_[i - 1]) / (t_[i] - t_[i - 1]);
        if (s < prev - convexity_tol)
            throw std::invalid_argument("RadialProfile: not convex");
        if (s < -convexity_tol || s > 1 + convexity_tol)
            throw std::invalid_argument("RadialProfile: slope outside [0,1]");
        prev = std::max(prev, s);
    }
    if (s_right_ < prev - convexity_tol)
        throw std::invalid_argument("RadialProfile: right tail slope below last segment");
}

RadialProfile RadialProfile::affine(double value_at_zero, double slope) {
    return RadialProfile({0.0}, {value_at_zero}, slope, slope);
}

RadialProfile RadialProfile::fubini_study(int n, double span) {
    std::vector<double> t(n), v(n);
    const double a = 2.5;
    for (int i = 0; i < n; ++i) {
        double x = -1.0 + 2.0 * i / (n - 1);
        t[i] = span * std::sinh(a * x) / std::sinh(a);
        double ti = t[i];
        v[i] = ti > 30 ? ti + std::log1p(std::exp(-ti)) : std::log1p(std::exp(ti));
    }
    return RadialProfile(std::move(t), std::move(v), 0.0, 1.0);
}

RadialProfile RadialProfile::from_function(const std::function<double(double)>& f,
                                           double t_lo, double t_hi, int n,
                                           double s_left, double s_right) {
    std::vector<double> t(n), v(n);
    for (int i = 0; i < n; ++i) {
        t[i] = t_lo + (t_hi - t_lo) * i / (n - 1);
        v[i] = f(t[i]);
    }
    return RadialProfile(std::move(t), std::move(v), s_left, s_right);
}

double RadialProfile::operator()(double t) const {
    if (t <= t_.front()) return v_.front() + s_left_ * (t - t_.front());
    if (t >= t_.back()) return v_.back() + s_right_ * (t - t_.back());
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    size_t i = it - t_.begin();
    double f = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
    return v_[i - 1] * (1 - f) + v_[i] * f;
}

std::pair<double, double> RadialProfile::subgradient(double t) const {
    auto seg_slope = [&](size_t i) {  // slope of segment [t_i, t_{i+1}]
        return (v_[i + 1] - v_[i]) / (t_[i + 1] - t_[i]);
    };
    if (t < t_.front()) return {s_left_, s_left_};
    if (t > t_.back()) return {s_right_, s_right_};
    size_t n = t_.size();
    // Locate knot or segment.
    auto it = std::lower_bound(t_.begin(), t_.end(), t);
    size_t i = it - t_.begin();
    if (i < n && t_[i] == t) {
        double lo = (i == 0) ? s_left_ : seg_slope(i - 1);
        double hi = (i + 1 == n) ? s_right_ : seg_slope(i);
        return {lo, hi};
    }
    double s = seg_slope(i - 1);
    return {s, s};
}

std::vector<std::pair<double, double>> RadialProfile::curvature_atoms() const {
    std::vector<std::pair<double, double>> atoms;
    size_t n = t_.size();
    for (size_t i = 0; i < n; ++i) {
        double lo = (i == 0) ? s_left_ : (v_[i] - v_[i - 1]) / (t_[i] - t_[i - 1]);
        double hi = (i + 1 == n) ? s_right_ : (v_[i + 1] - v_[i]) / (t_[i + 1] - t_[i]);
        if (hi - lo > 0) atoms.push_back({t_[i], hi - lo});
    }
    return atoms;
}

RadialProfile RadialProfile::shifted(double c) const {
    std::vector<double> v = v_;
    for (double& x : v) x += c;
    return RadialProfile(t_, std::move(v), s_left_, s_right_);
}

double max_abs_difference(const RadialProfile& a, const RadialProfile& b) {
    if (std::abs(a.s_left_ - b.s_left_) > 1e-12 || std::abs(a.s_right_ - b.s_right_) > 1e-12)
        return kInf;
    double m = 0;
    for (double t : a.t_) m = std::max(m, std::abs(a(t) - b(t)));
    for (double t : b.t_) m = std::max(m, std::abs(a(t) - b(t)));
    return m;
}

bool dominated_by(const RadialProfile& a, const RadialProfile& b, double tol) {
    // Tail behavior: a - b tends to +inf iff a's tail slope beats b's in the
    // matching direction.
    if (a.s_left_ < b.s_left_ - 1e-12) return false;
    if (a.s_right_ > b.s_right_ + 1e-12) return false;
    for (double t : a.t_)
        if (a(t) > b(t) + tol) return false;
    for (double t : b.t_)
        if (a(t) > b(t) + tol) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Legendre transform (exact on piecewise-linear data)
// ---------------------------------------------------------------------------

LegendreDual::LegendreDual(std::vector<double> s, std::vector<double> w)
    : s_(std::move(s)), w_(std::move(w)) {
    if (s_.empty() || s_.size() != w_.size())
        throw std::invalid_argument("LegendreDual: empty or mismatched knots");
    for (size_t i = 1; i < s_.size(); ++i)
        if (!(s_[i] > s_[i - 1])) throw std::invalid_argument("LegendreDual: knots not increasing");
}

double LegendreDual::operator()(double s) const {
    const double tol = 1e-12;
    if (s < s_.front() - tol || s > s_.back() + tol)
        throw std::domain_error("LegendreDual: evaluation outside slope domain");
    s = std::clamp(s, s_.front(), s_.back());
    if (s_.size() == 1) return w_.front();
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    size_t i = std::min<size_t>(s_.size() - 1, std::max<size_t>(1, it - s_.begin()));
    double f = (s - s_[i - 1]) / (s_[i] - s_[i - 1]);
    return w_[i - 1] * (1 - f) + w_[i] * f;
}

LegendreDual legendre(const RadialProfile& v) {
    const auto& t = v.knots();
    const auto& w = v.values();
    size_t n = t.size();
    std::vector<double> s, g;
    s.push_back(v.slope_left());
    g.push_back(v.slope_left() * t[0] - w[0]);
    for (size_t i = 0; i + 1 < n; ++i) {
        double sl = (w[i + 1] - w[i]) / (t[i + 1] - t[i]);
        s.push_back(sl);
        g.push_back(sl * t[i + 1] - w[i + 1]);
    }
    s.push_back(v.slope_right());
    g.push_back(v.slope_right() * t[n - 1] - w[n - 1]);
    // Collinear knots create repeated slopes; keep one representative.
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < s.size(); ++i) pts.push_back({s[i], g[i]});
    std::sort(pts.begin(), pts.end());
    std::vector<double> ss, gg;
    for (auto& p : pts) {
        if (!ss.empty() && p.first - ss.back() <= 1e-14) continue;
        ss.push_back(p.first);
        gg.push_back(p.second);
    }
    return LegendreDual(std::move(ss), std::move(gg));
}

RadialProfile legendre_inverse(const LegendreDual& d) {
    const auto& s = d.knots();
    const auto& w = d.values();
    size_t n = s.size();
    if (n == 1) return RadialProfile::affine(-w[0] + s[0] * 0.0, s[0]);
    std::vector<double> t, v;
    for (size_t i = 0; i + 1 < n; ++i) {
        double ti = (w[i + 1] - w[i]) / (s[i + 1] - s[i]);
        t.push_back(ti);
        v.push_back(ti * s[i] - w[i]);
    }
    dedup_increasing(t, v, 1e-13);
    return RadialProfile(std::move(t), std::move(v), s.front(), s.back());
}

// ---------------------------------------------------------------------------
// Envelope: lower convex hull on the constraint set, slopes clamped to [0,1]
// ---------------------------------------------------------------------------

namespace {
RadialProfile envelope_from_points(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    // keep lowest value per t
    std::vector<std::pair<double, double>> uniq;
    for (auto& p : pts) {
        if (!uniq.empty() && p.first - uniq.back().first <= 1e-14) {
            uniq.back().second = std::min(uniq.back().second, p.second);
        } else {
            uniq.push_back(p);
        }
    }
    // Monotone-chain lower hull.
    std::vector<std::pair<double, double>> hull;
    auto pops_middle = [](const std::pair<double, double>& a, const std::pair<double, double>& b,
                          const std::pair<double, double>& c) {
        // b lies on or above the chord a-c: slope(a,b) >= slope(b,c)
        return (b.second - a.second) * (c.first - b.first) >=
               (c.second - b.second) * (b.first - a.first);
    };
    for (auto& p : uniq) {
        while (hull.size() >= 2 && pops_middle(hull[hull.size() - 2], hull.back(), p))
            hull.pop_back();
        hull.push_back(p);
    }
    // Clamp slopes to [0, 1]: keep the vertex range whose incident slopes lie
    // in [0,1]; extend with slope 0 on the left and slope 1 on the right.
    size_t m = hull.size();
    size_t a = 0, b = m - 1;
    while (a + 1 < m) {
        double s = (hull[a + 1].second - hull[a].second) / (hull[a + 1].first - hull[a].first);
        if (s >= 0) break;
        ++a;
    }
    while (b > a) {
        double s = (hull[b].second - hull[b - 1].second) / (hull[b].first - hull[b - 1].first);
        if (s <= 1) break;
        --b;
    }
    std::vector<double> t, v;
    for (size_t i = a; i <= b; ++i) {
        t.push_back(hull[i].first);
        v.push_back(hull[i].second);
    }
    dedup_increasing(t, v, 1e-14);
    return RadialProfile(std::move(t), std::move(v), 0.0, 1.0, 1e-9);
}
}  // namespace

RadialProfile radial_envelope(const RadialProfile& obstacle, const geometry::RadialSet& S_in) {
    geometry::RadialSet S = geometry::density_canonicalize(S_in);
    if (S.empty()) throw std::invalid_argument("radial_envelope: Lebesgue-negligible constraint set");
    double window_lo = obstacle.knots().front() - 100.0;
    double window_hi = obstacle.knots().back() + 100.0;
    std::vector<std::pair<double, double>> pts;
    for (auto [a, b] : S.intervals()) {
        double lo = std::max(a, window_lo);
        double hi = std::min(b, window_hi);
        if (lo > hi) continue;
        pts.push_back({lo, obstacle(lo)});
        pts.push_back({hi, obstacle(hi)});
        for (double t : obstacle.knots())
            if (t > lo && t < hi) pts.push_back({t, obstacle(t)});
    }
    if (pts.empty()) throw std::invalid_argument("radial_envelope: constraint set misses the window");
    return envelope_from_points(std::move(pts));
}

RadialProfile radial_envelope(const std::function<double(double)>& obstacle,
                              const geometry::RadialSet& S_in, int samples_per_interval) {
    geometry::RadialSet S = geometry::density_canonicalize(S_in);
    if (S.empty()) throw std::invalid_argument("radial_envelope: Lebesgue-negligible constraint set");
    std::vector<std::pair<double, double>> pts;
    for (auto [a, b] : S.intervals()) {
        double lo = std::max(a, -60.0);
        double hi = std::min(b, 60.0);
        if (lo > hi) continue;
        for (int i = 0; i < samples_per_interval; ++i) {
            double t = lo + (hi - lo) * i / (samples_per_interval - 1.0);
            pts.push_back({t, obstacle(t)});
        }
    }
    if (pts.empty()) throw std::invalid_argument("radial_envelope: constraint set misses the window");
    return envelope_from_points(std::move(pts));
}

// ---------------------------------------------------------------------------
// Geodesics: linear interpolation of Legendre duals
// ---------------------------------------------------------------------------

namespace {
std::vector<double> merged_knots(const LegendreDual& a, const LegendreDual& b) {
    std::vector<double> s = a.knots();
    for (double x : b.knots()) s.push_back(x);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end(),
                        [](double x, double y) { return y - x <= 1e-14; }),
            s.end());
    return s;
}

void require_same_domain(const LegendreDual& a, const LegendreDual& b, const char* who) {
    if (std::abs(a.s_lo() - b.s_lo()) > 1e-9 || std::abs(a.s_hi() - b.s_hi()) > 1e-9)
        throw std::invalid_argument(std::string(who) + ": profiles have different slope ranges");
}
}  // namespace

RadialProfile geodesic(const RadialProfile& v0, const RadialProfile& v1, double tau) {
    if (tau < 0 || tau > 1) throw std::invalid_argument("geodesic: tau outside [0,1]");
    LegendreDual w0 = legendre(v0), w1 = legendre(v1);
    require_same_domain(w0, w1, "geodesic");
    std::vector<double> s = merged_knots(w0, w1);
    std::vector<double> w(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        double x = std::clamp(s[i], std::max(w0.s_lo(), w1.s_lo()), std::min(w0.s_hi(), w1.s_hi()));
        w[i] = (1 - tau) * w0(x) + tau * w1(x);
    }
    return legendre_inverse(LegendreDual(std::move(s), std::move(w)));
}

GeodesicSpeed geodesic_speed(const RadialProfile& v0, const RadialProfile& v1, double order_tol) {
    if (!dominated_by(v0, v1, order_tol) && !dominated_by(v1, v0, order_tol))
        throw std::invalid_argument("geodesic_speed: profiles are not an ordered pair");
    LegendreDual w0 = legendre(v0), w1 = legendre(v1);
    require_same_domain(w0, w1, "geodesic_speed");
    GeodesicSpeed sp;
    sp.s_ = merged_knots(w0, w1);
    sp.val_.resize(sp.s_.size());
    for (size_t i = 0; i < sp.s_.size(); ++i) {
        double x = std::clamp(sp.s_[i], std::max(w0.s_lo(), w1.s_lo()),
                              std::min(w0.s_hi(), w1.s_hi()));
        sp.val_[i] = w0(x) - w1(x);
    }
    sp.v0_knots_ = v0.knots();
    sp.v0_vals_ = v0.values();
    sp.v0_sl_ = v0.slope_left();
    sp.v0_sr_ = v0.slope_right();
    return sp;
}

std::vector<double> GeodesicSpeed::values(Convention c) const {
    std::vector<double> v = val_;
    if (c == Convention::metric_rate)
        for (double& x : v) x = -x;
    return v;
}

double GeodesicSpeed::at_slope(double s, Convention c) const {
    s = std::clamp(s, s_.front(), s_.back());
    double out;
    if (s_.size() == 1) {
        out = val_.front();
    } else {
        auto it = std::upper_bound(s_.begin(), s_.end(), s);
        size_t i = std::min<size_t>(s_.size() - 1, std::max<size_t>(1, it - s_.begin()));
        double f = (s - s_[i - 1]) / (s_[i] - s_[i - 1]);
        out = val_[i - 1] * (1 - f) + val_[i] * f;
    }
    return c == Convention::metric_rate ? -out : out;
}

double GeodesicSpeed::at_t(double t, Convention c) const {
    RadialProfile v0(v0_knots_, v0_vals_, v0_sl_, v0_sr_);
    auto [lo, hi] = v0.subgradient(t);
    return at_slope(0.5 * (lo + hi), c);
}

double GeodesicSpeed::min_value(Convention c) const {
    auto v = values(c);
    return *std::min_element(v.begin(), v.end());
}

double GeodesicSpeed::max_value(Convention c) const {
    auto v = values(c);
    return *std::max_element(v.begin(), v.end());
}

SpectralMeasure speed_pushforward(const RadialProfile& v0, const RadialProfile& v1,
                                  GeodesicSpeed::Convention c, double flat_tol) {
    GeodesicSpeed sp = geodesic_speed(v0, v1);
    const auto& s = sp.s_knots();
    std::vector<double> val = sp.values(c);
    if (std::abs(s.front() - 0.0) > 1e-9 || std::abs(s.back() - 1.0) > 1e-9)
        throw std::invalid_argument("speed_pushforward: slope domain must be [0,1]");
    std::vector<SpectralMeasure::Atom> atoms;
    std::vector<SpectralMeasure::Segment> segs;
    if (s.size() == 1) return SpectralMeasure::dirac(val[0]);
    double scale = 1.0;
    for (double x : val) scale = std::max(scale, std::abs(x));
    for (size_t i = 0; i + 1 < s.size(); ++i) {
        double mass = s[i + 1] - s[i];
        if (mass <= 0) continue;
        double a = val[i], b = val[i + 1];
        if (std::abs(b - a) <= flat_tol * scale) {
            atoms.push_back({0.5 * (a + b), mass});
        } else {
            segs.push_back({std::min(a, b), std::max(a, b), mass});
        }
    }
    return SpectralMeasure(std::move(atoms), std::move(segs));
}

// ---------------------------------------------------------------------------
// Diagonal compressions in extended precision
// ---------------------------------------------------------------------------

RadialSymbol RadialSymbol::constant(double value) {
    RadialSymbol f;
    f.kind = Kind::constant;
    f.c = value;
    return f;
}
RadialSymbol RadialSymbol::indicator(geometry::RadialSet S) {
    RadialSymbol f;
    f.kind = Kind::indicator;
    f.support = std::move(S);
    return f;
}
RadialSymbol RadialSymbol::abslog_capped(double cap) {
    RadialSymbol f;
    f.kind = Kind::abslog_capped;
    f.cap = cap;
    return f;
}
RadialSymbol RadialSymbol::pw_linear_in_slope(std::vector<double> s, std::vector<double> v) {
    RadialSymbol f;
    f.kind = Kind::pw_linear_in_slope;
    f.s_knots = std::move(s);
    f.s_vals = std::move(v);
    return f;
}

double RadialSymbol::ess_sup() const {
    switch (kind) {
        case Kind::constant: return c;
        case Kind::indicator: return 1.0;
        case Kind::abslog_capped: return cap;
        case Kind::pw_linear_in_slope: {
            double m = 0;
            for (double v : s_vals) m = std::max(m, std::abs(v));
            return m;
        }
    }
    return 0;
}

bool RadialSymbol::nonnegative() const {
    if (kind == Kind::constant) return c >= 0;
    if (kind == Kind::pw_linear_in_slope) {
        for (double v : s_vals)
            if (v < 0) return false;
    }
    return true;
}

namespace {

// Exact B(j+1, k-j+1) = j! (k-j)! / (k+1)!.
Big beta_exact(int j, int k, mpfr_prec_t prec) {
    Big num(1.0, prec), den(1.0, prec);
    for (int i = 2; i <= j; ++i) num *= Big((double)i, prec);
    for (int i = 2; i <= k - j; ++i) num *= Big((double)i, prec);
    for (int i = 2; i <= k + 1; ++i) den *= Big((double)i, prec);
    return num / den;
}

// t = log(x / (1-x)) in big precision.
Big t_of_x(const Big& x, mpfr_prec_t prec) {
    Big one(1.0, prec);
    return log(x) - log(one - x);
}

// Symbol value at the point with slope coordinate x in (0,1).
Big symbol_value(const RadialSymbol& f, const Big& x, mpfr_prec_t prec) {
    switch (f.kind) {
        case RadialSymbol::Kind::constant:
            return Big(f.c, prec);
        case RadialSymbol::Kind::indicator: {
            double t = t_of_x(x, prec).to_double();
            return Big(f.support.contains(t) ? 1.0 : 0.0, prec);
        }
        case RadialSymbol::Kind::abslog_capped: {
            Big t = t_of_x(x, prec);
            Big half = abs(t) * Big(0.5, prec);
            Big capb(f.cap, prec);
            return min(half, capb);
        }
        case RadialSymbol::Kind::pw_linear_in_slope: {
            double xs = x.to_double();
            const auto& sk = f.s_knots;
            const auto& sv = f.s_vals;
            if (xs <= sk.front()) return Big(sv.front(), prec);
            if (xs >= sk.back()) return Big(sv.back(), prec);
            auto it = std::upper_bound(sk.begin(), sk.end(), xs);
            size_t i = it - sk.begin();
            double fr = (xs - sk[i - 1]) / (sk[i] - sk[i - 1]);
            return Big(sv[i - 1] * (1 - fr) + sv[i] * fr, prec);
        }
    }
    return Big(prec);
}

double x_of_t(double t) {
    if (t > 700) return 1.0;
    if (t < -700) return 0.0;
    double e = std::exp(t);
    return e / (1.0 + e);
}

// Breakpoints in x where the symbol is non-smooth (segment ends, kinks,
// sign changes along linear pieces).
std::vector<double> symbol_breakpoints_x(const RadialSymbol& f) {
    std::vector<double> b;
    switch (f.kind) {
        case RadialSymbol::Kind::constant:
            break;
        case RadialSymbol::Kind::indicator:
            for (auto [a, c] : f.support.intervals()) {
                if (std::isfinite(a)) b.push_back(x_of_t(a));
                if (std::isfinite(c)) b.push_back(x_of_t(c));
            }
            break;
        case RadialSymbol::Kind::abslog_capped:
            b.push_back(0.5);  // t = 0
            b.push_back(x_of_t(2 * f.cap));
            b.push_back(x_of_t(-2 * f.cap));
            break;
        case RadialSymbol::Kind::pw_linear_in_slope:
            for (size_t i = 0; i < f.s_knots.size(); ++i) {
                b.push_back(f.s_knots[i]);
                if (i + 1 < f.s_knots.size()) {
                    double va = f.s_vals[i], vb = f.s_vals[i + 1];
                    if (va * vb < 0)  // sign change inside the piece
                        b.push_back(f.s_knots[i] +
                                    (f.s_knots[i + 1] - f.s_knots[i]) * va / (va - vb));
                }
            }
            break;
    }
    return b;
}

// Integral over (0,1) of f(x) x^j (1-x)^{k-j} dx, panels split at the kernel
// mode and the symbol's breakpoints.
Big beta_kernel_integral(const RadialSymbol& f, int j, int k, mpfr_prec_t prec) {
    std::vector<double> pts = symbol_breakpoints_x(f);
    pts.push_back(0.0);
    pts.push_back(1.0);
    double mode = std::clamp((double)j / std::max(1, k), 1e-6, 1.0 - 1e-6);
    pts.push_back(mode);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return b - a <= 1e-15; }),
              pts.end());
    Big one(1.0, prec);
    auto integrand = [&](const Big& x) -> Big {
        if (x <= Big(0.0, prec) || x >= one) return Big(prec);
        Big fx = symbol_value(f, x, prec);
        if (fx.is_zero()) return Big(prec);
        return fx * pow_si(x, j) * pow_si(one - x, k - j);
    };
    Big total(prec);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] - pts[i] <= 1e-300) continue;
        // Skip panels where an indicator symbol vanishes identically.
        if (f.kind == RadialSymbol::Kind::indicator) {
            double tm = std::log(0.5 * (pts[i] + pts[i + 1])) -
                        std::log1p(-0.5 * (pts[i] + pts[i + 1]));
            if (!f.support.contains(tm, 1e-13)) continue;
        }
        total += tanh_sinh(integrand, Big(pts[i], prec), Big(pts[i + 1], prec), prec, 1e-30, 11);
    }
    return total;
}

}  // namespace

SpectralMeasure DiagonalSpectrum::eta() const {
    std::vector<double> xs(neg_log.size());
    for (size_t j = 0; j < neg_log.size(); ++j) xs[j] = neg_log[j] / k;
    return SpectralMeasure::empirical(xs);
}

double DiagonalSpectrum::neg_log_min_eig() const {
    return *std::max_element(neg_log.begin(), neg_log.end());
}

std::vector<double> DiagonalSpectrum::sorted_neg_log() const {
    std::vector<double> s = neg_log;
    std::sort(s.begin(), s.end());
    return s;
}

DiagonalSpectrum diagonal_toeplitz_spectrum(const RadialSymbol& f, int k, mpfr_prec_t prec) {
    if (k < 1) throw std::invalid_argument("diagonal_toeplitz_spectrum: k must be >= 1");
    if (!f.nonnegative()) throw std::invalid_argument("diagonal_toeplitz_spectrum: symbol must be >= 0");
    if (f.kind == RadialSymbol::Kind::constant && f.c <= 0)
        throw std::invalid_argument("diagonal_toeplitz_spectrum: symbol vanishes identically");
    if (f.kind == RadialSymbol::Kind::indicator && f.support.empty())
        throw std::invalid_argument("diagonal_toeplitz_spectrum: symbol vanishes identically");
    DiagonalSpectrum out;
    out.k = k;
    out.neg_log.resize(k + 1);
    for (int j = 0; j <= k; ++j) {
        Big num = beta_kernel_integral(f, j, k, prec);
        Big den = beta_exact(j, k, prec);
        if (!(num > Big(0.0, prec)))
            throw std::runtime_error("diagonal_toeplitz_spectrum: vanishing moment at j=" +
                                     std::to_string(j));
        out.neg_log[j] = -(log(num) - log(den)).to_double();
    }
    return out;
}

DiagonalSpectrum diagonal_toeplitz_spectrum(const RadialSymbol& f, const RadialProfile& v,
                                            int k, mpfr_prec_t prec) {
    if (k < 1) throw std::invalid_argument("diagonal_toeplitz_spectrum: k must be >= 1");
    if (std::abs(v.slope_left()) > 1e-12 || std::abs(v.slope_right() - 1.0) > 1e-12)
        throw std::invalid_argument(
            "diagonal_toeplitz_spectrum: profile must have tail slopes 0 and 1");
    auto atoms = v.curvature_atoms();
    if (atoms.empty()) throw std::invalid_argument("diagonal_toeplitz_spectrum: flat profile");
    DiagonalSpectrum out;
    out.k = k;
    out.neg_log.resize(k + 1);
    for (int j = 0; j <= k; ++j) {
        Big num(prec), den(prec);
        for (auto [t, m] : atoms) {
            Big w = exp(Big(j * t - k * v(t), prec)) * Big(m, prec);
            den += w;
            double fv;
            switch (f.kind) {
                case RadialSymbol::Kind::constant: fv = f.c; break;
                case RadialSymbol::Kind::indicator: fv = f.support.contains(t) ? 1.0 : 0.0; break;
                case RadialSymbol::Kind::abslog_capped: fv = std::min(std::abs(t) / 2, f.cap); break;
                default: {
                    double x = x_of_t(t);
                    Big xb(x, prec);
                    fv = symbol_value(f, xb, prec).to_double();
                }
            }
            if (fv != 0.0) num += Big(fv, prec) * w;
        }
        if (!(num > Big(0.0, prec)))
            throw std::runtime_error("diagonal_toeplitz_spectrum: vanishing moment at j=" +
                                     std::to_string(j));
        out.neg_log[j] = -(log(num) - log(den)).to_double();
    }
    return out;
}

std::vector<Big> fs_gram_diagonal(int k, const std::optional<geometry::RadialSet>& S,
                                  mpfr_prec_t prec) {
    std::vector<Big> g;
    g.reserve(k + 1);
    if (!S) {
        for (int j = 0; j <= k; ++j) g.push_back(beta_exact(j, k, prec));
        return g;
    }
    RadialSymbol ind = RadialSymbol::indicator(*S);
    for (int j = 0; j <= k; ++j) g.push_back(beta_kernel_integral(ind, j, k, prec));
    return g;
}

std::vector<double> diagonal_toeplitz_averages(const std::vector<double>& s_knots,
                                               const std::vector<double>& s_vals,
                                               int k, mpfr_prec_t prec) {
    RadialSymbol f = RadialSymbol::pw_linear_in_slope(s_knots, s_vals);
    std::vector<double> out(k + 1);
    for (int j = 0; j <= k; ++j) {
        Big num = beta_kernel_integral(f, j, k, prec);
        Big den = beta_exact(j, k, prec);
        out[j] = (num / den).to_double();
    }
    return out;
}

}  // namespace envelab::radial
