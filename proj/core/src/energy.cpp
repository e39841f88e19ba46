#include "envelab/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace envelab::energy {

using radial::RadialProfile;

namespace {
void require_matching_tails(const RadialProfile& u, const RadialProfile& v) {
    if (std::abs(u.slope_left() - v.slope_left()) > 1e-10 ||
        std::abs(u.slope_right() - v.slope_right()) > 1e-10)
        throw std::invalid_argument("energy: potentials have unbounded difference (tail slopes differ)");
}

double integrate_against_curvature(const RadialProfile& diff_a, const RadialProfile& diff_b,
                                   const RadialProfile& w) {
    // int (a - b) d omega_w, exact for piecewise-linear data.
    double s = 0;
    for (auto [t, m] : w.curvature_atoms()) s += m * (diff_a(t) - diff_b(t));
    double t_lo = std::min(diff_a.knots().front(), std::min(diff_b.knots().front(), w.knots().front())) - 10.0;
    double t_hi = std::max(diff_a.knots().back(), std::max(diff_b.knots().back(), w.knots().back())) + 10.0;
    s += w.slope_left() * (diff_a(t_lo) - diff_b(t_lo));
    s += (1.0 - w.slope_right()) * (diff_a(t_hi) - diff_b(t_hi));
    return s;
}
}  // namespace

double energy_diff(const RadialProfile& u, const RadialProfile& v) {
    require_matching_tails(u, v);
    return 0.5 * (integrate_against_curvature(u, v, u) + integrate_against_curvature(u, v, v));
}

double energy_diff_dual(const RadialProfile& u, const RadialProfile& v) {
    require_matching_tails(u, v);
    radial::LegendreDual du = radial::legendre(u), dv = radial::legendre(v);
    // Merge knot sets; both duals are piecewise linear so the trapezoid rule
    // on merged knots is exact.
    std::vector<double> s = du.knots();
    for (double x : dv.knots()) s.push_back(x);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    double lo = std::max(du.s_lo(), dv.s_lo()), hi = std::min(du.s_hi(), dv.s_hi());
    double acc = 0;
    for (size_t i = 0; i + 1 < s.size(); ++i) {
        double a = std::max(lo, s[i]), b = std::min(hi, s[i + 1]);
        if (b <= a) continue;
        double fa = du(a) - dv(a), fb = du(b) - dv(b);
        acc += 0.5 * (fa + fb) * (b - a);
    }
    return -acc;
}

double energy_diff_grid(const std::function<double(double)>& u_of_t,
                        const std::function<double(double)>& v_of_t,
                        double t_span, int n) {
    // Curvature density in t of a rotation-invariant full potential is w'',
    // plus boundary masses given by the tail slopes; finite differences on a
    // uniform grid.
    double h = 2.0 * t_span / n;
    auto second = [&](const std::function<double(double)>& f, double t) {
        return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    };
    double acc = 0;
    for (int i = 1; i < n; ++i) {
        double t = -t_span + i * h;
        double d = u_of_t(t) - v_of_t(t);
        acc += 0.5 * d * (second(u_of_t, t) + second(v_of_t, t)) * h;
    }
    // Tail slopes from one-sided differences at the window ends.
    auto slope = [&](const std::function<double(double)>& f, double t, double dir) {
        return (f(t + dir * h) - f(t)) / (dir * h);
    };
    double sl_u = slope(u_of_t, -t_span, 1.0), sl_v = slope(v_of_t, -t_span, 1.0);
    double sr_u = slope(u_of_t, t_span, -1.0), sr_v = slope(v_of_t, t_span, -1.0);
    double d_lo = u_of_t(-t_span) - v_of_t(-t_span);
    double d_hi = u_of_t(t_span) - v_of_t(t_span);
    acc += 0.5 * (sl_u + sl_v) * d_lo;
    acc += 0.5 * ((1.0 - sr_u) + (1.0 - sr_v)) * d_hi;
    return acc;
}

double d1_distance(const RadialProfile& h0, const RadialProfile& h1, double order_tol) {
    if (!radial::dominated_by(h0, h1, order_tol) && !radial::dominated_by(h1, h0, order_tol))
        throw std::invalid_argument("d1_distance: potentials are not an ordered pair");
    return std::abs(energy_diff(h0, h1));
}

double dp_distance_radial(const RadialProfile& v0, const RadialProfile& v1, double p) {
    if (p < 1) throw std::invalid_argument("dp_distance_radial: p must be >= 1");
    SpectralMeasure law = radial::speed_pushforward(v0, v1);
    if (p == std::floor(p) && p <= 8) {
        return std::pow(law.abs_moment((int)p), 1.0 / p);
    }
    throw std::invalid_argument("dp_distance_radial: only small integer p supported");
}

}  // namespace envelab::energy
