#include "envelab/extremal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "envelab/parallel.hpp"

namespace envelab::extremal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Complex value carried as unit-direction plus log-magnitude, for basis
// evaluations whose entries span hundreds of orders of magnitude.
struct ScaledC {
    std::complex<double> dir{0.0, 0.0};  // modulus ~1 (or 0)
    double lg = -1e300;

    static ScaledC from(std::complex<double> v) {
        double a = std::abs(v);
        if (a == 0.0) return {};
        return {v / a, std::log(a)};
    }
    ScaledC times(const ScaledC& o) const {
        if (dir == std::complex<double>(0, 0) || o.dir == std::complex<double>(0, 0)) return {};
        return {dir * o.dir, lg + o.lg};
    }
};

// Polynomial basis adapted to an arc of the unit circle. For even degree the
// functions are
//   E_n = zeta^{k/2} T_n(X((zeta + 1/zeta)/2)),          n = 0..k/2,
//   O_n = zeta^{k/2} ((zeta - 1/zeta)/2) T_n(X(.)),      n = 0..k/2-1,
// with zeta the coordinate rotated by the arc center and X the affine map
// sending [cos(beta), 1] to [-1, 1]. All are polynomials of degree <= k with
// modulus <= 1 on the arc, so sample Gram matrices stay well conditioned at
// degrees where raw monomials are hopeless. Odd degrees and near-full arc
// sets fall back to rotated monomials.
class ArcBasis {
public:
    ArcBasis(double theta_c, double beta, int k)
        : k_(k), theta_c_(theta_c), beta_(beta) {
        laurent_ = (k % 2 != 0) || beta > 0.98 * kPi;
        m_ = k / 2;
        delta_ = 1.0 - std::cos(beta_);
        if (delta_ < 1e-12) delta_ = 1e-12;
    }

    int dim() const { return k_ + 1; }
    bool laurent() const { return laurent_; }

    void eval_circle(double theta, std::complex<double>* out) const {
        double th = theta - theta_c_;
        if (laurent_) {
            for (int j = 0; j <= k_; ++j) out[j] = std::polar(1.0, j * th);
            return;
        }
        double x = std::cos(th);
        double X = (2.0 * x - (1.0 + std::cos(beta_))) / delta_;
        std::complex<double> head = std::polar(1.0, m_ * th);
        std::complex<double> odd_factor = head * std::complex<double>(0.0, std::sin(th));
        double t_prev = 1.0, t_cur = X;
        for (int n = 0; n <= m_; ++n) {
            double Tn = (n == 0) ? 1.0 : (n == 1 ? X : 0.0);
            if (n >= 2) {
                Tn = 2.0 * X * t_cur - t_prev;
                t_prev = t_cur;
                t_cur = Tn;
            }
            out[n] = head * Tn;
            if (n < m_) out[m_ + 1 + n] = odd_factor * Tn;
        }
    }

    // Entries scaled by exp(-logmax); returns logmax.
    double eval_scaled(std::complex<double> z, std::complex<double>* out) const {
        std::complex<double> zeta = z * std::polar(1.0, -theta_c_);
        if (laurent_) {
            for (int j = 0; j <= k_; ++j) out[j] = std::pow(zeta, j);
            return 0.0;
        }
        double az = std::abs(zeta);
        if (az < 1e-250) zeta = std::complex<double>(1e-250, 0.0);
        std::complex<double> inv = 1.0 / zeta;
        std::complex<double> x = 0.5 * (zeta + inv);
        std::complex<double> X = (2.0 * x - (1.0 + std::cos(beta_))) / delta_;
        ScaledC head = ScaledC::from(std::pow(std::abs(zeta), m_) == 0.0
                                         ? std::complex<double>(0, 0)
                                         : std::complex<double>(1, 0));
        // zeta^m in scaled form (|zeta|^m may underflow a plain double).
        head = ScaledC{std::polar(1.0, m_ * std::arg(zeta)), m_ * std::log(std::abs(zeta))};
        ScaledC sigma = ScaledC::from(0.5 * (zeta - inv));

        int d = dim();
        std::vector<ScaledC> T(m_ + 1);
        // Chebyshev recurrence with running rescale; the accumulated log
        // applies to every later index.
        std::complex<double> t_prev(1.0, 0.0), t_cur = X;
        double run = 0.0;
        std::vector<double> runs(m_ + 1, 0.0);
        std::vector<std::complex<double>> vals(m_ + 1);
        vals[0] = t_prev;
        runs[0] = 0.0;
        if (m_ >= 1) {
            vals[1] = t_cur;
            runs[1] = 0.0;
        }
        for (int n = 2; n <= m_; ++n) {
            std::complex<double> t_next = 2.0 * X * t_cur - t_prev;
            double a = std::abs(t_next);
            if (a > 1e120) {
                t_next /= a;
                t_cur /= a;
                run += std::log(a);
            }
            t_prev = t_cur;
            t_cur = t_next;
            vals[n] = t_cur;
            runs[n] = run;
        }
        for (int n = 0; n <= m_; ++n) {
            ScaledC Tn = ScaledC::from(vals[n]);
            Tn.lg += runs[n];
            T[n] = Tn;
        }
        std::vector<ScaledC> full(d);
        for (int n = 0; n <= m_; ++n) full[n] = head.times(T[n]);
        for (int n = 0; n < m_; ++n) full[m_ + 1 + n] = head.times(sigma).times(T[n]);
        double logmax = -1e300;
        for (int i = 0; i < d; ++i) logmax = std::max(logmax, full[i].lg);
        if (logmax <= -1e299) throw std::runtime_error("ArcBasis: vanishing basis row");
        for (int i = 0; i < d; ++i) {
            double rel = full[i].lg - logmax;
            out[i] = rel < -700.0 ? std::complex<double>(0, 0) : full[i].dir * std::exp(rel);
        }
        return logmax;
    }

    double sup_bound_coeff_sum(const Eigen::VectorXcd& c) const {
        double s = 0;
        for (int i = 0; i < c.size(); ++i) s += std::abs(c(i));
        return s;
    }

private:
    int k_;
    double theta_c_, beta_;
    bool laurent_;
    int m_;
    double delta_;
};

struct SolverState {
    ArcBasis basis;
    Eigen::MatrixXcd A;       // m x d, rows = w~_i * basis(theta_i)
    Eigen::MatrixXcd A_fine;  // refinement grid for the exchange check
    double log_wbar = 0.0;
    Eigen::VectorXd mu;  // warm start across nearby evaluation points
};

std::vector<double> sample_angles(const geometry::ArcSet& K, int k, int per_degree, int factor) {
    std::vector<double> th;
    for (auto [lo, hi] : K.arcs()) {
        int n = std::max(32, per_degree * k * factor);
        for (int i = 0; i <= n; ++i) th.push_back(lo + (hi - lo) * i / n);
    }
    return th;
}

SolverState build_state(const geometry::ArcSet& K,
                        const std::function<double(std::complex<double>)>& pot, int k,
                        const ChebyshevOptions& opts) {
    auto [theta_c, beta] = K.enclosing_arc();
    SolverState st{ArcBasis(theta_c, beta, k), {}, {}, 0.0, {}};
    const int d = st.basis.dim();

    auto assemble = [&](const std::vector<double>& th, Eigen::MatrixXcd& A, double& log_wbar,
                        bool reuse_wbar) {
        const int m = (int)th.size();
        std::vector<double> logw(m);
        for (int i = 0; i < m; ++i) logw[i] = -0.5 * k * pot(std::polar(1.0, th[i]));
        if (!reuse_wbar) log_wbar = *std::max_element(logw.begin(), logw.end());
        A.resize(m, d);
        std::vector<std::complex<double>> row(d);
        for (int i = 0; i < m; ++i) {
            st.basis.eval_circle(th[i], row.data());
            double w = std::exp(logw[i] - log_wbar);
            for (int j = 0; j < d; ++j) A(i, j) = w * row[j];
        }
    };
    auto th = sample_angles(K, k, opts.samples_per_arc_per_degree, 1);
    assemble(th, st.A, st.log_wbar, false);
    auto thf = sample_angles(K, k, opts.samples_per_arc_per_degree, opts.exchange_refine_factor);
    double dummy = st.log_wbar;
    assemble(thf, st.A_fine, dummy, true);
    st.mu = Eigen::VectorXd::Constant(st.A.rows(), 1.0 / st.A.rows());
    return st;
}

// Lawson-type reweighted exchange for
//   minimize max_i |(A c)_i|  subject to  l^H c = 1.
// The weighted-least-squares dual value sqrt(1 / l^H M(mu)^{-1} l) is a lower
// bound on the discrete minimax for every weight vector mu; the coefficient
// sum of the iterate bounds the continuum sup from above.
ChebyshevValue solve_point(SolverState& st,
                           const std::function<double(std::complex<double>)>& pot,
                           std::complex<double> z0, int k, const ChebyshevOptions& opts) {
    const int d = st.basis.dim();
    std::vector<std::complex<double>> lrow(d);
    double l_log = st.basis.eval_scaled(z0, lrow.data());
    Eigen::VectorXcd l = Eigen::Map<Eigen::VectorXcd>(lrow.data(), d);
    const double C = l_log - 0.5 * k * pot(z0) - st.log_wbar;

    Eigen::VectorXd mu = st.mu;
    const long m0 = st.A.rows();
    Eigen::MatrixXcd extra(0, d);
    Eigen::VectorXd mu_extra(0);

    double best_log_lb = -1e300;   // log of best (largest) lower bound
    double best_log_ub = 1e300;    // log of best (smallest) rigorous upper bound
    ChebyshevValue res;
    Eigen::VectorXcd c_best;

    auto lawson_pass = [&](int iters_left) -> int {
        int it = 0;
        double prev_ubd = 1e300;
        for (; it < iters_left; ++it) {
            const long m = m0 + extra.rows();
            Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
            {
                Eigen::MatrixXcd As = mu.array().sqrt().matrix().asDiagonal() * st.A;
                M.selfadjointView<Eigen::Lower>().rankUpdate(As.adjoint());
                if (extra.rows() > 0) {
                    Eigen::MatrixXcd Es = mu_extra.array().sqrt().matrix().asDiagonal() * extra;
                    M.selfadjointView<Eigen::Lower>().rankUpdate(Es.adjoint());
                }
            }
            Eigen::MatrixXcd Mfull = M.selfadjointView<Eigen::Lower>();
            Eigen::LDLT<Eigen::MatrixXcd> ldlt(Mfull);
            bool lb_valid = (ldlt.info() == Eigen::Success) &&
                            (ldlt.vectorD().real().array() > 0.0).all();
            Eigen::VectorXcd y;
            if (lb_valid) {
                y = ldlt.solve(l);
            } else {
                Eigen::MatrixXcd Mr = Mfull + 1e-14 * Mfull.trace().real() *
                                                  Eigen::MatrixXcd::Identity(d, d);
                y = Mr.llt().solve(l);
            }
            std::complex<double> q = l.dot(y);  // l^H y, real positive for PD M
            double qr = q.real();
            if (!(qr > 0)) throw std::runtime_error("chebyshev: degenerate normal equations");
            if (lb_valid) best_log_lb = std::max(best_log_lb, -0.5 * std::log(qr));
            Eigen::VectorXcd c = y / qr;

            Eigen::VectorXd r = (st.A * c).cwiseAbs();
            Eigen::VectorXd re;
            if (extra.rows() > 0) re = (extra * c).cwiseAbs();
            double ubd = r.maxCoeff();
            if (re.size() > 0) ubd = std::max(ubd, re.maxCoeff());
            double ub_rig = st.basis.sup_bound_coeff_sum(c);
            if (std::log(ub_rig) < best_log_ub) {
                best_log_ub = std::log(ub_rig);
                c_best = c;
            }
            (void)m;

            double gap_value = (2.0 / k) * (best_log_ub - best_log_lb);
            if (gap_value <= opts.target_value_gap && it >= 2) return it + 1;
            if (std::abs(prev_ubd - ubd) <= opts.stagnation_rel_tol * ubd && it >= 8) return it + 1;
            prev_ubd = ubd;

            // Multiplicative reweighting.
            for (long i = 0; i < m0; ++i) mu(i) = std::max(mu(i) * r(i), 1e-300);
            for (long i = 0; i < extra.rows(); ++i)
                mu_extra(i) = std::max(mu_extra(i) * re(i), 1e-300);
            double tot = mu.sum() + (extra.rows() > 0 ? mu_extra.sum() : 0.0);
            mu /= tot;
            if (extra.rows() > 0) mu_extra /= tot;
        }
        return it;
    };

    int used = lawson_pass(opts.max_iters);
    // Exchange against the finer grid: pull in any violating samples, resolve.
    for (int round = 0; round < 3 && used < opts.max_iters; ++round) {
        Eigen::VectorXd rf = (st.A_fine * c_best).cwiseAbs();
        double coarse_max = (st.A * c_best).cwiseAbs().maxCoeff();
        double fine_max = rf.maxCoeff();
        if (fine_max <= coarse_max * (1.0 + 1e-9)) break;
        std::vector<long> idx;
        for (long i = 0; i < rf.size(); ++i)
            if (rf(i) > coarse_max * (1.0 + 1e-12)) idx.push_back(i);
        if (idx.empty()) break;
        std::sort(idx.begin(), idx.end(),
                  [&](long a, long b) { return rf(a) > rf(b); });
        if ((long)idx.size() > 64) idx.resize(64);
        long old = extra.rows();
        extra.conservativeResize(old + idx.size(), d);
        mu_extra.conservativeResize(old + idx.size());
        for (size_t j = 0; j < idx.size(); ++j) {
            extra.row(old + j) = st.A_fine.row(idx[j]);
            mu_extra(old + j) = 1.0 / (m0 + old + idx.size());
        }
        double tot = mu.sum() + mu_extra.sum();
        mu /= tot;
        mu_extra /= tot;
        used += lawson_pass(opts.max_iters - used);
    }

    st.mu = mu;  // warm start for the next nearby point
    res.iterations = used;
    res.lower = (2.0 / k) * (C - best_log_ub);
    res.upper = (2.0 / k) * (C - best_log_lb);
    res.value = 0.5 * (res.lower + res.upper);
    res.certified = (res.upper - res.lower) <= std::max(opts.target_value_gap * 4.0, 1e-8) ||
                    used < opts.max_iters;
    return res;
}

struct Frame {
    std::function<double(std::complex<double>)> pot;
    geometry::ArcSet K;
    bool flipped = false;
};

geometry::ArcSet mirror_arcs(const geometry::ArcSet& K) {
    if (K.is_full_circle()) return K;
    std::vector<std::pair<double, double>> arcs;
    for (auto [lo, hi] : K.arcs()) arcs.push_back({-hi, -lo});
    return geometry::ArcSet::from_intervals(std::move(arcs));
}

Frame affine_frame(const geometry::ArcSet& K, const geometry::WeightPotential& h) {
    Frame f;
    f.K = K;
    f.pot = [&h](std::complex<double> z) {
        return std::log1p(std::norm(z)) + h.relative_potential(geometry::ChartPoint::affine(z));
    };
    return f;
}

Frame infinity_frame(const geometry::ArcSet& K, const geometry::WeightPotential& h) {
    Frame f;
    f.flipped = true;
    f.K = mirror_arcs(K);
    f.pot = [&h](std::complex<double> w) {
        return std::log1p(std::norm(w)) + h.relative_potential(geometry::ChartPoint::at_infinity(w));
    };
    return f;
}

// Affine coordinate (and chart flip decision) for an evaluation point.
std::pair<std::complex<double>, bool> resolve_point(const geometry::ChartPoint& p) {
    geometry::ChartPoint q = p.normalized();
    return {q.z, q.chart == geometry::Chart::infinity};
}

bool mirror_symmetric(const geometry::ArcSet& K, double center) {
    geometry::ArcSet rot = K.rotated(-center);
    geometry::ArcSet mir = mirror_arcs(rot);
    if (rot.arcs().size() != mir.arcs().size()) return false;
    for (size_t i = 0; i < rot.arcs().size(); ++i) {
        if (std::abs(rot.arcs()[i].first - mir.arcs()[i].first) > 1e-10) return false;
        if (std::abs(rot.arcs()[i].second - mir.arcs()[i].second) > 1e-10) return false;
    }
    return true;
}

}  // namespace

ChebyshevValue chebyshev_value(const geometry::ChartPoint& p, const geometry::ArcSet& K_in,
                               const geometry::WeightPotential& h, int k,
                               const ChebyshevOptions& opts) {
    if (k < 1) throw std::invalid_argument("chebyshev_value: k must be >= 1");
    geometry::ArcSet K = geometry::density_canonicalize(K_in);
    if (K.empty()) throw std::invalid_argument("chebyshev_value: empty constraint set");
    auto [z, flip] = resolve_point(p);
    Frame fr = flip ? infinity_frame(K, h) : affine_frame(K, h);
    SolverState st = build_state(fr.K, fr.pot, k, opts);
    return solve_point(st, fr.pot, z, k, opts);
}

EnvelopeField envelope_field(const geometry::ArcSet& K_in, const geometry::WeightPotential& h,
                             int k, const FieldGrid& grid, const ChebyshevOptions& opts,
                             int threads) {
    geometry::ArcSet K = geometry::density_canonicalize(K_in);
    if (K.empty()) throw std::invalid_argument("envelope_field: empty constraint set");
    auto [theta_c, beta] = K.enclosing_arc();
    (void)beta;
    const bool mirror = mirror_symmetric(K, theta_c);
    const bool inversion = h.is_reference();  // field(z) = field(1/conj z)

    // Node set: polar grid over the closed unit disk, plus a near-origin
    // point; the outer chart is swept through the flipped frame when the
    // weight is not reflection invariant.
    std::vector<geometry::ChartPoint> nodes;
    std::vector<double> radii;
    for (int i = 0; i < grid.n_radial; ++i) {
        double f = (double)i / (grid.n_radial - 1);
        radii.push_back(grid.r_min * std::pow(1.0 / grid.r_min, f));
    }
    std::vector<double> angles;
    int na = mirror ? grid.n_angular / 2 + 1 : grid.n_angular;
    for (int j = 0; j < na; ++j) {
        double span = mirror ? kPi : kTwoPi;
        angles.push_back(theta_c + span * j / (mirror ? (na - 1) : na));
    }
    nodes.push_back(geometry::ChartPoint::affine({1e-200, 0.0}));
    for (double r : radii)
        for (double a : angles) nodes.push_back(geometry::ChartPoint::from_polar(r, a));
    if (!inversion) {
        size_t inner = nodes.size();
        for (size_t i = 0; i < inner; ++i) {
            std::complex<double> z = nodes[i].z;
            nodes.push_back(geometry::ChartPoint::at_infinity(z));
        }
    }

    EnvelopeField out;
    out.k = k;
    out.nodes = nodes;
    out.value.assign(nodes.size(), 0.0);
    out.gap.assign(nodes.size(), 0.0);
    out.certified.assign(nodes.size(), 1);

    Frame fr_aff = affine_frame(K, h);
    Frame fr_inf = infinity_frame(K, h);

    // One worker per radial ring: warm starts flow along each ring, results
    // land in indexed slots (deterministic for any thread count).
    size_t ring = angles.size();
    size_t n_rings = (nodes.size() + ring - 1) / ring;
    parallel_for(n_rings, [&](size_t w) {
        SolverState st_aff = build_state(fr_aff.K, fr_aff.pot, k, opts);
        SolverState st_inf = inversion ? SolverState{ArcBasis(0, 1, 2), {}, {}, 0, {}}
                                       : build_state(fr_inf.K, fr_inf.pot, k, opts);
        for (size_t i = w * ring; i < std::min(nodes.size(), (w + 1) * ring); ++i) {
            const auto& p = nodes[i];
            ChebyshevValue v;
            if (p.chart == geometry::Chart::affine) {
                v = solve_point(st_aff, fr_aff.pot, p.z, k, opts);
            } else {
                v = solve_point(st_inf, fr_inf.pot, p.z, k, opts);
            }
            out.value[i] = v.value;
            out.gap[i] = v.gap();
            out.certified[i] = v.certified ? 1 : 0;
        }
    }, threads);
    out.max_gap = *std::max_element(out.gap.begin(), out.gap.end());
    return out;
}

CExponent c_exponent(const geometry::ArcSet& K_in, const geometry::WeightPotential& h, int k,
                     const FieldGrid& grid, const ChebyshevOptions& opts, int threads) {
    geometry::ArcSet K = geometry::density_canonicalize(K_in);
    if (K.empty()) throw std::invalid_argument("c_exponent: empty constraint set");
    geometry::ArcSet circle = geometry::ArcSet::full_circle();

    EnvelopeField fK = envelope_field(K, h, k, grid, opts, threads);
    EnvelopeField fC = envelope_field(circle, h, k, grid, opts, threads);

    CExponent best;
    best.value = -1e300;
    for (size_t i = 0; i < fK.nodes.size(); ++i) {
        double diff = fK.value[i] - fC.value[i];
        if (diff > best.value) {
            best.value = diff;
            best.gap = fK.gap[i] + fC.gap[i];
            best.argmax = fK.nodes[i];
            best.field_K = fK.value[i];
            best.field_full_circle = fC.value[i];
        }
    }

    // Local refinement around the grid argmax (pattern search in log r and
    // theta; radius clamped to the unit disk when reflection symmetry covers
    // the outer chart).
    Frame frK = affine_frame(K, h);
    Frame frC = affine_frame(circle, h);
    SolverState stK = build_state(frK.K, frK.pot, k, opts);
    SolverState stC = build_state(frC.K, frC.pot, k, opts);
    auto eval_diff = [&](double logr, double theta) {
        std::complex<double> z = std::polar(std::exp(logr), theta);
        ChebyshevValue a = solve_point(stK, frK.pot, z, k, opts);
        ChebyshevValue b = solve_point(stC, frC.pot, z, k, opts);
        return std::tuple<double, double, ChebyshevValue, ChebyshevValue>(a.value - b.value,
                                                                          a.gap() + b.gap(), a, b);
    };
    if (best.argmax.chart == geometry::Chart::affine && std::abs(best.argmax.z) > 1e-150) {
        double lr = std::log(std::abs(best.argmax.z));
        double th = std::arg(best.argmax.z);
        double step_r = 0.4, step_t = 0.3;
        for (int round = 0; round < 6; ++round) {
            bool improved = false;
            for (auto [dr, dt] : {std::pair{step_r, 0.0}, {-step_r, 0.0}, {0.0, step_t},
                                  {0.0, -step_t}}) {
                double nlr = std::min(0.0, lr + dr);
                auto [diff, gap, a, b] = eval_diff(nlr, th + dt);
                if (diff > best.value) {
                    best.value = diff;
                    best.gap = gap;
                    best.argmax = geometry::ChartPoint::from_polar(std::exp(nlr), th + dt);
                    best.field_K = a.value;
                    best.field_full_circle = b.value;
                    lr = nlr;
                    th = th + dt;
                    improved = true;
                }
            }
            if (!improved) {
                step_r *= 0.5;
                step_t *= 0.5;
            }
        }
    }
    return best;
}

}  // namespace envelab::extremal
