#include "envelab/bigtoeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace envelab::bigtoeplitz {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Symbols
// ---------------------------------------------------------------------------

PiecewiseSymbol PiecewiseSymbol::constant(double c) {
    PiecewiseSymbol f;
    f.name_ = "constant";
    f.ess_sup_ = std::abs(c);
    f.segments_.push_back({0.0, kTwoPi,
                           [c](const Big&, mpfr_prec_t prec) { return Big(c, prec); }, false});
    return f;
}

PiecewiseSymbol PiecewiseSymbol::arc_indicator(const geometry::ArcSet& K) {
    if (K.empty()) throw std::invalid_argument("arc_indicator: empty arc set");
    PiecewiseSymbol f;
    f.name_ = "arc_indicator";
    f.ess_sup_ = 1.0;
    for (auto [lo, hi] : K.arcs())
        f.segments_.push_back({lo, hi,
                               [](const Big&, mpfr_prec_t prec) { return Big(1.0, prec); }, false});
    return f;
}

PiecewiseSymbol PiecewiseSymbol::trig_poly(double a0, std::vector<double> a, std::vector<double> b) {
    PiecewiseSymbol f;
    f.name_ = "trig_poly";
    double sup = std::abs(a0);
    for (double x : a) sup += std::abs(x);
    for (double x : b) sup += std::abs(x);
    f.ess_sup_ = sup;
    f.segments_.push_back(
        {0.0, kTwoPi,
         [a0, a, b](const Big& theta, mpfr_prec_t prec) {
             Big v(a0, prec);
             for (size_t m = 0; m < a.size(); ++m)
                 if (a[m] != 0.0) v += Big(a[m], prec) * cos(Big((double)(m + 1), prec) * theta);
             for (size_t m = 0; m < b.size(); ++m)
                 if (b[m] != 0.0) v += Big(b[m], prec) * sin(Big((double)(m + 1), prec) * theta);
             return v;
         },
         false});
    return f;
}

PiecewiseSymbol PiecewiseSymbol::abs_sin_half_pow(double power) {
    PiecewiseSymbol f;
    f.name_ = "abs_sin_half_pow";
    f.ess_sup_ = 1.0;
    auto val = [power](const Big& theta, mpfr_prec_t prec) {
        Big s = abs(sin(theta * Big(0.5, prec)));
        if (s.is_zero()) return Big(prec);
        return exp(Big(power, prec) * log(s));
    };
    // Breakpoint at theta = 0 (== 2pi) where the symbol vanishes.
    f.segments_.push_back({0.0, std::numbers::pi, val, true});
    f.segments_.push_back({std::numbers::pi, kTwoPi, val, true});
    return f;
}

// ---------------------------------------------------------------------------
// Fourier coefficients
// ---------------------------------------------------------------------------

namespace {

// Gauss-Legendre nodes/weights on [-1,1] in extended precision, by Newton
// refinement of the double-precision nodes.
void gauss_legendre_big(int n, mpfr_prec_t prec, std::vector<Big>& x, std::vector<Big>& w) {
    x.assign(n, Big(prec));
    w.assign(n, Big(prec));
    Big one(1.0, prec);
    for (int i = 0; i < n; ++i) {
        Big xi(std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), prec);
        Big pp(prec);
        for (int it = 0; it < 200; ++it) {
            Big p0(1.0, prec), p1 = xi;
            for (int j = 2; j <= n; ++j) {
                Big p2 = (Big(2.0 * j - 1.0, prec) * xi * p1 - Big((double)(j - 1), prec) * p0) /
                         Big((double)j, prec);
                p0 = p1;
                p1 = p2;
            }
            pp = Big((double)n, prec) * (xi * p1 - p0) / (xi * xi - one);
            Big dx = p1 / pp;
            xi -= dx;
            if (abs(dx) < Big::pow2(-(long)prec + 8, prec)) break;
        }
        x[i] = xi;
        w[i] = Big(2.0, prec) / ((one - xi * xi) * pp * pp);
    }
}

struct QuadNodes {
    std::vector<Big> theta, weight;
};

// Quadrature nodes for one segment, resolving oscillations up to frequency k.
QuadNodes segment_nodes(const PiecewiseSymbol::Segment& seg, int k, mpfr_prec_t prec) {
    QuadNodes q;
    double len = seg.hi - seg.lo;
    if (len <= 0) return q;
    if (!seg.endpoint_singular) {
        int panels = std::max(2, (int)std::ceil(k * len / kTwoPi) + 2);
        int order = 24;
        std::vector<Big> gx, gw;
        gauss_legendre_big(order, prec, gx, gw);
        for (int p = 0; p < panels; ++p) {
            Big a(seg.lo + len * p / panels, prec);
            Big b(seg.lo + len * (p + 1) / panels, prec);
            Big mid = (a + b) * Big(0.5, prec), half = (b - a) * Big(0.5, prec);
            for (int i = 0; i < order; ++i) {
                q.theta.push_back(mid + half * gx[i]);
                q.weight.push_back(half * gw[i]);
            }
        }
    } else {
        // Endpoint singularities: tanh-sinh panels (fixed level), still split
        // finely enough for the oscillation.
        int panels = std::max(4, (int)std::ceil(k * len / kTwoPi) + 4);
        const Big pi_half = Big::pi(prec) * Big(0.5, prec);
        const int level = 5;
        const double h = 1.0 / (1 << level);
        for (int p = 0; p < panels; ++p) {
            Big a(seg.lo + len * p / panels, prec);
            Big b(seg.lo + len * (p + 1) / panels, prec);
            Big mid = (a + b) * Big(0.5, prec), half = (b - a) * Big(0.5, prec);
            for (long n = -(6 << level); n <= (6 << level); ++n) {
                Big u(n * h, prec);
                Big s = sinh(u);
                Big t = pi_half * s;
                Big c = cosh(t);
                Big xv = tanh(t);
                Big wv = Big(h, prec) * pi_half * cosh(u) / (c * c);
                if (wv < Big::pow2(-(long)prec - 8, prec)) continue;
                q.theta.push_back(mid + half * xv);
                q.weight.push_back(half * wv);
            }
        }
    }
    return q;
}

}  // namespace

std::vector<BigComplex> fourier_coeffs(const PiecewiseSymbol& f, int k, mpfr_prec_t prec) {
    if (f.is_zero()) throw std::invalid_argument("fourier_coeffs: zero symbol");
    std::vector<BigComplex> a(k + 1, BigComplex(prec));
    for (const auto& seg : f.segments()) {
        QuadNodes q = segment_nodes(seg, k, prec);
        for (size_t i = 0; i < q.theta.size(); ++i) {
            Big fv = seg.value(q.theta[i], prec) * q.weight[i];
            if (fv.is_zero()) continue;
            // e^{-i j theta} by rotation recurrence.
            Big c = cos(q.theta[i]), s = sin(q.theta[i]);
            BigComplex rot(c, -s);
            BigComplex cur(Big(1.0, prec), Big(0.0, prec));
            for (int j = 0; j <= k; ++j) {
                a[j].re += fv * cur.re;
                a[j].im += fv * cur.im;
                cur = cur * rot;
            }
        }
    }
    Big inv2pi = Big(1.0, prec) / (Big(2.0, prec) * Big::pi(prec));
    for (auto& c : a) {
        c.re *= inv2pi;
        c.im *= inv2pi;
    }
    return a;
}

HermitianToeplitzMatrix HermitianToeplitzMatrix::from_symbol(const PiecewiseSymbol& f, int k,
                                                             mpfr_prec_t prec) {
    HermitianToeplitzMatrix T;
    T.k = k;
    T.prec = prec;
    T.a = fourier_coeffs(f, k, prec);
    return T;
}

HermitianToeplitzMatrix HermitianToeplitzMatrix::from_coeffs(std::vector<BigComplex> coeffs,
                                                             mpfr_prec_t prec) {
    if (coeffs.empty()) throw std::invalid_argument("from_coeffs: empty coefficients");
    HermitianToeplitzMatrix T;
    T.k = (int)coeffs.size() - 1;
    T.prec = prec;
    T.a = std::move(coeffs);
    return T;
}

// ---------------------------------------------------------------------------
// Inertia via LDL^*
// ---------------------------------------------------------------------------

namespace {

struct LdlOutcome {
    int negatives = 0;
    bool zero_pivot = false;
    long min_pivot_exp = 0;  // of |pivot|
    long max_pivot_exp = 0;
};

// Dense LDL^* of (T - shift I); no pivoting. The Toeplitz structure is not
// exploited (dense O(n^3) extended-precision ops; desk scale n <= ~200).
LdlOutcome ldl_inertia(const HermitianToeplitzMatrix& T, const Big& shift) {
    const int n = T.k + 1;
    const mpfr_prec_t prec = T.prec;
    std::vector<BigComplex> L((size_t)n * n, BigComplex(prec));
    std::vector<Big> d(n, Big(prec));
    auto a_of = [&](int i, int j) -> BigComplex {
        int m = i - j;
        BigComplex v = (m >= 0) ? T.a[m] : conj(T.a[-m]);
        if (i == j) v.re -= shift;
        return v;
    };
    LdlOutcome out;
    bool first = true;
    // Scratch registers for the inner accumulations.
    Big t1(prec), t2(prec), acc_re(prec), acc_im(prec);
    std::vector<BigComplex> w(n, BigComplex(prec));  // d_m * conj(L[j][m])
    for (int j = 0; j < n; ++j) {
        // d_j = a_jj - sum_m |L[j][m]|^2 d_m
        Big dj = a_of(j, j).re;
        for (int m = 0; m < j; ++m) {
            const BigComplex& ljm = L[(size_t)j * n + m];
            mpfr_mul(t1.raw(), ljm.re.raw(), ljm.re.raw(), MPFR_RNDN);
            mpfr_mul(t2.raw(), ljm.im.raw(), ljm.im.raw(), MPFR_RNDN);
            mpfr_add(t1.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
            mpfr_mul(t1.raw(), t1.raw(), d[m].raw(), MPFR_RNDN);
            mpfr_sub(dj.raw(), dj.raw(), t1.raw(), MPFR_RNDN);
        }
        if (dj.is_zero()) {
            out.zero_pivot = true;
            return out;
        }
        long e = abs(dj).exponent();
        if (first) {
            out.min_pivot_exp = out.max_pivot_exp = e;
            first = false;
        } else {
            out.min_pivot_exp = std::min(out.min_pivot_exp, e);
            out.max_pivot_exp = std::max(out.max_pivot_exp, e);
        }
        if (dj.sign() < 0) ++out.negatives;
        d[j] = dj;
        for (int m = 0; m < j; ++m) {
            w[m] = conj(L[(size_t)j * n + m]);
            w[m].re *= d[m];
            w[m].im *= d[m];
        }
        for (int i = j + 1; i < n; ++i) {
            BigComplex acc = a_of(i, j);
            for (int m = 0; m < j; ++m) submul(acc, L[(size_t)i * n + m], w[m]);
            L[(size_t)i * n + j] = BigComplex(acc.re / dj, acc.im / dj);
        }
    }
    return out;
}

}  // namespace

int inertia(const HermitianToeplitzMatrix& T, const Big& shift) {
    Big s = shift;
    for (int attempt = 0;; ++attempt) {
        LdlOutcome out = ldl_inertia(T, s);
        if (!out.zero_pivot) return out.negatives;
        if (attempt >= 3)
            throw std::runtime_error("inertia: persistent zero pivot after jitter retries");
        // Deterministic jitter, alternating direction.
        Big eps = Big::pow2(-(long)T.prec / 2, T.prec);
        Big factor = (attempt % 2 == 0) ? Big(1.0, T.prec) + eps : Big(1.0, T.prec) - eps;
        s = shift * factor;
        if (s.is_zero()) s = Big::pow2(-(long)T.prec / 2, T.prec);
    }
}

// ---------------------------------------------------------------------------
// Spectrum by bisection on -log(lambda)
// ---------------------------------------------------------------------------

namespace {

struct CountCache {
    const HermitianToeplitzMatrix* T;
    long worst_spread = 0;
    // count of eigenvalues with -log(lambda) > z, i.e. lambda < e^{-z}
    int operator()(double z) {
        Big lam = exp(Big(-z, T->prec));
        Big s = lam;
        LdlOutcome out = ldl_inertia(*T, s);
        int attempt = 0;
        while (out.zero_pivot && attempt < 3) {
            Big eps = Big::pow2(-(long)T->prec / 2, T->prec);
            s = lam * ((attempt % 2 == 0) ? Big(1.0, T->prec) + eps : Big(1.0, T->prec) - eps);
            out = ldl_inertia(*T, s);
            ++attempt;
        }
        if (out.zero_pivot) throw std::runtime_error("log_spectrum: persistent zero pivot");
        worst_spread = std::max(worst_spread, out.max_pivot_exp - out.min_pivot_exp);
        return out.negatives;
    }
};

LogSpectrum log_spectrum_once(const HermitianToeplitzMatrix& T, double tol_log,
                              double ess_sup_symbol, double neg_log_upper_hint) {
    const int n = T.k + 1;
    CountCache count{&T};
    double z_bot = -std::log(std::max(ess_sup_symbol, 1e-300)) - 1.0;
    double z_top = std::max({10.0, neg_log_upper_hint * 1.5 + 30.0, z_bot + 1.0});
    int c_top;
    for (int tries = 0;; ++tries) {
        c_top = count(z_top);
        if (c_top == 0) break;
        if (tries > 60) throw std::runtime_error("log_spectrum: failed to bracket lambda_min");
        z_top += std::max(40.0, z_top);
    }
    int c_bot = count(z_bot);
    if (c_bot != n)
        throw std::runtime_error("log_spectrum: spectrum not positive below essential sup");

    LogSpectrum out;
    out.k = T.k;
    // Each queue entry holds (z_lo, z_hi, count(z_lo), count(z_hi)) with
    // count(z) = #eigenvalues with -log(lambda) > z; the bracket contains
    // count(z_lo) - count(z_hi) values of -log(lambda).
    struct Bracket {
        double lo, hi;
        int c_lo, c_hi;
    };
    std::deque<Bracket> queue{{z_bot, z_top, c_bot, c_top}};
    std::vector<std::pair<double, double>> enclosures;
    while (!queue.empty()) {
        Bracket b = queue.front();
        queue.pop_front();
        int mult = b.c_lo - b.c_hi;
        if (mult <= 0) continue;
        if (b.hi - b.lo <= tol_log) {
            for (int i = 0; i < mult; ++i) enclosures.push_back({b.lo, b.hi});
            continue;
        }
        double mid = 0.5 * (b.lo + b.hi);
        int c_mid = count(mid);
        queue.push_back({b.lo, mid, b.c_lo, c_mid});
        queue.push_back({mid, b.hi, c_mid, b.c_hi});
    }
    std::sort(enclosures.begin(), enclosures.end());
    if ((int)enclosures.size() != n)
        throw std::runtime_error("log_spectrum: lost eigenvalues during bisection");
    // Refine the smallest eigenvalue (largest -log) to relative width 2^-32.
    auto [lo, hi] = enclosures.back();
    while (hi - lo > 2.3e-10 && hi - lo > 1e-14 * std::abs(hi)) {
        double mid = 0.5 * (lo + hi);
        if (count(mid) >= 1) lo = mid;
        else hi = mid;
    }
    enclosures.back() = {lo, hi};
    out.neg_log = std::move(enclosures);
    if (count.worst_spread > (long)T.prec - 48)
        throw PrecisionExhausted("log_spectrum: pivot dynamic range " +
                                 std::to_string(count.worst_spread) + " bits exceeds mantissa");
    return out;
}

}  // namespace

std::vector<double> LogSpectrum::midpoints() const {
    std::vector<double> m(neg_log.size());
    for (size_t i = 0; i < neg_log.size(); ++i)
        m[i] = 0.5 * (neg_log[i].first + neg_log[i].second);
    return m;
}

SpectralMeasure LogSpectrum::eta() const {
    std::vector<double> xs = midpoints();
    for (double& x : xs) x /= k;
    return SpectralMeasure::empirical(xs);
}

LogSpectrum log_spectrum(const HermitianToeplitzMatrix& T, double tol_log,
                         double ess_sup_symbol, double neg_log_upper_hint) {
    try {
        return log_spectrum_once(T, tol_log, ess_sup_symbol, neg_log_upper_hint);
    } catch (const PrecisionExhausted&) {
        HermitianToeplitzMatrix wide = T;
        wide.prec = (mpfr_prec_t)(T.prec * 3 / 2) + 64;
        for (auto& c : wide.a) {
            Big re(wide.prec), im(wide.prec);
            mpfr_set(re.raw(), c.re.raw(), MPFR_RNDN);
            mpfr_set(im.raw(), c.im.raw(), MPFR_RNDN);
            c = BigComplex(re, im);
        }
        return log_spectrum_once(wide, tol_log, ess_sup_symbol, neg_log_upper_hint);
    }
}

double neg_log_lambda_min(const HermitianToeplitzMatrix& T, double ess_sup_symbol,
                          double neg_log_upper_hint, double rel_tol_log) {
    CountCache count{&T};
    // Bracket: find z with count(z) == 0 (above all -log lambda) and one with
    // count >= 1.
    double z_hi = std::max(10.0, neg_log_upper_hint);
    while (count(z_hi) > 0) z_hi += std::max(40.0, 0.5 * z_hi);
    double z_lo = -std::log(std::max(ess_sup_symbol, 1e-300)) - 1.0;
    if (count(z_lo) == 0)
        throw std::runtime_error("neg_log_lambda_min: empty bracket");
    while (z_hi - z_lo > std::max(rel_tol_log, 1e-13 * std::abs(z_hi))) {
        double mid = 0.5 * (z_lo + z_hi);
        if (count(mid) >= 1) z_lo = mid;
        else z_hi = mid;
    }
    if (count.worst_spread > (long)T.prec - 48)
        throw PrecisionExhausted("neg_log_lambda_min: pivot dynamic range exceeds mantissa");
    return 0.5 * (z_lo + z_hi);
}

DecayFit fit_decay_exponent(const std::vector<std::pair<int, double>>& samples) {
    if (samples.size() < 4)
        throw std::invalid_argument("fit_decay_exponent: need at least 4 samples");
    for (size_t i = 1; i < samples.size(); ++i)
        if (samples[i].first <= samples[i - 1].first)
            throw std::invalid_argument("fit_decay_exponent: k must be strictly increasing");
    double n = (double)samples.size();
    double sx = 0, sy = 0;
    for (auto& [k, y] : samples) {
        sx += k;
        sy += y;
    }
    double xbar = sx / n, ybar = sy / n;
    double sxx = 0, sxy = 0;
    for (auto& [k, y] : samples) {
        sxx += (k - xbar) * (k - xbar);
        sxy += (k - xbar) * (y - ybar);
    }
    DecayFit fit;
    fit.c_hat = sxy / sxx;
    fit.intercept = ybar - fit.c_hat * xbar;
    double ss_res = 0;
    for (auto& [k, y] : samples) {
        double r = y - (fit.c_hat * k + fit.intercept);
        ss_res += r * r;
    }
    fit.stderr_c = std::sqrt(ss_res / std::max(1.0, n - 2.0) / sxx);
    return fit;
}

DecayFit fit_decay_exponent_lambda(const std::vector<std::pair<int, double>>& k_and_lambda) {
    std::vector<std::pair<int, double>> neglog;
    for (auto& [k, lam] : k_and_lambda) {
        if (!(lam > 0)) throw std::invalid_argument("fit_decay_exponent: lambda must be positive");
        neglog.push_back({k, -std::log(lam)});
    }
    return fit_decay_exponent(neglog);
}

mpfr_prec_t precision_policy(double c_guess, int k) {
    double bits = 1.5 * std::max(0.0, c_guess) * k / std::numbers::ln2 + 128.0;
    return (mpfr_prec_t)std::max(256.0, std::ceil(bits));
}

}  // namespace envelab::bigtoeplitz
