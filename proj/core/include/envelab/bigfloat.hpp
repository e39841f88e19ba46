#pragma once

#include <mpfr.h>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

namespace envelab {

// Correctly rounded arbitrary-precision real; value-semantic wrapper over
// mpfr_t. Every value carries its own precision (>= 64 bits); binary
// operations round to the wider of the two operand precisions.
class Big {
public:
    static constexpr mpfr_prec_t kMinPrec = 64;

    Big() { mpfr_init2(v_, kMinPrec); mpfr_set_zero(v_, 1); }
    explicit Big(mpfr_prec_t prec) { mpfr_init2(v_, clamp(prec)); mpfr_set_zero(v_, 1); }
    Big(double x, mpfr_prec_t prec) { mpfr_init2(v_, clamp(prec)); mpfr_set_d(v_, x, MPFR_RNDN); }
    Big(long x, mpfr_prec_t prec) { mpfr_init2(v_, clamp(prec)); mpfr_set_si(v_, x, MPFR_RNDN); }
    Big(const std::string& s, mpfr_prec_t prec) {
        mpfr_init2(v_, clamp(prec));
        mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN);
    }

    Big(const Big& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Big(Big&& o) noexcept { mpfr_init2(v_, kMinPrec); mpfr_swap(v_, o.v_); }
    Big& operator=(const Big& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Big& operator=(Big&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~Big() { mpfr_clear(v_); }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    // Exponent e with |x| in [2^(e-1), 2^e); only meaningful for nonzero x.
    long exponent() const { return static_cast<long>(mpfr_get_exp(v_)); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    std::string str(int digits = 20) const;

    Big& operator+=(const Big& o) { widen(o.prec()); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Big& operator-=(const Big& o) { widen(o.prec()); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Big& operator*=(const Big& o) { widen(o.prec()); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Big& operator/=(const Big& o) { widen(o.prec()); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    friend Big operator+(Big a, const Big& b) { a += b; return a; }
    friend Big operator-(Big a, const Big& b) { a -= b; return a; }
    friend Big operator*(Big a, const Big& b) { a *= b; return a; }
    friend Big operator/(Big a, const Big& b) { a /= b; return a; }
    friend Big operator-(const Big& a) {
        Big r(a.prec());
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

    friend bool operator<(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
    friend bool operator==(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) != 0; }

    friend Big abs(const Big& a) {
        Big r(a.prec());
        mpfr_abs(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big sqrt(const Big& a) {
        Big r(a.prec());
        mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big exp(const Big& a) {
        Big r(a.prec());
        mpfr_exp(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big log(const Big& a) {
        Big r(a.prec());
        mpfr_log(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big log1p(const Big& a) {
        Big r(a.prec());
        mpfr_log1p(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big expm1(const Big& a) {
        Big r(a.prec());
        mpfr_expm1(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big sin(const Big& a) {
        Big r(a.prec());
        mpfr_sin(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big cos(const Big& a) {
        Big r(a.prec());
        mpfr_cos(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big sinh(const Big& a) {
        Big r(a.prec());
        mpfr_sinh(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big cosh(const Big& a) {
        Big r(a.prec());
        mpfr_cosh(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big tanh(const Big& a) {
        Big r(a.prec());
        mpfr_tanh(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Big pow_si(const Big& a, long n) {
        Big r(a.prec());
        mpfr_pow_si(r.v_, a.v_, n, MPFR_RNDN);
        return r;
    }
    friend Big min(const Big& a, const Big& b) { return a <= b ? a : b; }
    friend Big max(const Big& a, const Big& b) { return a >= b ? a : b; }

    static Big pi(mpfr_prec_t prec) {
        Big r(prec);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }
    // 2^e at the given precision.
    static Big pow2(long e, mpfr_prec_t prec) {
        Big r(prec);
        mpfr_set_ui_2exp(r.v_, 1u, static_cast<mpfr_exp_t>(e), MPFR_RNDN);
        return r;
    }

private:
    static mpfr_prec_t clamp(mpfr_prec_t p) { return p < kMinPrec ? kMinPrec : p; }
    void widen(mpfr_prec_t p) {
        if (p > prec()) mpfr_prec_round(v_, p, MPFR_RNDN);
    }
    mpfr_t v_;
};

// Complex value over Big. Only the operations the factorization and
// quadrature kernels need; division is by real scalars only.
struct BigComplex {
    Big re, im;

    BigComplex() = default;
    explicit BigComplex(mpfr_prec_t prec) : re(prec), im(prec) {}
    BigComplex(Big r, Big i) : re(std::move(r)), im(std::move(i)) {}
    BigComplex(double r, double i, mpfr_prec_t prec) : re(r, prec), im(i, prec) {}

    mpfr_prec_t prec() const { return re.prec(); }

    BigComplex& operator+=(const BigComplex& o) { re += o.re; im += o.im; return *this; }
    BigComplex& operator-=(const BigComplex& o) { re -= o.re; im -= o.im; return *this; }

    friend BigComplex operator+(BigComplex a, const BigComplex& b) { a += b; return a; }
    friend BigComplex operator-(BigComplex a, const BigComplex& b) { a -= b; return a; }
    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend BigComplex operator*(const Big& s, const BigComplex& a) {
        return BigComplex(s * a.re, s * a.im);
    }
    friend BigComplex operator/(const BigComplex& a, const Big& s) {
        return BigComplex(a.re / s, a.im / s);
    }
    friend BigComplex conj(const BigComplex& a) { return BigComplex(a.re, -a.im); }
    friend Big norm(const BigComplex& a) { return a.re * a.re + a.im * a.im; }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

// a -= b * c and a -= b * conj(c), in place, no temaporary churn beyond two
// scratch values supplied by the caller's precision.
void submul(BigComplex& a, const BigComplex& b, const BigComplex& c);
void submul_conj(BigComplex& a, const BigComplex& b, const BigComplex& c);

// Adaptive tanh-sinh quadrature of f over the finite interval [a, b] at the
// given working precision. `rel_tol` is relative to the accumulated integral;
// intended for smooth positive integrands (no internal cancellation control).
Big tanh_sinh(const std::function<Big(const Big&)>& f, const Big& a, const Big& b,
              mpfr_prec_t prec, double rel_tol, int max_level = 12);

}  // namespace envelab
