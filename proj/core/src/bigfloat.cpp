#include "envelab/bigfloat.hpp"

#include <functional>
#include <vector>

namespace envelab {

std::string Big::str(int digits) const {
    char* s = nullptr;
    // mpfr_asprintf handles rounding and exponent formatting.
    mpfr_asprintf(&s, "%.*Rg", digits, v_);
    std::string out(s);
    mpfr_free_str(s);
    return out;
}

void submul(BigComplex& a, const BigComplex& b, const BigComplex& c) {
    mpfr_prec_t p = a.prec();
    static thread_local Big t1, t2;
    if (t1.prec() != p) { t1 = Big(p); t2 = Big(p); }
    // re -= b.re*c.re - b.im*c.im
    mpfr_mul(t1.raw(), b.re.raw(), c.re.raw(), MPFR_RNDN);
    mpfr_mul(t2.raw(), b.im.raw(), c.im.raw(), MPFR_RNDN);
    mpfr_sub(t1.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
    mpfr_sub(a.re.raw(), a.re.raw(), t1.raw(), MPFR_RNDN);
    // im -= b.re*c.im + b.im*c.re
    mpfr_mul(t1.raw(), b.re.raw(), c.im.raw(), MPFR_RNDN);
    mpfr_mul(t2.raw(), b.im.raw(), c.re.raw(), MPFR_RNDN);
    mpfr_add(t1.raw(), t1.raw(), t2.raw(), MPFR_RNDN);
    mpfr_sub(a.im.raw(), a.im.raw(), t1.raw(), MPFR_RNDN);
}

void submul_conj(BigComplex& a, const BigComplex& b, const BigComplex& c) {
    BigComplex cc = conj(c);
    submul(a, b, cc);
}

Big tanh_sinh(const std::function<Big(const Big&)>& f, const Big& a, const Big& b,
              mpfr_prec_t prec, double rel_tol, int max_level) {
    const Big half_len = (b - a) * Big(0.5, prec);
    const Big mid = (a + b) * Big(0.5, prec);
    const Big pi_half = Big::pi(prec) * Big(0.5, prec);
    const Big tiny = Big::pow2(-(long)prec - 16, prec);

    auto eval = [&](const Big& u) -> Big {
        Big s = sinh(u);
        Big t = pi_half * s;
        Big c = cosh(t);
        Big x = tanh(t);
        Big w = pi_half * cosh(u) / (c * c);
        Big arg = mid + half_len * x;
        return w * f(arg);
    };

    // Level 0: h = 1, nodes at integer u until weights vanish.
    Big sum = eval(Big(0.0, prec));
    double h = 1.0;
    {
        for (int n = 1; n <= 8; ++n) {
            Big term = eval(Big((double)n, prec)) + eval(Big((double)-n, prec));
            sum += term;
            if (abs(term) < tiny * (abs(sum) + Big(1.0, prec))) break;
        }
    }
    Big integral = Big(h, prec) * half_len * sum;

    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        // Add the new (odd-multiple) nodes.
        Big added(prec);
        int consecutive_small = 0;
        for (long n = 1;; n += 2) {
            Big u = Big((double)n * h, prec);
            Big term = eval(u) + eval(-u);
            added += term;
            if (abs(term) < tiny * (abs(sum) + abs(added) + Big(1.0, prec))) {
                if (++consecutive_small >= 2) break;
            } else {
                consecutive_small = 0;
            }
            if ((double)n * h > 7.0) break;  // weights are below any usable precision
        }
        sum += added;
        Big next = Big(h, prec) * half_len * sum;
        Big diff = abs(next - integral);
        integral = next;
        if (diff <= Big(rel_tol, prec) * abs(integral) && level >= 3) break;
    }
    return integral;
}

}  // namespace envelab
