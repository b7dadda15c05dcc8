#include "hydrospec/precision.hpp"

#include <cctype>
#include <cstring>

namespace hydrospec {

MPReal MPReal::from_decimal(std::string_view s, PrecisionContext ctx) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    if (b == e) throw parse_error("empty decimal string");
    std::string t(s.substr(b, e - b));

    MPReal r(ctx);
    char* end = nullptr;
    mpfr_strtofr(r.x_, t.c_str(), &end, 10, MPFR_RNDN);
    if (end != t.c_str() + t.size())
        throw parse_error("malformed decimal string: '" + t + "'");
    return r;
}

std::string MPReal::to_decimal(size_t digits) const {
    if (mpfr_nan_p(x_)) return "nan";
    if (mpfr_inf_p(x_)) return mpfr_signbit(x_) ? "-inf" : "inf";
    if (mpfr_zero_p(x_)) return mpfr_signbit(x_) ? "-0.0e0" : "0.0e0";
    if (digits < 2) digits = 2;

    mpfr_exp_t exp10 = 0;
    char* s = mpfr_get_str(nullptr, &exp10, 10, digits, x_, MPFR_RNDN);
    std::string ds(s);
    mpfr_free_str(s);

    std::string out;
    size_t i = 0;
    if (ds[0] == '-') {
        out += '-';
        i = 1;
    }
    out += ds[i];
    out += '.';
    out += ds.substr(i + 1);
    out += 'e';
    out += std::to_string(static_cast<long>(exp10) - 1);
    return out;
}

MPReal sqrt(const MPReal& x) {
    if (x.sign() < 0) throw arithmetic_error("sqrt of negative value");
    MPReal r(x.context());
    mpfr_sqrt(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

MPReal abs(const MPReal& x) {
    MPReal r(x.context());
    mpfr_abs(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

MPReal hypot(const MPReal& x, const MPReal& y) {
    if (x.precision() != y.precision())
        throw usage_error("precision context mismatch");
    MPReal r(x.context());
    mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return r;
}

MPReal machine_epsilon(PrecisionContext ctx) {
    MPReal r(ctx);
    mpfr_set_ui_2exp(r.raw(), 1, 1 - ctx.bits(), MPFR_RNDN);
    return r;
}

MPComplex operator*(const MPComplex& a, const MPComplex& b) {
    if (a.precision() != b.precision())
        throw usage_error("precision context mismatch");
    PrecisionContext ctx = a.context();
    MPComplex r(ctx);
    MPReal t(ctx);
    // re = ar*br - ai*bi, im = ar*bi + ai*br
    mpfr_mul(r.re.raw(), a.re.raw(), b.re.raw(), MPFR_RNDN);
    mpfr_mul(t.raw(), a.im.raw(), b.im.raw(), MPFR_RNDN);
    mpfr_sub(r.re.raw(), r.re.raw(), t.raw(), MPFR_RNDN);
    mpfr_mul(r.im.raw(), a.re.raw(), b.im.raw(), MPFR_RNDN);
    mpfr_mul(t.raw(), a.im.raw(), b.re.raw(), MPFR_RNDN);
    mpfr_add(r.im.raw(), r.im.raw(), t.raw(), MPFR_RNDN);
    return r;
}

MPComplex operator/(const MPComplex& a, const MPComplex& b) {
    if (a.precision() != b.precision())
        throw usage_error("precision context mismatch");
    if (b.is_zero()) throw arithmetic_error("complex division by exact zero");
    PrecisionContext ctx = a.context();
    MPComplex q(ctx);
    MPReal r(ctx), den(ctx), t(ctx);
    // Smith's method: branch on the dominant part of the divisor.
    if (abs(b.re) >= abs(b.im)) {
        r = b.im / b.re;
        den = b.re + b.im * r;
        q.re = (a.re + a.im * r) / den;
        q.im = (a.im - a.re * r) / den;
    } else {
        r = b.re / b.im;
        den = b.re * r + b.im;
        q.re = (a.re * r + a.im) / den;
        q.im = (a.im * r - a.re) / den;
    }
    return q;
}

MPReal abs(const MPComplex& z) { return hypot(z.re, z.im); }

MPComplex sqrt(const MPComplex& z) {
    PrecisionContext ctx = z.context();
    if (z.is_zero()) return MPComplex(ctx);
    MPReal m = abs(z);
    MPReal two(2, ctx);
    MPComplex w(ctx);
    if (z.re.sign() >= 0) {
        MPReal t = sqrt((m + z.re) / two);
        w.re = t;
        w.im = z.im / (two * t);
    } else {
        MPReal t = sqrt((m - z.re) / two);
        w.re = abs(z.im) / (two * t);
        w.im = (z.im.sign() < 0) ? -t : t;
    }
    return w;
}

} // namespace hydrospec
