#pragma once

#include <mpfr.h>

#include <string>
#include <string_view>

#include "hydrospec/errors.hpp"

namespace hydrospec {

// Significand width tag carried by every scalar. Rounding is always
// nearest-even; there is no mutable global state.
class PrecisionContext {
public:
    explicit PrecisionContext(long bits) : bits_(bits) {
        if (bits < 2)
            throw usage_error("precision must be at least 2 bits");
    }
    long bits() const { return bits_; }
    friend bool operator==(PrecisionContext a, PrecisionContext b) {
        return a.bits_ == b.bits_;
    }
    friend bool operator!=(PrecisionContext a, PrecisionContext b) {
        return a.bits_ != b.bits_;
    }

private:
    long bits_;
};

// Binary floating-point real with an explicit significand width.
// Binary operations require both operands to carry the same width;
// mixing widths is a usage error, never a silent promotion.
class MPReal {
public:
    explicit MPReal(PrecisionContext ctx) { mpfr_init2(x_, ctx.bits()); mpfr_set_zero(x_, 1); }
    MPReal(long v, PrecisionContext ctx) { mpfr_init2(x_, ctx.bits()); mpfr_set_si(x_, v, MPFR_RNDN); }

    MPReal(const MPReal& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    MPReal(MPReal&& o) noexcept {
        mpfr_init2(x_, mpfr_get_prec(o.x_));
        mpfr_swap(x_, o.x_);
    }
    MPReal& operator=(const MPReal& o) {
        if (this != &o) {
            mpfr_set_prec(x_, mpfr_get_prec(o.x_));
            mpfr_set(x_, o.x_, MPFR_RNDN);
        }
        return *this;
    }
    MPReal& operator=(MPReal&& o) noexcept {
        if (this != &o) mpfr_swap(x_, o.x_);
        return *this;
    }
    ~MPReal() { mpfr_clear(x_); }

    static MPReal from_decimal(std::string_view s, PrecisionContext ctx);
    static MPReal from_double(double v, PrecisionContext ctx) {
        MPReal r(ctx);
        mpfr_set_d(r.x_, v, MPFR_RNDN);
        return r;
    }

    long precision() const { return mpfr_get_prec(x_); }
    PrecisionContext context() const { return PrecisionContext(precision()); }

    // Exact when widening; correctly rounded when narrowing.
    MPReal to_precision(PrecisionContext ctx) const {
        MPReal r(ctx);
        mpfr_set(r.x_, x_, MPFR_RNDN);
        return r;
    }

    // Canonical scientific form "d.ddd...e<exp>". With no argument the
    // digit count is chosen so that from_decimal round-trips bit-exactly.
    std::string to_decimal(size_t digits) const;
    std::string to_decimal() const { return to_decimal(roundtrip_digits(precision())); }
    static size_t roundtrip_digits(long bits) {
        // ceil(P*log10(2)) + 2
        return static_cast<size_t>((bits * 30103L + 99999L) / 100000L) + 2;
    }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    bool is_nan() const { return mpfr_nan_p(x_) != 0; }
    int sign() const { return mpfr_sgn(x_); }

    MPReal operator-() const {
        MPReal r(context());
        mpfr_neg(r.x_, x_, MPFR_RNDN);
        return r;
    }

    MPReal& operator+=(const MPReal& o) { check(o); mpfr_add(x_, x_, o.x_, MPFR_RNDN); return *this; }
    MPReal& operator-=(const MPReal& o) { check(o); mpfr_sub(x_, x_, o.x_, MPFR_RNDN); return *this; }
    MPReal& operator*=(const MPReal& o) { check(o); mpfr_mul(x_, x_, o.x_, MPFR_RNDN); return *this; }
    MPReal& operator/=(const MPReal& o) {
        check(o);
        if (o.is_zero()) throw arithmetic_error("division by exact zero");
        mpfr_div(x_, x_, o.x_, MPFR_RNDN);
        return *this;
    }

    friend MPReal operator+(MPReal a, const MPReal& b) { a += b; return a; }
    friend MPReal operator-(MPReal a, const MPReal& b) { a -= b; return a; }
    friend MPReal operator*(MPReal a, const MPReal& b) { a *= b; return a; }
    friend MPReal operator/(MPReal a, const MPReal& b) { a /= b; return a; }

    friend bool operator==(const MPReal& a, const MPReal& b) { return mpfr_equal_p(a.x_, b.x_) != 0; }
    friend bool operator!=(const MPReal& a, const MPReal& b) { return !(a == b); }
    friend bool operator<(const MPReal& a, const MPReal& b) { return mpfr_less_p(a.x_, b.x_) != 0; }
    friend bool operator<=(const MPReal& a, const MPReal& b) { return mpfr_lessequal_p(a.x_, b.x_) != 0; }
    friend bool operator>(const MPReal& a, const MPReal& b) { return mpfr_greater_p(a.x_, b.x_) != 0; }
    friend bool operator>=(const MPReal& a, const MPReal& b) { return mpfr_greaterequal_p(a.x_, b.x_) != 0; }

    friend bool operator==(const MPReal& a, long b) { return mpfr_cmp_si(a.x_, b) == 0; }
    friend bool operator<(const MPReal& a, long b) { return mpfr_cmp_si(a.x_, b) < 0; }
    friend bool operator>(const MPReal& a, long b) { return mpfr_cmp_si(a.x_, b) > 0; }

    // Raw handle for inner loops (rotation kernels); the value semantics
    // above stay authoritative everywhere else.
    mpfr_ptr raw() { return x_; }
    mpfr_srcptr raw() const { return x_; }

    friend void swap(MPReal& a, MPReal& b) noexcept { mpfr_swap(a.x_, b.x_); }

private:
    void check(const MPReal& o) const {
        if (mpfr_get_prec(x_) != mpfr_get_prec(o.x_))
            throw usage_error("precision context mismatch");
    }
    mpfr_t x_;
};

MPReal sqrt(const MPReal& x);
MPReal abs(const MPReal& x);
// Overflow-safe sqrt(x^2 + y^2).
MPReal hypot(const MPReal& x, const MPReal& y);

// Interval machine precision: exactly 2^(1-P).
MPReal machine_epsilon(PrecisionContext ctx);

// Complex scalar; re and im always share one context.
class MPComplex {
public:
    explicit MPComplex(PrecisionContext ctx) : re(ctx), im(ctx) {}
    MPComplex(MPReal r, MPReal i) : re(std::move(r)), im(std::move(i)) {
        if (re.precision() != im.precision())
            throw usage_error("precision context mismatch between parts");
    }
    MPComplex(long r, long i, PrecisionContext ctx) : re(r, ctx), im(i, ctx) {}

    PrecisionContext context() const { return re.context(); }
    long precision() const { return re.precision(); }

    MPComplex to_precision(PrecisionContext ctx) const {
        return MPComplex(re.to_precision(ctx), im.to_precision(ctx));
    }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    MPComplex operator-() const { return MPComplex(-re, -im); }
    MPComplex conj() const { return MPComplex(re, -im); }

    MPComplex& operator+=(const MPComplex& o) { re += o.re; im += o.im; return *this; }
    MPComplex& operator-=(const MPComplex& o) { re -= o.re; im -= o.im; return *this; }
    MPComplex& operator*=(const MPComplex& o) { *this = *this * o; return *this; }
    MPComplex& operator/=(const MPComplex& o) { *this = *this / o; return *this; }

    friend MPComplex operator+(MPComplex a, const MPComplex& b) { a += b; return a; }
    friend MPComplex operator-(MPComplex a, const MPComplex& b) { a -= b; return a; }
    friend MPComplex operator*(const MPComplex& a, const MPComplex& b);
    // Scaling-safe quotient (Smith's method).
    friend MPComplex operator/(const MPComplex& a, const MPComplex& b);

    friend MPComplex operator*(const MPReal& s, MPComplex z) {
        z.re *= s;
        z.im *= s;
        return z;
    }

    friend bool operator==(const MPComplex& a, const MPComplex& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const MPComplex& a, const MPComplex& b) { return !(a == b); }

    MPReal re, im;
};

MPReal abs(const MPComplex& z);
MPComplex sqrt(const MPComplex& z);

} // namespace hydrospec
