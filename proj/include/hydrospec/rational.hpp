#pragma once

#include <gmp.h>

#include <string>
#include <string_view>

#include "hydrospec/precision.hpp"

namespace hydrospec {

// Exact rational scalar. Parameters and matrix coefficients are kept in
// this form until the final conversion, so every matrix entry suffers
// exactly one rounding regardless of the target width.
class Rational {
public:
    Rational() { mpq_init(q_); }
    explicit Rational(long v) {
        mpq_init(q_);
        mpq_set_si(q_, v, 1);
    }
    Rational(const Rational& o) {
        mpq_init(q_);
        mpq_set(q_, o.q_);
    }
    Rational(Rational&& o) noexcept {
        mpq_init(q_);
        mpq_swap(q_, o.q_);
    }
    Rational& operator=(const Rational& o) {
        if (this != &o) mpq_set(q_, o.q_);
        return *this;
    }
    Rational& operator=(Rational&& o) noexcept {
        if (this != &o) mpq_swap(q_, o.q_);
        return *this;
    }
    ~Rational() { mpq_clear(q_); }

    // Exact value of a decimal token like "-12.5e3"; every digit counts.
    static Rational from_decimal(std::string_view s);

    // num / 2^shift for two's-complement 128-bit numerators.
    static Rational dyadic(__int128 num, unsigned shift);

    int sign() const { return mpq_sgn(q_); }
    bool is_zero() const { return mpq_sgn(q_) == 0; }

    Rational operator-() const {
        Rational r;
        mpq_neg(r.q_, q_);
        return r;
    }
    Rational& operator+=(const Rational& o) {
        mpq_add(q_, q_, o.q_);
        return *this;
    }
    Rational& operator-=(const Rational& o) {
        mpq_sub(q_, q_, o.q_);
        return *this;
    }
    Rational& operator*=(const Rational& o) {
        mpq_mul(q_, q_, o.q_);
        return *this;
    }
    friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
    friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
    friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return mpq_equal(a.q_, b.q_) != 0;
    }
    friend bool operator!=(const Rational& a, const Rational& b) {
        return !(a == b);
    }

    // Single correctly rounded conversion.
    MPReal to_real(PrecisionContext ctx) const {
        MPReal r(ctx);
        mpfr_set_q(r.raw(), q_, MPFR_RNDN);
        return r;
    }
    void write_to(mpfr_ptr dst) const { mpfr_set_q(dst, q_, MPFR_RNDN); }

    // Plain decimal form; exact, so the denominator must be 2^a 5^b.
    std::string to_decimal() const;

    mpq_srcptr raw() const { return q_; }

private:
    mpq_t q_;
};

} // namespace hydrospec
