#include "hydrospec/rational.hpp"

#include <cctype>

#include "hydrospec/errors.hpp"

namespace hydrospec {

Rational Rational::from_decimal(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string_view t = s.substr(b, e - b);
    if (t.empty()) throw parse_error("empty decimal token");

    size_t pos = 0;
    bool neg = false;
    if (t[pos] == '+' || t[pos] == '-') {
        neg = (t[pos] == '-');
        ++pos;
    }
    std::string digits;
    long frac_len = 0;
    bool seen_digit = false, seen_dot = false;
    for (; pos < t.size(); ++pos) {
        char c = t[pos];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_dot) ++frac_len;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!seen_digit)
        throw parse_error("decimal token has no digits: '" + std::string(s) +
                          "'");
    long exp10 = 0;
    if (pos < t.size() && (t[pos] == 'e' || t[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < t.size() && (t[pos] == '+' || t[pos] == '-')) {
            eneg = (t[pos] == '-');
            ++pos;
        }
        if (pos >= t.size() || t[pos] < '0' || t[pos] > '9')
            throw parse_error("missing exponent digits: '" + std::string(s) +
                              "'");
        long v = 0;
        for (; pos < t.size() && t[pos] >= '0' && t[pos] <= '9'; ++pos) {
            v = v * 10 + (t[pos] - '0');
            if (v > 1000000) throw parse_error("exponent out of range");
        }
        exp10 = eneg ? -v : v;
    }
    if (pos != t.size())
        throw parse_error("trailing characters in decimal token: '" +
                          std::string(s) + "'");

    Rational r;
    mpz_t num, den;
    mpz_init_set_str(num, digits.c_str(), 10);
    mpz_init_set_ui(den, 1);
    long shift = exp10 - frac_len;
    if (shift >= 0) {
        mpz_t p;
        mpz_init(p);
        mpz_ui_pow_ui(p, 10, static_cast<unsigned long>(shift));
        mpz_mul(num, num, p);
        mpz_clear(p);
    } else {
        mpz_ui_pow_ui(den, 10, static_cast<unsigned long>(-shift));
    }
    if (neg) mpz_neg(num, num);
    mpq_set_num(r.q_, num);
    mpq_set_den(r.q_, den);
    mpq_canonicalize(r.q_);
    mpz_clear(num);
    mpz_clear(den);
    return r;
}

Rational Rational::dyadic(__int128 num, unsigned shift) {
    Rational r;
    bool neg = num < 0;
    unsigned __int128 u =
        neg ? -static_cast<unsigned __int128>(num)
            : static_cast<unsigned __int128>(num);
    mpz_t z;
    mpz_init_set_ui(z, static_cast<unsigned long>(u >> 64));
    mpz_mul_2exp(z, z, 64);
    mpz_t lo;
    mpz_init_set_ui(lo, static_cast<unsigned long>(u));
    mpz_add(z, z, lo);
    mpz_clear(lo);
    if (neg) mpz_neg(z, z);
    mpq_set_num(r.q_, z);
    mpz_clear(z);
    mpz_t d;
    mpz_init_set_ui(d, 1);
    mpz_mul_2exp(d, d, shift);
    mpq_set_den(r.q_, d);
    mpz_clear(d);
    mpq_canonicalize(r.q_);
    return r;
}

std::string Rational::to_decimal() const {
    mpz_t num, den;
    mpz_init(num);
    mpz_init(den);
    mpq_get_num(num, q_);
    mpq_get_den(den, q_);

    // factor the denominator as 2^a 5^b; anything else has no finite
    // decimal expansion
    unsigned long twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den, 2)) {
        mpz_divexact_ui(den, den, 2);
        ++twos;
    }
    while (mpz_divisible_ui_p(den, 5)) {
        mpz_divexact_ui(den, den, 5);
        ++fives;
    }
    if (mpz_cmp_ui(den, 1) != 0) {
        mpz_clear(num);
        mpz_clear(den);
        throw arithmetic_error("rational has no finite decimal form");
    }
    unsigned long k = twos > fives ? twos : fives;
    mpz_t scale;
    mpz_init(scale);
    if (twos < k) {
        mpz_ui_pow_ui(scale, 2, k - twos);
        mpz_mul(num, num, scale);
    }
    if (fives < k) {
        mpz_ui_pow_ui(scale, 5, k - fives);
        mpz_mul(num, num, scale);
    }
    mpz_clear(scale);
    mpz_clear(den);

    bool neg = mpz_sgn(num) < 0;
    mpz_abs(num, num);
    char* raw = mpz_get_str(nullptr, 10, num);
    std::string body(raw);
    void (*freefn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(raw, body.size() + 1);
    mpz_clear(num);

    std::string out;
    if (neg) out.push_back('-');
    if (k == 0) {
        out += body;
    } else {
        if (body.size() <= k) body.insert(0, k + 1 - body.size(), '0');
        out += body.substr(0, body.size() - k);
        out.push_back('.');
        out += body.substr(body.size() - k);
    }
    return out;
}

} // namespace hydrospec
