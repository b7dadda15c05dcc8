#include "hydrospec/chebtau.hpp"

#include <vector>

#include "hydrospec/errors.hpp"

namespace hydrospec {

namespace {

using i128 = __int128;

// T_i coefficient of (T_p)''; valid for p >= i+2 with p+i even.
i128 d2_entry(long i, long p) {
    i128 v = static_cast<i128>(p) *
             (static_cast<i128>(p) * p - static_cast<i128>(i) * i);
    if (i == 0) {
        if (v % 2 != 0)
            throw arithmetic_error("second-derivative entry is not integral");
        v /= 2;
    }
    return v;
}

// T_i coefficient of (T_p)''''; valid for p >= i+4 with p+i even.
i128 d4_entry(long i, long p) {
    const i128 p2 = static_cast<i128>(p) * p;
    const i128 i2 = static_cast<i128>(i) * i;
    const i128 pm = p2 - 4;
    const i128 im = i2 - 4;
    const i128 core =
        p2 * pm * pm - 3 * p2 * p2 * i2 + 3 * p2 * i2 * i2 - i2 * im * im;
    const i128 den = (i == 0) ? 48 : 24;
    const i128 v = static_cast<i128>(p) * core;
    if (v % den != 0)
        throw arithmetic_error("fourth-derivative entry is not integral");
    return v / den;
}

// Row i of the multiplication operators as (column, weight) pairs with
// weights in quarter units. Derived from the product linearization
// 2 T_a T_b = T_{a+b} + T_{|a-b|}.
void pz2_row(long i, long ncols, std::vector<std::pair<long, int>>& out) {
    out.clear();
    auto add = [&](long c, int q) {
        if (c >= 0 && c < ncols) out.emplace_back(c, q);
    };
    if (i == 0) {
        add(0, 2);
        add(2, 1);
    } else if (i == 1) {
        add(1, 3);
        add(3, 1);
    } else if (i == 2) {
        add(0, 2);
        add(2, 2);
        add(4, 1);
    } else {
        add(i - 2, 1);
        add(i, 2);
        add(i + 2, 1);
    }
}

void pz_row(long i, long ncols, std::vector<std::pair<long, int>>& out) {
    out.clear();
    auto add = [&](long c, int q) {
        if (c >= 0 && c < ncols) out.emplace_back(c, q);
    };
    if (i == 0) {
        add(1, 2);
    } else if (i == 1) {
        add(0, 4);
        add(2, 2);
    } else {
        add(i - 1, 2);
        add(i + 1, 2);
    }
}

void put_bc(MPMatrix& a, long row, const std::vector<long>& weights,
            long col0, PrecisionContext ctx) {
    for (size_t c = 0; c < weights.size(); ++c)
        if (weights[c] != 0)
            a.at(row, col0 + c).re = MPReal(weights[c], ctx);
}

} // namespace

OSParams OSParams::from_decimal(std::string_view re_s, std::string_view a_s) {
    OSParams p{Rational::from_decimal(re_s), Rational::from_decimal(a_s)};
    if (p.re.sign() <= 0)
        throw usage_error("Reynolds number must be positive");
    if (p.a.sign() <= 0) throw usage_error("wavenumber must be positive");
    return p;
}

MPMatrix d2_matrix(long n, PrecisionContext ctx) {
    if (n < 0) throw usage_error("truncation must be non-negative");
    MPMatrix m(n + 1, n + 3, ctx);
    for (long i = 0; i <= n; ++i)
        for (long p = i + 2; p <= n + 2; p += 2)
            Rational::dyadic(d2_entry(i, p), 0).write_to(m.at(i, p).re.raw());
    return m;
}

MPMatrix d4_matrix(long n, PrecisionContext ctx) {
    if (n < 0) throw usage_error("truncation must be non-negative");
    MPMatrix m(n + 1, n + 5, ctx);
    for (long i = 0; i <= n; ++i)
        for (long p = i + 4; p <= n + 4; p += 2)
            Rational::dyadic(d4_entry(i, p), 0).write_to(m.at(i, p).re.raw());
    return m;
}

MPMatrix mult_z(long n, PrecisionContext ctx) {
    if (n < 0) throw usage_error("truncation must be non-negative");
    MPMatrix m(n + 1, n + 3, ctx);
    std::vector<std::pair<long, int>> row;
    for (long i = 0; i <= n; ++i) {
        pz_row(i, n + 3, row);
        for (auto [c, q] : row)
            Rational::dyadic(q, 2).write_to(m.at(i, c).re.raw());
    }
    return m;
}

MPMatrix mult_z2(long n, PrecisionContext ctx) {
    if (n < 0) throw usage_error("truncation must be non-negative");
    MPMatrix m(n + 1, n + 3, ctx);
    std::vector<std::pair<long, int>> row;
    for (long i = 0; i <= n; ++i) {
        pz2_row(i, n + 3, row);
        for (auto [c, q] : row)
            Rational::dyadic(q, 2).write_to(m.at(i, c).re.raw());
    }
    return m;
}

std::pair<std::vector<long>, std::vector<long>> bc_rows(
    long n, long ncols, bool derivative_scaled) {
    if (ncols != n + 3 && ncols != n + 5)
        throw usage_error("boundary rows span N+3 or N+5 columns");
    std::vector<long> even(ncols, 0), odd(ncols, 0);
    for (long c = 0; c < ncols; ++c) {
        const long w = derivative_scaled ? c * c : 1;
        if (c % 2 == 0)
            even[c] = w;
        else
            odd[c] = w;
    }
    return {std::move(even), std::move(odd)};
}

TauSystem assemble_d2(FlowProfile flow, const OSParams& params, long n,
                      PrecisionContext ctx) {
    if (n < 4)
        throw usage_error("truncation must be at least 4 to hold the "
                          "boundary rows");
    const long m = n + 3;
    const long order = 2 * m;
    MPMatrix A(order, order, ctx), B(order, order, ctx);
    const Rational a2 = params.a * params.a;
    const Rational are = params.a * params.re;
    const Rational two_are = Rational(2) * are;

    // coupling rows: (D^2 - a^2) phi - chi = 0, purely real
    for (long i = 0; i <= n; ++i) {
        for (long p = i + 2; p <= n + 2; p += 2)
            Rational::dyadic(d2_entry(i, p), 0).write_to(A.at(i, p).re.raw());
        (-a2).write_to(A.at(i, i).re.raw());
        A.at(i, m + i).re = MPReal(-1, ctx);
    }
    auto [bc_even, bc_odd] = bc_rows(n, m, false);
    put_bc(A, n + 1, bc_even, 0, ctx);
    put_bc(A, n + 2, bc_odd, 0, ctx);

    // transport rows: real (D^2 - a^2) on chi, flow terms imaginary
    std::vector<std::pair<long, int>> prow;
    for (long i = 0; i <= n; ++i) {
        const long r = m + i;
        for (long p = i + 2; p <= n + 2; p += 2)
            Rational::dyadic(d2_entry(i, p), 0)
                .write_to(A.at(r, m + p).re.raw());
        (-a2).write_to(A.at(r, m + i).re.raw());
        if (flow == FlowProfile::Poiseuille) {
            (-two_are).write_to(A.at(r, i).im.raw());
            // aRe (Pi_z2 - Id) on chi; every row of Pi_z2 covers its
            // diagonal, so the identity folds into the loop
            pz2_row(i, m, prow);
            for (auto [c, q] : prow) {
                Rational v = Rational::dyadic(q, 2);
                if (c == i) v -= Rational(1);
                (are * v).write_to(A.at(r, m + c).im.raw());
            }
        } else {
            pz_row(i, m, prow);
            for (auto [c, q] : prow)
                (-(are * Rational::dyadic(q, 2)))
                    .write_to(A.at(r, m + c).im.raw());
        }
        (-are).write_to(B.at(r, m + i).im.raw());
    }
    auto [sc_even, sc_odd] = bc_rows(n, m, true);
    put_bc(A, order - 2, sc_odd, 0, ctx);
    put_bc(A, order - 1, sc_even, 0, ctx);

    return TauSystem{std::move(A), std::move(B), n,
                     TauMethod::D2,  flow,        params};
}

TauSystem assemble_d4(FlowProfile flow, const OSParams& params, long n,
                      PrecisionContext ctx) {
    if (n < 4)
        throw usage_error("truncation must be at least 4 to hold the "
                          "boundary rows");
    const long order = n + 5;
    MPMatrix A(order, order, ctx), B(order, order, ctx);
    const Rational a2 = params.a * params.a;
    const Rational a4 = a2 * a2;
    const Rational are = params.a * params.re;
    const Rational a2are = a2 * are;
    const bool pois = (flow == FlowProfile::Poiseuille);

    // product of the flow's multiplication operator with the second
    // derivative, in quarter units; rows 0..n over all N+5 columns
    std::vector<std::vector<i128>> w(n + 1, std::vector<i128>(order, 0));
    {
        std::vector<std::pair<long, int>> prow;
        for (long i = 0; i <= n; ++i) {
            if (pois)
                pz2_row(i, n + 3, prow);
            else
                pz_row(i, n + 3, prow);
            for (auto [k, q] : prow)
                for (long p = k + 2; p <= n + 4; p += 2)
                    w[i][p] += static_cast<i128>(q) * d2_entry(k, p);
        }
    }

    // operator rows accumulate overlapping terms exactly, then round once
    std::vector<Rational> rr(order), ri(order);
    std::vector<long> touched;
    auto addr = [&](long c, Rational v) {
        rr[c] += v;
        touched.push_back(c);
    };
    auto addi = [&](long c, Rational v) {
        ri[c] += v;
        touched.push_back(c);
    };
    std::vector<std::pair<long, int>> prow;
    for (long i = 0; i <= n; ++i) {
        for (long p = i + 4; p <= n + 4; p += 2)
            addr(p, Rational::dyadic(d4_entry(i, p), 0));
        for (long p = i + 2; p <= n + 4; p += 2) {
            const Rational d2ip = Rational::dyadic(d2_entry(i, p), 0);
            addr(p, -(Rational(2) * a2 * d2ip));
            // both flows: -aRe D^2 appears in B; Poiseuille also in A
            if (pois) addi(p, -(are * d2ip));
            (-(are * d2ip)).write_to(B.at(i, p).im.raw());
        }
        addr(i, a4);
        a2are.write_to(B.at(i, i).im.raw());
        if (pois) {
            for (long p = 0; p < order; ++p)
                if (w[i][p] != 0)
                    addi(p, are * Rational::dyadic(w[i][p], 2));
            addi(i, -(Rational(2) * are));
            pz2_row(i, n + 3, prow);
            for (auto [c, q] : prow) {
                Rational v = Rational::dyadic(q, 2);
                if (c == i) v -= Rational(1);
                addi(c, -(a2are * v));
            }
        } else {
            for (long p = 0; p < order; ++p)
                if (w[i][p] != 0)
                    addi(p, -(are * Rational::dyadic(w[i][p], 2)));
            pz_row(i, n + 3, prow);
            for (auto [c, q] : prow) addi(c, a2are * Rational::dyadic(q, 2));
        }
        for (long c : touched) {
            if (!rr[c].is_zero()) {
                rr[c].write_to(A.at(i, c).re.raw());
                rr[c] = Rational();
            }
            if (!ri[c].is_zero()) {
                ri[c].write_to(A.at(i, c).im.raw());
                ri[c] = Rational();
            }
        }
        touched.clear();
    }

    auto [bc_even, bc_odd] = bc_rows(n, order, false);
    auto [sc_even, sc_odd] = bc_rows(n, order, true);
    put_bc(A, n + 1, bc_even, 0, ctx);
    put_bc(A, n + 2, bc_odd, 0, ctx);
    put_bc(A, n + 3, sc_odd, 0, ctx);
    put_bc(A, n + 4, sc_even, 0, ctx);

    return TauSystem{std::move(A), std::move(B), n,
                     TauMethod::D4,  flow,        params};
}

} // namespace hydrospec
