#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "hydrospec/qz.hpp"

using namespace hydrospec;

namespace {

using IntMat = std::vector<std::vector<long long>>;

MPMatrix to_mp(const IntMat& m, PrecisionContext ctx) {
    MPMatrix out(m.size(), m[0].size(), ctx);
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m[0].size(); ++j)
            out.at(i, j) = MPComplex(static_cast<long>(m[i][j]), 0, ctx);
    return out;
}

int permutation_sign(const std::vector<size_t>& p) {
    int inv = 0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return (inv % 2 == 0) ? 1 : -1;
}

// Coefficients of det(A - x B) in ascending powers, exact integer
// arithmetic via the Leibniz expansion. Entries must stay small enough
// that all products fit long long; the corpora here use |entry| <= 5.
std::vector<long long> pencil_charpoly(const IntMat& A, const IntMat& B) {
    const size_t n = A.size();
    std::vector<long long> acc(n + 1, 0);
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), size_t{0});
    do {
        const long long sign = permutation_sign(perm);
        std::vector<long long> poly{1};
        for (size_t i = 0; i < n; ++i) {
            const long long a = A[i][perm[i]];
            const long long b = B[i][perm[i]];
            std::vector<long long> next(poly.size() + 1, 0);
            for (size_t k = 0; k < poly.size(); ++k) {
                next[k] += poly[k] * a;
                next[k + 1] -= poly[k] * b;
            }
            poly = std::move(next);
        }
        for (size_t k = 0; k < poly.size(); ++k) acc[k] += sign * poly[k];
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

size_t poly_degree(const std::vector<long long>& c) {
    size_t d = c.size();
    while (d > 0 && c[d - 1] == 0) --d;
    return d == 0 ? 0 : d - 1; // degree of the zero polynomial reported as 0
}

bool poly_is_zero(const std::vector<long long>& c) {
    return std::all_of(c.begin(), c.end(), [](long long v) { return v == 0; });
}

// Durand-Kerner on exact integer coefficients; the working width should be
// several times the width under test so the roots act as ground truth.
std::vector<MPComplex> poly_roots(std::vector<long long> c,
                                  PrecisionContext ctx, long iters = 600) {
    while (!c.empty() && c.back() == 0) c.pop_back();
    REQUIRE(!c.empty());
    const size_t d = c.size() - 1;
    std::vector<MPComplex> z;
    if (d == 0) return z;

    std::vector<MPComplex> monic;
    MPComplex lead(static_cast<long>(c[d]), 0, ctx);
    for (size_t i = 0; i < d; ++i)
        monic.push_back(MPComplex(static_cast<long>(c[i]), 0, ctx) / lead);

    double bound = 1.0;
    for (size_t i = 0; i < d; ++i)
        bound = std::max(bound,
                         1.0 + std::abs(double(c[i]) / double(c[d])));
    const MPReal scale = MPReal::from_double(bound, ctx);
    MPComplex seed(MPReal::from_double(0.4, ctx),
                   MPReal::from_double(0.9, ctx));
    MPComplex g(1, 0, ctx);
    for (size_t k = 0; k < d; ++k) {
        g = g * seed;
        z.push_back(scale * g);
    }

    MPComplex p(ctx), den(ctx), diff(ctx);
    const MPComplex nudge(MPReal::from_double(1e-30, ctx),
                          MPReal::from_double(1e-30, ctx));
    for (long it = 0; it < iters; ++it) {
        for (size_t k = 0; k < d; ++k) {
            p = MPComplex(1, 0, ctx);
            for (size_t i = d; i-- > 0;) p = p * z[k] + monic[i];
            den = MPComplex(1, 0, ctx);
            for (size_t j = 0; j < d; ++j) {
                if (j == k) continue;
                diff = z[k] - z[j];
                if (diff.is_zero()) diff = nudge;
                den = den * diff;
            }
            z[k] -= p / den;
        }
    }
    return z;
}

// Symmetric matching distance at the precision of u's entries.
double match_dist(const std::vector<MPComplex>& u,
                  const std::vector<MPComplex>& v, PrecisionContext wide) {
    REQUIRE(u.size() == v.size());
    if (u.empty()) return 0.0;
    double worst = 0.0;
    auto one_sided = [&](const std::vector<MPComplex>& from,
                         const std::vector<MPComplex>& to) {
        for (const MPComplex& a : from) {
            double best = HUGE_VAL;
            MPComplex aw = a.to_precision(wide);
            for (const MPComplex& b : to)
                best = std::min(best,
                                abs(aw - b.to_precision(wide)).to_double());
            worst = std::max(worst, best);
        }
    };
    one_sided(u, v);
    one_sided(v, u);
    return worst;
}

IntMat random_int_mat(std::mt19937_64& rng, size_t n, long long lo,
                      long long hi) {
    std::uniform_int_distribution<long long> d(lo, hi);
    IntMat m(n, std::vector<long long>(n));
    for (auto& row : m)
        for (auto& e : row) e = d(rng);
    return m;
}

IntMat cycle_matrix(size_t n) {
    IntMat c(n, std::vector<long long>(n, 0));
    for (size_t i = 0; i + 1 < n; ++i) c[i + 1][i] = 1;
    c[0][n - 1] = 1;
    return c;
}

} // namespace

TEST_CASE("triangular pencils deflate with zero sweeps and exact values") {
    PrecisionContext ctx(53);
    IntMat a{{3, 7, -1}, {0, -4, 2}, {0, 0, 5}};
    IntMat b{{1, 0, 0}, {0, 2, 0}, {0, 0, 1}};
    Eigenvalues ev = eigenvalues(to_mp(a, ctx), to_mp(b, ctx));
    REQUIRE(ev.finite.size() == 3);
    CHECK(ev.total_sweeps == 0);
    CHECK(ev.infinite_count == 0);
    CHECK(ev.finite[0] == MPComplex(-2, 0, ctx));
    CHECK(ev.finite[1] == MPComplex(3, 0, ctx));
    CHECK(ev.finite[2] == MPComplex(5, 0, ctx));

    IntMat b2{{1, 0, 0}, {0, 0, 0}, {0, 0, 1}};
    Eigenvalues ev2 = eigenvalues(to_mp(a, ctx), to_mp(b2, ctx));
    REQUIRE(ev2.finite.size() == 2);
    CHECK(ev2.infinite_count == 1);
    CHECK(ev2.finite[0] == MPComplex(3, 0, ctx));
    CHECK(ev2.finite[1] == MPComplex(5, 0, ctx));
}

TEST_CASE("tiny orders") {
    PrecisionContext ctx(113);
    MPMatrix e(0, 0, ctx);
    Eigenvalues ev0 = eigenvalues(e, e);
    CHECK(ev0.finite.empty());
    CHECK(ev0.infinite_count == 0);

    Eigenvalues ev1 = eigenvalues(to_mp({{7}}, ctx), to_mp({{2}}, ctx));
    REQUIRE(ev1.finite.size() == 1);
    CHECK(ev1.finite[0].re == MPReal::from_double(3.5, ctx));
    CHECK(ev1.finite[0].im.is_zero());

    Eigenvalues ev2 = eigenvalues_standard(to_mp({{0, 1}, {1, 0}}, ctx));
    REQUIRE(ev2.finite.size() == 2);
    MPReal err = abs(ev2.finite[0] - MPComplex(-1, 0, ctx)) +
                 abs(ev2.finite[1] - MPComplex(1, 0, ctx));
    CHECK(err.to_double() < 1e-30);
}

TEST_CASE("integer pencil corpus matches exact characteristic roots") {
    PrecisionContext ctx(212), wide(848);
    std::mt19937_64 rng(2025);
    int tested = 0;
    for (int trial = 0; trial < 20; ++trial) {
        IntMat a = random_int_mat(rng, 3, -5, 5);
        IntMat b = random_int_mat(rng, 3, -5, 5);
        std::vector<long long> cp = pencil_charpoly(a, b);
        if (poly_is_zero(cp)) continue;
        ++tested;
        size_t degree = poly_degree(cp);
        Eigenvalues ev = eigenvalues(to_mp(a, ctx), to_mp(b, ctx));
        CHECK(ev.infinite_count == 3 - degree);
        REQUIRE(ev.finite.size() == degree);
        std::vector<MPComplex> roots = poly_roots(cp, wide);
        CHECK(match_dist(ev.finite, roots, wide) < 1e-10);
    }
    CHECK(tested >= 15);
}

TEST_CASE("zero columns in the second matrix become infinite eigenvalues") {
    PrecisionContext ctx(212), wide(848);
    std::mt19937_64 rng(99);
    IntMat a = random_int_mat(rng, 6, -5, 5);
    IntMat b = random_int_mat(rng, 6, -5, 5);
    for (size_t i = 0; i < 6; ++i)
        for (size_t j = 3; j < 6; ++j) b[i][j] = 0;
    std::vector<long long> cp = pencil_charpoly(a, b);
    REQUIRE(!poly_is_zero(cp));
    size_t degree = poly_degree(cp);
    CHECK(degree <= 3);
    Eigenvalues ev = eigenvalues(to_mp(a, ctx), to_mp(b, ctx));
    CHECK(ev.infinite_count == 6 - degree);
    REQUIRE(ev.finite.size() == degree);
    std::vector<MPComplex> roots = poly_roots(cp, wide);
    CHECK(match_dist(ev.finite, roots, wide) < 1e-10);
}

TEST_CASE("reduction produces the exact shape and preserves norms") {
    PrecisionContext ctx(212), wide(848);
    std::mt19937_64 rng(1234);
    IntMat ai = random_int_mat(rng, 6, -5, 5);
    IntMat bi = random_int_mat(rng, 6, -5, 5);
    MPMatrix a = to_mp(ai, ctx), b = to_mp(bi, ctx);
    auto [h, t] = hessenberg_triangular(a, b);
    for (size_t i = 0; i < 6; ++i)
        for (size_t j = 0; j < 6; ++j) {
            if (i >= j + 2) CHECK(h.at(i, j).is_zero());
            if (i >= j + 1) CHECK(t.at(i, j).is_zero());
        }
    MPReal rel_h =
        abs(h.frobenius_norm() - a.frobenius_norm()) / a.frobenius_norm();
    MPReal rel_t =
        abs(t.frobenius_norm() - b.frobenius_norm()) / b.frobenius_norm();
    CHECK(rel_h.to_double() < 1e-60);
    CHECK(rel_t.to_double() < 1e-60);

    // the reduced pencil carries the same spectrum
    std::vector<long long> cp = pencil_charpoly(ai, bi);
    REQUIRE(!poly_is_zero(cp));
    QZResult qz = qz_iterate(h, t);
    REQUIRE(qz.converged);
    std::vector<MPComplex> lam;
    const MPReal floor = machine_epsilon(ctx) * b.frobenius_norm();
    for (const GeneralizedEigenPair& p : qz.pairs)
        if (abs(p.beta) > floor) lam.push_back(p.alpha / p.beta);
    REQUIRE(lam.size() == poly_degree(cp));
    std::vector<MPComplex> roots = poly_roots(cp, wide);
    CHECK(match_dist(lam, roots, wide) < 1e-10);
}

TEST_CASE("defective eigenvalue error follows the square-root scale") {
    // Jordan block for 5 conjugated by a generic rotation built at the
    // width under test. The rounding noise splits the true pair on the
    // sqrt(eps) scale; a backward-stable solve may resolve that split or
    // collapse it to the mean, but its forward error against the true
    // pair must stay on the same sqrt scale and shrink with the width.
    auto forward_err = [](long bits) {
        PrecisionContext ctx(bits), wide(1000);
        MPReal theta(1, ctx), c(ctx), s(ctx);
        mpfr_cos(c.raw(), theta.raw(), MPFR_RNDN);
        mpfr_sin(s.raw(), theta.raw(), MPFR_RNDN);
        MPMatrix q(2, 2, ctx);
        q.at(0, 0) = MPComplex(c, MPReal(ctx));
        q.at(0, 1) = MPComplex(s, MPReal(ctx));
        q.at(1, 0) = MPComplex(-s, MPReal(ctx));
        q.at(1, 1) = MPComplex(c, MPReal(ctx));
        MPMatrix m =
            multiply(multiply(q, to_mp({{5, 1}, {0, 5}}, ctx)), adjoint(q));
        Eigenvalues ev = eigenvalues_standard(m);
        REQUIRE(ev.finite.size() == 2);
        // true pair from the quadratic formula at a far wider precision
        MPMatrix w = m.to_precision(wide);
        MPComplex tr = w.at(0, 0) + w.at(1, 1);
        MPComplex det =
            w.at(0, 0) * w.at(1, 1) - w.at(0, 1) * w.at(1, 0);
        MPComplex sq = sqrt(tr * tr - MPComplex(4, 0, wide) * det);
        MPReal half = MPReal(1, wide) / MPReal(2, wide);
        std::vector<MPComplex> truth{half * (tr + sq), half * (tr - sq)};
        return match_dist(ev.finite, truth, wide);
    };
    double m53 = forward_err(53);
    double m200 = forward_err(200);
    CHECK(m53 < 1e-6);   // ~sqrt(2^-52)
    CHECK(m200 < 1e-26); // ~sqrt(2^-199)
    CHECK(m53 / m200 > 1e10);

    // the unrotated block is already Hessenberg: no rotations, no error
    PrecisionContext ctx(53);
    Eigenvalues exact = eigenvalues_standard(to_mp({{5, 1}, {0, 5}}, ctx));
    CHECK(exact.total_sweeps == 0);
    REQUIRE(exact.finite.size() == 2);
    CHECK(exact.finite[0] == MPComplex(5, 0, ctx));
    CHECK(exact.finite[1] == MPComplex(5, 0, ctx));
}

TEST_CASE("cyclic shift stall is reported and exceptional shifts break it") {
    PrecisionContext ctx(113), wide(452);
    MPMatrix c = to_mp(cycle_matrix(6), ctx);
    MPMatrix id = MPMatrix::identity(6, ctx);

    QZConfig starved;
    starved.exceptional_shift_period = 1000000; // never fires
    QZResult stalled = qz_iterate(c, id, starved);
    CHECK(!stalled.converged);
    CHECK_THROWS_AS(eigenvalues(c, id, starved), solver_error);

    Eigenvalues ev = eigenvalues_standard(c);
    REQUIRE(ev.finite.size() == 6);
    std::vector<long long> cp =
        pencil_charpoly(cycle_matrix(6),
                        {{1, 0, 0, 0, 0, 0},
                         {0, 1, 0, 0, 0, 0},
                         {0, 0, 1, 0, 0, 0},
                         {0, 0, 0, 1, 0, 0},
                         {0, 0, 0, 0, 1, 0},
                         {0, 0, 0, 0, 0, 1}});
    std::vector<MPComplex> roots = poly_roots(cp, wide);
    CHECK(match_dist(ev.finite, roots, wide) < 1e-25);
}

TEST_CASE("identically singular pencil is rejected") {
    PrecisionContext ctx(53);
    MPMatrix a = to_mp({{1, 0}, {0, 0}}, ctx);
    CHECK_THROWS_AS(eigenvalues(a, a), solver_error);
}

TEST_CASE("input contracts") {
    PrecisionContext ctx(53);
    MPMatrix rect(2, 3, ctx);
    MPMatrix sq2 = MPMatrix::identity(2, ctx);
    MPMatrix sq3 = MPMatrix::identity(3, ctx);
    CHECK_THROWS_AS(eigenvalues(rect, rect), usage_error);
    CHECK_THROWS_AS(eigenvalues(sq2, sq3), usage_error);
    CHECK_THROWS_AS(
        eigenvalues(sq2, MPMatrix::identity(2, PrecisionContext(100))),
        usage_error);

    // qz_iterate demands the reduced shape
    MPMatrix full = to_mp({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}, ctx);
    CHECK_THROWS_AS(qz_iterate(full, sq3), usage_error);
    MPMatrix hess = to_mp({{1, 1, 1}, {1, 1, 1}, {0, 1, 1}}, ctx);
    CHECK_THROWS_AS(qz_iterate(hess, hess), usage_error);

    QZConfig bad;
    bad.max_sweeps_per_eigenvalue = 0;
    CHECK_THROWS_AS(qz_iterate(sq2, sq2, bad), usage_error);
    QZConfig bad2;
    bad2.deflation_factor = 0.0;
    CHECK_THROWS_AS(qz_iterate(sq2, sq2, bad2), usage_error);
}

TEST_CASE("repeated runs are bitwise identical") {
    PrecisionContext ctx(113);
    std::mt19937_64 rng(5150);
    IntMat a = random_int_mat(rng, 5, -5, 5);
    IntMat b = random_int_mat(rng, 5, -5, 5);
    Eigenvalues first = eigenvalues(to_mp(a, ctx), to_mp(b, ctx));
    Eigenvalues second = eigenvalues(to_mp(a, ctx), to_mp(b, ctx));
    REQUIRE(first.finite.size() == second.finite.size());
    CHECK(first.infinite_count == second.infinite_count);
    for (size_t i = 0; i < first.finite.size(); ++i) {
        CHECK(mpfr_equal_p(first.finite[i].re.raw(),
                           second.finite[i].re.raw()));
        CHECK(mpfr_equal_p(first.finite[i].im.raw(),
                           second.finite[i].im.raw()));
    }
}

TEST_CASE("integer pencil corpus at order four matches exact characteristic roots") {
    PrecisionContext ctx(212), wide(848);
    std::mt19937_64 rng(424242);
    int tested = 0;
    for (int trial = 0; trial < 14; ++trial) {
        IntMat a = random_int_mat(rng, 4, -5, 5);
        IntMat b = random_int_mat(rng, 4, -5, 5);
        std::vector<long long> cp = pencil_charpoly(a, b);
        if (poly_is_zero(cp)) continue;
        ++tested;
        size_t degree = poly_degree(cp);
        Eigenvalues ev = eigenvalues(to_mp(a, ctx), to_mp(b, ctx));
        CHECK(ev.infinite_count == 4 - degree);
        REQUIRE(ev.finite.size() == degree);
        std::vector<MPComplex> roots = poly_roots(cp, wide);
        CHECK(match_dist(ev.finite, roots, wide) < 1e-10);
    }
    CHECK(tested >= 10);
}

TEST_CASE("unitary equivalence leaves the spectrum invariant at order six") {
    PrecisionContext ctx(212), wide(848);
    std::mt19937_64 rng(777);

    // Product of complex Givens rotations with c, s computed at the
    // working precision, so Q deviates from unitarity only at eps_P.
    auto random_unitary = [&](size_t n) {
        MPMatrix q = MPMatrix::identity(n, ctx);
        std::uniform_real_distribution<double> ang(0.2, 3.0);
        std::uniform_int_distribution<size_t> pick(0, n - 1);
        for (int k = 0; k < 24; ++k) {
            size_t i = pick(rng), j = pick(rng);
            if (i == j) continue;
            MPReal t = MPReal::from_double(ang(rng), ctx);
            MPReal ph = MPReal::from_double(ang(rng), ctx);
            MPReal c(ctx), s(ctx), cp(ctx), sp(ctx);
            mpfr_cos(c.raw(), t.raw(), MPFR_RNDN);
            mpfr_sin(s.raw(), t.raw(), MPFR_RNDN);
            mpfr_cos(cp.raw(), ph.raw(), MPFR_RNDN);
            mpfr_sin(sp.raw(), ph.raw(), MPFR_RNDN);
            MPMatrix r = MPMatrix::identity(n, ctx);
            r.at(i, i) = MPComplex(c, MPReal(0, ctx));
            r.at(j, j) = MPComplex(c, MPReal(0, ctx));
            r.at(i, j) = MPComplex(s * cp, s * sp);
            r.at(j, i) = MPComplex(MPReal(0, ctx) - s * cp, s * sp);
            q = multiply(q, r);
        }
        return q;
    };

    IntMat a = random_int_mat(rng, 6, -5, 5);
    IntMat b = random_int_mat(rng, 6, -5, 5);
    MPMatrix am = to_mp(a, ctx), bm = to_mp(b, ctx);
    Eigenvalues base = eigenvalues(am, bm);
    REQUIRE(base.finite.size() + base.infinite_count == 6);

    MPMatrix q = random_unitary(6), z = random_unitary(6);
    Eigenvalues rotated = eigenvalues(multiply(multiply(q, am), z),
                                      multiply(multiply(q, bm), z));
    CHECK(rotated.infinite_count == base.infinite_count);
    REQUIRE(rotated.finite.size() == base.finite.size());
    CHECK(match_dist(base.finite, rotated.finite, wide) < 1e-40);
}
