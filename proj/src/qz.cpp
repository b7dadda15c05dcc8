#include "hydrospec/qz.hpp"

#include <algorithm>

namespace hydrospec {

namespace {

constexpr mpfr_rnd_t R = MPFR_RNDN;

struct Scratch {
    explicit Scratch(long prec) {
        for (auto& v : t) mpfr_init2(v, prec);
    }
    ~Scratch() {
        for (auto& v : t) mpfr_clear(v);
    }
    Scratch(const Scratch&) = delete;
    Scratch& operator=(const Scratch&) = delete;
    mpfr_t t[8];
};

// Plane rotation with real cosine: rows (x,y) map to
// (c*x + s*y, -conj(s)*x + c*y).
struct Rot {
    explicit Rot(long prec) {
        mpfr_init2(c, prec);
        mpfr_init2(sr, prec);
        mpfr_init2(si, prec);
    }
    ~Rot() {
        mpfr_clear(c);
        mpfr_clear(sr);
        mpfr_clear(si);
    }
    Rot(const Rot&) = delete;
    Rot& operator=(const Rot&) = delete;
    bool trivial() const {
        return mpfr_cmp_ui(c, 1) == 0 && mpfr_zero_p(sr) && mpfr_zero_p(si);
    }
    mpfr_t c, sr, si;
};

// c*f + s*g = r and -conj(s)*f + c*g = 0. r may alias f.
void rot_compute(Rot& g, mpfr_srcptr fr, mpfr_srcptr fi, mpfr_srcptr gr,
                 mpfr_srcptr gi, mpfr_ptr rr, mpfr_ptr ri, Scratch& w) {
    if (mpfr_zero_p(gr) && mpfr_zero_p(gi)) {
        mpfr_set_ui(g.c, 1, R);
        mpfr_set_zero(g.sr, 1);
        mpfr_set_zero(g.si, 1);
        mpfr_set(rr, fr, R);
        mpfr_set(ri, fi, R);
        return;
    }
    mpfr_hypot(w.t[0], gr, gi, R); // |g|
    if (mpfr_zero_p(fr) && mpfr_zero_p(fi)) {
        mpfr_set_zero(g.c, 1);
        mpfr_div(g.sr, gr, w.t[0], R); // s = conj(g)/|g|
        mpfr_div(g.si, gi, w.t[0], R);
        mpfr_neg(g.si, g.si, R);
        mpfr_set(rr, w.t[0], R);
        mpfr_set_zero(ri, 1);
        return;
    }
    mpfr_hypot(w.t[1], fr, fi, R);      // |f|
    mpfr_hypot(w.t[2], w.t[1], w.t[0], R); // d
    mpfr_div(g.c, w.t[1], w.t[2], R);
    mpfr_div(w.t[3], fr, w.t[1], R); // phase(f)
    mpfr_div(w.t[4], fi, w.t[1], R);
    // s = phase(f) * conj(g) / d
    mpfr_mul(w.t[5], w.t[3], gr, R);
    mpfr_mul(w.t[6], w.t[4], gi, R);
    mpfr_add(w.t[5], w.t[5], w.t[6], R);
    mpfr_div(g.sr, w.t[5], w.t[2], R);
    mpfr_mul(w.t[5], w.t[4], gr, R);
    mpfr_mul(w.t[6], w.t[3], gi, R);
    mpfr_sub(w.t[5], w.t[5], w.t[6], R);
    mpfr_div(g.si, w.t[5], w.t[2], R);
    // r = phase(f) * d
    mpfr_mul(rr, w.t[3], w.t[2], R);
    mpfr_mul(ri, w.t[4], w.t[2], R);
}

void rot_pair(const Rot& g, mpfr_ptr xr, mpfr_ptr xi, mpfr_ptr yr, mpfr_ptr yi,
              Scratch& w) {
    // new x = c*x + s*y
    mpfr_mul(w.t[0], g.c, xr, R);
    mpfr_mul(w.t[1], g.sr, yr, R);
    mpfr_mul(w.t[2], g.si, yi, R);
    mpfr_sub(w.t[1], w.t[1], w.t[2], R);
    mpfr_add(w.t[3], w.t[0], w.t[1], R);
    mpfr_mul(w.t[0], g.c, xi, R);
    mpfr_mul(w.t[1], g.sr, yi, R);
    mpfr_mul(w.t[2], g.si, yr, R);
    mpfr_add(w.t[1], w.t[1], w.t[2], R);
    mpfr_add(w.t[4], w.t[0], w.t[1], R);
    // new y = -conj(s)*x + c*y
    mpfr_mul(w.t[0], g.c, yr, R);
    mpfr_mul(w.t[1], g.sr, xr, R);
    mpfr_mul(w.t[2], g.si, xi, R);
    mpfr_add(w.t[1], w.t[1], w.t[2], R);
    mpfr_sub(w.t[5], w.t[0], w.t[1], R);
    mpfr_mul(w.t[0], g.c, yi, R);
    mpfr_mul(w.t[1], g.sr, xi, R);
    mpfr_mul(w.t[2], g.si, xr, R);
    mpfr_sub(w.t[1], w.t[1], w.t[2], R);
    mpfr_sub(w.t[6], w.t[0], w.t[1], R);
    mpfr_swap(xr, w.t[3]);
    mpfr_swap(xi, w.t[4]);
    mpfr_swap(yr, w.t[5]);
    mpfr_swap(yi, w.t[6]);
}

void apply_rows(MPMatrix& m, const Rot& g, size_t i, size_t k, size_t c0,
                size_t c1, Scratch& w, bool skip_zero = false) {
    for (size_t j = c0; j < c1; ++j) {
        MPComplex& x = m.at(i, j);
        MPComplex& y = m.at(k, j);
        if (skip_zero && x.is_zero() && y.is_zero()) continue;
        rot_pair(g, x.re.raw(), x.im.raw(), y.re.raw(), y.im.raw(), w);
    }
}

void apply_cols(MPMatrix& m, const Rot& g, size_t jp, size_t js, size_t r0,
                size_t r1, Scratch& w) {
    for (size_t i = r0; i < r1; ++i) {
        MPComplex& x = m.at(i, jp);
        MPComplex& y = m.at(i, js);
        rot_pair(g, x.re.raw(), x.im.raw(), y.re.raw(), y.im.raw(), w);
    }
}

void set_zero(MPComplex& z) {
    mpfr_set_zero(z.re.raw(), 1);
    mpfr_set_zero(z.im.raw(), 1);
}

// |z| <= lim, via hypot in scratch; sets w.t[7].
bool cabs_leq(const MPComplex& z, mpfr_srcptr lim, Scratch& w) {
    mpfr_hypot(w.t[7], z.re.raw(), z.im.raw(), R);
    return mpfr_cmp(w.t[7], lim) <= 0;
}

void require_square_pair(const MPMatrix& a, const MPMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw usage_error("pencil matrices must be square");
    if (a.rows() != b.rows())
        throw usage_error("pencil matrices must have the same order");
    if (a.context() != b.context())
        throw usage_error("precision context mismatch");
}

MPComplex clamp_magnitude(const MPComplex& b, const MPReal& floor) {
    MPReal m = abs(b);
    if (m > floor) return b;
    PrecisionContext ctx = b.context();
    if (m.is_zero()) return MPComplex(floor, MPReal(ctx));
    MPReal scale = floor / m;
    return MPComplex(b.re * scale, b.im * scale);
}

} // namespace

std::pair<MPMatrix, MPMatrix> hessenberg_triangular(const MPMatrix& a,
                                                    const MPMatrix& b) {
    require_square_pair(a, b);
    const size_t n = a.rows();
    PrecisionContext ctx = a.context();
    const long prec = ctx.bits();
    MPMatrix h = a;
    MPMatrix t = b;
    if (n <= 1) return {std::move(h), std::move(t)};

    Scratch w(prec);
    // Structurally zero columns of T stay zero under both stages (row
    // reflectors and row rotations mix rows within a column; column
    // rotations pair a zero fill with a zero column and are skipped), so
    // they can be skipped wholesale. The tau pencils start with about
    // half of B's columns zero.
    std::vector<char> tcol_zero(n, 1);
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i)
            if (!t.at(i, j).is_zero()) {
                tcol_zero[j] = 0;
                break;
            }

    // Stage 1: Householder triangularization of T, reflectors applied to
    // both matrices from the left.
    {
        std::vector<MPComplex> v;
        v.reserve(n);
        for (size_t i = 0; i < n; ++i) v.emplace_back(ctx);
        MPReal sig(ctx), ma(ctx), mu(ctx), vv(ctx), tau(ctx);
        MPComplex acc(ctx), tmp(ctx);
        for (size_t k = 0; k + 1 < n; ++k) {
            // norm of the below-diagonal part of column k
            mpfr_set_zero(sig.raw(), 1);
            for (size_t i = k + 1; i < n; ++i) {
                const MPComplex& z = t.at(i, k);
                mpfr_hypot(sig.raw(), sig.raw(), z.re.raw(), R);
                mpfr_hypot(sig.raw(), sig.raw(), z.im.raw(), R);
            }
            if (sig.is_zero()) continue;
            const MPComplex& alpha = t.at(k, k);
            ma = abs(alpha);
            mu = hypot(ma, sig); // full column norm
            // v = x + phase(alpha)*mu*e1 avoids cancellation; the image of
            // the column is -phase(alpha)*mu*e1.
            MPComplex phase(ctx);
            if (ma.is_zero()) {
                phase = MPComplex(1, 0, ctx);
            } else {
                phase.re = alpha.re / ma;
                phase.im = alpha.im / ma;
            }
            v[k] = alpha + mu * phase;
            for (size_t i = k + 1; i < n; ++i) v[i] = t.at(i, k);
            // ||v||^2 = 2*mu*(mu + |alpha|), tau = 2/||v||^2
            vv = MPReal(2, ctx) * mu * (mu + ma);
            tau = MPReal(2, ctx) / vv;

            auto reflect_cols = [&](MPMatrix& m, size_t j0, bool skip) {
                for (size_t j = j0; j < m.cols(); ++j) {
                    if (skip && tcol_zero[j]) continue;
                    // acc = v^H * column
                    mpfr_set_zero(acc.re.raw(), 1);
                    mpfr_set_zero(acc.im.raw(), 1);
                    for (size_t i = k; i < n; ++i) {
                        const MPComplex& c = m.at(i, j);
                        if (c.is_zero()) continue;
                        mpfr_mul(w.t[0], v[i].re.raw(), c.re.raw(), R);
                        mpfr_add(acc.re.raw(), acc.re.raw(), w.t[0], R);
                        mpfr_mul(w.t[0], v[i].im.raw(), c.im.raw(), R);
                        mpfr_add(acc.re.raw(), acc.re.raw(), w.t[0], R);
                        mpfr_mul(w.t[0], v[i].re.raw(), c.im.raw(), R);
                        mpfr_add(acc.im.raw(), acc.im.raw(), w.t[0], R);
                        mpfr_mul(w.t[0], v[i].im.raw(), c.re.raw(), R);
                        mpfr_sub(acc.im.raw(), acc.im.raw(), w.t[0], R);
                    }
                    if (acc.is_zero()) continue;
                    tmp.re = tau * acc.re;
                    tmp.im = tau * acc.im;
                    // column -= tmp * v
                    for (size_t i = k; i < n; ++i) {
                        MPComplex& c = m.at(i, j);
                        mpfr_mul(w.t[0], tmp.re.raw(), v[i].re.raw(), R);
                        mpfr_sub(c.re.raw(), c.re.raw(), w.t[0], R);
                        mpfr_mul(w.t[0], tmp.im.raw(), v[i].im.raw(), R);
                        mpfr_add(c.re.raw(), c.re.raw(), w.t[0], R);
                        mpfr_mul(w.t[0], tmp.re.raw(), v[i].im.raw(), R);
                        mpfr_sub(c.im.raw(), c.im.raw(), w.t[0], R);
                        mpfr_mul(w.t[0], tmp.im.raw(), v[i].re.raw(), R);
                        mpfr_sub(c.im.raw(), c.im.raw(), w.t[0], R);
                    }
                }
            };
            reflect_cols(t, k + 1, true);
            reflect_cols(h, 0, false);
            // exact image of the pivot column
            MPComplex& d = t.at(k, k);
            d.re = -(phase.re * mu);
            d.im = -(phase.im * mu);
            for (size_t i = k + 1; i < n; ++i) set_zero(t.at(i, k));
        }
    }

    // Stage 2: Givens reduction of H to Hessenberg form, restoring T's
    // triangularity after every row rotation.
    {
        Rot g(prec);
        for (size_t j = 0; j + 2 < n; ++j) {
            for (size_t i = n - 1; i >= j + 2; --i) {
                if (!h.at(i, j).is_zero()) {
                    MPComplex& f = h.at(i - 1, j);
                    MPComplex& z = h.at(i, j);
                    rot_compute(g, f.re.raw(), f.im.raw(), z.re.raw(),
                                z.im.raw(), f.re.raw(), f.im.raw(), w);
                    set_zero(z);
                    apply_rows(h, g, i - 1, i, j + 1, n, w);
                    // Row mixing cannot populate a structurally zero column,
                    // so the flags survive this rotation.
                    apply_rows(t, g, i - 1, i, i - 1, n, w, true);
                }
                MPComplex& fill = t.at(i, i - 1);
                if (!fill.is_zero()) {
                    MPComplex& piv = t.at(i, i);
                    rot_compute(g, piv.re.raw(), piv.im.raw(), fill.re.raw(),
                                fill.im.raw(), piv.re.raw(), piv.im.raw(), w);
                    set_zero(fill);
                    apply_cols(t, g, i, i - 1, 0, i, w);
                    apply_cols(h, g, i, i - 1, 0, n, w);
                    if (!tcol_zero[i]) tcol_zero[i - 1] = 0;
                }
            }
        }
    }
    return {std::move(h), std::move(t)};
}

QZResult qz_iterate(MPMatrix h, MPMatrix t, const QZConfig& cfg) {
    require_square_pair(h, t);
    if (cfg.max_sweeps_per_eigenvalue < 1 || cfg.exceptional_shift_period < 1)
        throw usage_error("QZ config counts must be >= 1");
    if (!(cfg.deflation_factor > 0.0))
        throw usage_error("deflation factor must be positive");
    const size_t n = h.rows();
    PrecisionContext ctx = h.context();
    const long prec = ctx.bits();

    QZResult result;
    if (n == 0) {
        result.converged = true;
        return result;
    }
    for (size_t i = 0; i + 2 < n; ++i)
        for (size_t j = i + 2; j < n; ++j)
            if (!h.at(j, i).is_zero())
                throw usage_error("matrix is not upper Hessenberg");
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (!t.at(j, i).is_zero())
                throw usage_error("matrix is not upper triangular");

    Scratch w(prec);
    Rot g(prec);
    const MPReal eps = machine_epsilon(ctx);
    MPReal defl_eps = eps;
    mpfr_mul_d(defl_eps.raw(), defl_eps.raw(), cfg.deflation_factor, R);
    const MPReal btol = eps * t.frobenius_norm();

    long budget = cfg.max_sweeps_per_eigenvalue * static_cast<long>(n);
    bool converged = true;
    MPComplex eshift(ctx);
    MPComplex f(ctx), gg(ctx), sh(ctx);

    // |H(j,j-1)| <= defl_eps * (|H(j-1,j-1)| + |H(j,j)|)
    auto subdiag_small = [&](size_t j) {
        const MPComplex& s = h.at(j, j - 1);
        if (s.is_zero()) return true;
        mpfr_hypot(w.t[0], h.at(j - 1, j - 1).re.raw(),
                   h.at(j - 1, j - 1).im.raw(), R);
        mpfr_hypot(w.t[1], h.at(j, j).re.raw(), h.at(j, j).im.raw(), R);
        mpfr_add(w.t[0], w.t[0], w.t[1], R);
        mpfr_mul(w.t[0], w.t[0], defl_eps.raw(), R);
        mpfr_hypot(w.t[1], s.re.raw(), s.im.raw(), R);
        return mpfr_cmp(w.t[1], w.t[0]) <= 0;
    };

    size_t en = n - 1;
    long its = 0;
    bool done = false;
    while (!done) {
        // Find the top of the active block.
        size_t l = 0;
        for (size_t j = en; j >= 1; --j) {
            if (subdiag_small(j)) {
                set_zero(h.at(j, j - 1));
                l = j;
                break;
            }
        }

        if (l == en) {
            // 1x1 block: deflated as-is (its beta classifies it later).
            if (en == 0) {
                done = true;
            } else {
                --en;
                its = 0;
            }
            continue;
        }

        // Negligible T diagonal at the top: one row rotation isolates an
        // infinite eigenvalue and shrinks the block from above.
        while (l < en && cabs_leq(t.at(l, l), btol.raw(), w)) {
            set_zero(t.at(l, l));
            MPComplex& fv = h.at(l, l);
            MPComplex& gv = h.at(l + 1, l);
            rot_compute(g, fv.re.raw(), fv.im.raw(), gv.re.raw(), gv.im.raw(),
                        fv.re.raw(), fv.im.raw(), w);
            set_zero(gv);
            apply_rows(h, g, l, l + 1, l + 1, en + 1, w);
            apply_rows(t, g, l, l + 1, l + 1, en + 1, w);
            ++l;
        }
        if (l == en) {
            if (cabs_leq(t.at(en, en), btol.raw(), w)) set_zero(t.at(en, en));
            if (en == 0) {
                done = true;
            } else {
                --en;
                its = 0;
            }
            continue;
        }

        // Negligible T diagonal at the bottom: one column rotation isolates
        // an infinite eigenvalue and shrinks the block from below.
        if (cabs_leq(t.at(en, en), btol.raw(), w)) {
            set_zero(t.at(en, en));
            MPComplex& fv = h.at(en, en);
            MPComplex& gv = h.at(en, en - 1);
            rot_compute(g, fv.re.raw(), fv.im.raw(), gv.re.raw(), gv.im.raw(),
                        fv.re.raw(), fv.im.raw(), w);
            set_zero(gv);
            apply_cols(h, g, en, en - 1, l, en, w);
            apply_cols(t, g, en, en - 1, l, en, w);
            --en;
            its = 0;
            continue;
        }

        if (budget == 0) {
            converged = false;
            break;
        }
        --budget;
        ++its;
        ++result.total_sweeps;

        // Shift from the trailing 2x2 of H*T^(-1); tiny T diagonals are
        // clamped here only, they still deflate through the paths above
        // once they migrate to a block edge.
        {
            const size_t e1 = en - 1;
            MPComplex b33 = clamp_magnitude(t.at(e1, e1), btol);
            MPComplex b44 = clamp_magnitude(t.at(en, en), btol);
            if (its % cfg.exceptional_shift_period == 0) {
                eshift += h.at(en, en - 1) / b33;
                sh = eshift;
            } else {
                MPComplex a33 = h.at(e1, e1) / b33;
                MPComplex a34 = h.at(e1, en) / b44;
                MPComplex a43 = h.at(en, e1) / b33;
                MPComplex a44 = h.at(en, en) / b44;
                MPComplex b34 = t.at(e1, en) / b44;
                MPReal half = MPReal(1, ctx) / MPReal(2, ctx);
                MPComplex tt = half * (a43 * b34 - a33 - a44);
                MPComplex disc = sqrt(tt * tt + a34 * a43 - a33 * a44);
                MPComplex sh1 = disc - tt;
                MPComplex sh2 = -tt - disc;
                sh = (abs(sh1 - a44) <= abs(sh2 - a44)) ? sh1 : sh2;
            }
        }

        // One implicit single-shift sweep over [l, en].
        for (size_t k = l; k < en; ++k) {
            if (k == l) {
                f = h.at(l, l) - sh * t.at(l, l);
                gg = h.at(l + 1, l);
                rot_compute(g, f.re.raw(), f.im.raw(), gg.re.raw(),
                            gg.im.raw(), f.re.raw(), f.im.raw(), w);
                apply_rows(h, g, k, k + 1, l, en + 1, w);
            } else {
                MPComplex& fv = h.at(k, k - 1);
                MPComplex& gv = h.at(k + 1, k - 1);
                rot_compute(g, fv.re.raw(), fv.im.raw(), gv.re.raw(),
                            gv.im.raw(), fv.re.raw(), fv.im.raw(), w);
                set_zero(gv);
                apply_rows(h, g, k, k + 1, k, en + 1, w);
            }
            apply_rows(t, g, k, k + 1, k, en + 1, w);

            MPComplex& fill = t.at(k + 1, k);
            MPComplex& piv = t.at(k + 1, k + 1);
            rot_compute(g, piv.re.raw(), piv.im.raw(), fill.re.raw(),
                        fill.im.raw(), piv.re.raw(), piv.im.raw(), w);
            set_zero(fill);
            apply_cols(t, g, k + 1, k, l, k + 1, w);
            apply_cols(h, g, k + 1, k, l, std::min(k + 3, en + 1), w);
        }
    }

    result.converged = converged;
    result.pairs.reserve(n);
    for (size_t j = 0; j < n; ++j) {
        GeneralizedEigenPair p{h.at(j, j), t.at(j, j)};
        if (converged && p.alpha.is_zero() && p.beta.is_zero())
            throw solver_error("singular pencil: alpha = beta = 0");
        result.pairs.push_back(std::move(p));
    }
    return result;
}

Eigenvalues eigenvalues(const MPMatrix& a, const MPMatrix& b,
                        const QZConfig& cfg) {
    require_square_pair(a, b);
    PrecisionContext ctx = a.context();
    const MPReal beta_floor = machine_epsilon(ctx) * b.frobenius_norm();

    auto [h, t] = hessenberg_triangular(a, b);
    QZResult qz = qz_iterate(std::move(h), std::move(t), cfg);
    if (!qz.converged)
        throw solver_error("QZ iteration did not converge within the sweep budget");

    Eigenvalues out;
    out.total_sweeps = qz.total_sweeps;
    for (const GeneralizedEigenPair& p : qz.pairs) {
        if (abs(p.beta) > beta_floor) {
            out.finite.push_back(p.alpha / p.beta);
        } else {
            ++out.infinite_count;
        }
    }
    std::sort(out.finite.begin(), out.finite.end(),
              [](const MPComplex& u, const MPComplex& v) {
                  int c = mpfr_cmp(u.re.raw(), v.re.raw());
                  if (c != 0) return c < 0;
                  return mpfr_cmp(u.im.raw(), v.im.raw()) < 0;
              });
    return out;
}

Eigenvalues eigenvalues_standard(const MPMatrix& a, const QZConfig& cfg) {
    if (a.rows() != a.cols())
        throw usage_error("matrix must be square");
    return eigenvalues(a, MPMatrix::identity(a.rows(), a.context()), cfg);
}

} // namespace hydrospec
