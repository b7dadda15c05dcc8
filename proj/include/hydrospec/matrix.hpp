#pragma once

#include <cassert>
#include <vector>

#include "hydrospec/precision.hpp"

namespace hydrospec {

// Dense complex matrix, row-major, all entries sharing one context.
class MPMatrix {
public:
    MPMatrix(size_t rows, size_t cols, PrecisionContext ctx)
        : rows_(rows), cols_(cols), prec_(ctx.bits()) {
        data_.reserve(rows * cols);
        for (size_t i = 0; i < rows * cols; ++i) data_.emplace_back(ctx);
    }

    static MPMatrix identity(size_t n, PrecisionContext ctx) {
        MPMatrix m(n, n, ctx);
        MPReal one(1, ctx);
        for (size_t i = 0; i < n; ++i) m.at(i, i).re = one;
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    PrecisionContext context() const { return PrecisionContext(prec_); }

    MPComplex& at(size_t i, size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    const MPComplex& at(size_t i, size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    MPMatrix to_precision(PrecisionContext ctx) const {
        MPMatrix m(0, 0, ctx);
        m.rows_ = rows_;
        m.cols_ = cols_;
        m.data_.reserve(rows_ * cols_);
        for (const MPComplex& z : data_) m.data_.push_back(z.to_precision(ctx));
        m.prec_ = ctx.bits();
        return m;
    }

    MPReal frobenius_norm() const {
        PrecisionContext ctx = context();
        MPReal acc(ctx), t(ctx);
        for (const MPComplex& z : data_) {
            mpfr_sqr(t.raw(), z.re.raw(), MPFR_RNDN);
            mpfr_add(acc.raw(), acc.raw(), t.raw(), MPFR_RNDN);
            mpfr_sqr(t.raw(), z.im.raw(), MPFR_RNDN);
            mpfr_add(acc.raw(), acc.raw(), t.raw(), MPFR_RNDN);
        }
        return sqrt(acc);
    }

private:
    size_t rows_, cols_;
    long prec_;
    std::vector<MPComplex> data_;
};

// Naive products and adjoint; used by assembly checks and tests, not by
// the solver hot path.
MPMatrix multiply(const MPMatrix& a, const MPMatrix& b);
MPMatrix adjoint(const MPMatrix& a);

} // namespace hydrospec
