#include "hydrospec/matrix.hpp"

namespace hydrospec {

MPMatrix multiply(const MPMatrix& a, const MPMatrix& b) {
    if (a.cols() != b.rows())
        throw usage_error("matrix product dimension mismatch");
    if (a.context() != b.context())
        throw usage_error("precision context mismatch");
    PrecisionContext ctx = a.context();
    MPMatrix c(a.rows(), b.cols(), ctx);
    MPReal t(ctx);
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < b.cols(); ++j) {
            MPComplex& dst = c.at(i, j);
            for (size_t k = 0; k < a.cols(); ++k) {
                const MPComplex& x = a.at(i, k);
                const MPComplex& y = b.at(k, j);
                if (x.is_zero() || y.is_zero()) continue;
                mpfr_mul(t.raw(), x.re.raw(), y.re.raw(), MPFR_RNDN);
                mpfr_add(dst.re.raw(), dst.re.raw(), t.raw(), MPFR_RNDN);
                mpfr_mul(t.raw(), x.im.raw(), y.im.raw(), MPFR_RNDN);
                mpfr_sub(dst.re.raw(), dst.re.raw(), t.raw(), MPFR_RNDN);
                mpfr_mul(t.raw(), x.re.raw(), y.im.raw(), MPFR_RNDN);
                mpfr_add(dst.im.raw(), dst.im.raw(), t.raw(), MPFR_RNDN);
                mpfr_mul(t.raw(), x.im.raw(), y.re.raw(), MPFR_RNDN);
                mpfr_add(dst.im.raw(), dst.im.raw(), t.raw(), MPFR_RNDN);
            }
        }
    }
    return c;
}

MPMatrix adjoint(const MPMatrix& a) {
    MPMatrix c(a.cols(), a.rows(), a.context());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j)
            c.at(j, i) = a.at(i, j).conj();
    return c;
}

} // namespace hydrospec
