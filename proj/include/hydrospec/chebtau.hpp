#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "hydrospec/matrix.hpp"
#include "hydrospec/rational.hpp"

namespace hydrospec {

// Base flow between rigid walls at z = -1, 1. Poiseuille: U = 1 - z^2,
// U'' = -2. Couette: U = z, U'' = 0. No other profiles exist.
enum class FlowProfile { Poiseuille, Couette };

enum class TauMethod { D2, D4 };

struct OSParams {
    Rational re; // Reynolds number, > 0
    Rational a;  // streamwise wavenumber, > 0

    static OSParams from_decimal(std::string_view re_s, std::string_view a_s);
};

// Generalized eigenproblem A x = c B x for the wave speed c. Both
// methods produce B with zero real part everywhere.
struct TauSystem {
    MPMatrix a;
    MPMatrix b;
    long n = 0;
    TauMethod method = TauMethod::D2;
    FlowProfile flow = FlowProfile::Poiseuille;
    OSParams params;
};

// Coefficient action of the second derivative on a Chebyshev series:
// row i of the result holds the T_i coefficient of the input's second
// derivative. Shape (N+1) x (N+3); entries are exact integers.
MPMatrix d2_matrix(long n, PrecisionContext ctx);

// Fourth derivative, shape (N+1) x (N+5); entries grow like N^7.
MPMatrix d4_matrix(long n, PrecisionContext ctx);

// Multiplication by z and by z^2 on coefficients, shape (N+1) x (N+3);
// entries are exact halves and quarters.
MPMatrix mult_z(long n, PrecisionContext ctx);
MPMatrix mult_z2(long n, PrecisionContext ctx);

// Boundary rows encoding phi(+-1) = 0 (plain) or phi'(+-1) = 0
// (derivative_scaled, weight i^2), split into the even-index and
// odd-index sums. Integer weights; ncols must be N+3 or N+5.
std::pair<std::vector<long>, std::vector<long>> bc_rows(long n, long ncols,
                                                        bool derivative_scaled);

// Second-order formulation: unknowns (phi, chi) with chi = (D^2 - a^2)phi,
// order 2(N+3). Rows: N+1 coupling rows, 2 plain boundary rows, N+1
// transport rows, 2 derivative boundary rows.
TauSystem assemble_d2(FlowProfile flow, const OSParams& params, long n,
                      PrecisionContext ctx);

// Fourth-order formulation in phi alone, order N+5: N+1 operator rows
// plus all 4 boundary rows.
TauSystem assemble_d4(FlowProfile flow, const OSParams& params, long n,
                      PrecisionContext ctx);

} // namespace hydrospec
