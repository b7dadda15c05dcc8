#pragma once

#include <utility>
#include <vector>

#include "hydrospec/matrix.hpp"

namespace hydrospec {

struct QZConfig {
    long max_sweeps_per_eigenvalue = 30;
    long exceptional_shift_period = 10;
    // Multiplier on eps_P in the subdiagonal deflation test.
    double deflation_factor = 1.0;
};

// Raw QZ output for one position of the triangular pencil. The finite
// eigenvalue is alpha/beta; beta ~ 0 marks an infinite eigenvalue.
struct GeneralizedEigenPair {
    MPComplex alpha, beta;
};

struct QZResult {
    std::vector<GeneralizedEigenPair> pairs;
    long total_sweeps = 0;
    bool converged = false;
};

// Householder triangularization of B followed by Givens reduction of A
// to upper Hessenberg form that keeps B triangular. Zeros below the
// subdiagonal of H and below the diagonal of T are written explicitly.
std::pair<MPMatrix, MPMatrix> hessenberg_triangular(const MPMatrix& a, const MPMatrix& b);

// Single-shift complex QZ iteration on a Hessenberg-triangular pair.
// Deflates subdiagonal entries |H(j+1,j)| <= deflation_factor * eps_P *
// (|H(j,j)| + |H(j+1,j+1)|) and negligible T diagonals (<= eps_P * ||T||_F,
// threshold fixed once at entry) by pushing the zero to the top or bottom
// of the active block with one rotation, which isolates an infinite
// eigenvalue. Runs at most max_sweeps_per_eigenvalue * n sweeps in total;
// exhausting the budget returns converged = false, never a partial answer
// disguised as success.
QZResult qz_iterate(MPMatrix h, MPMatrix t, const QZConfig& cfg = {});

struct Eigenvalues {
    std::vector<MPComplex> finite; // sorted by (re, im) ascending
    size_t infinite_count = 0;
    long total_sweeps = 0;
};

// Both stages composed. Pairs with |beta| > eps_P * ||B||_F become finite
// eigenvalues alpha/beta; the rest are counted as infinite.
Eigenvalues eigenvalues(const MPMatrix& a, const MPMatrix& b, const QZConfig& cfg = {});
Eigenvalues eigenvalues_standard(const MPMatrix& a, const QZConfig& cfg = {});

} // namespace hydrospec
