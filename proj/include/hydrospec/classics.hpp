#pragma once

#include <vector>

#include "hydrospec/analysis.hpp"

namespace hydrospec {

// Godunov's 7x7 benchmark: an integer matrix, similar to a triangular
// one with known integer eigenvalues, whose computed spectrum at a given
// significand width is wrong until the width is large enough. The sign
// parameter selects the last diagonal entry; +1 duplicates an eigenvalue
// and halves the convergence rate.
struct GodunovCase {
    int s = 1;
    MPMatrix a;                      // exact integer entries
    std::vector<long> true_spectrum; // ascending, with multiplicity
};

GodunovCase godunov_case(int s, PrecisionContext ctx);

struct GodunovRecord {
    long bits = 0;
    std::string eps_p;
    std::string d_h;
    SpectrumSet spectrum;
};

// Solve the benchmark at each width and measure the Hausdorff distance
// to the true spectrum. Solver failures propagate.
std::vector<GodunovRecord> godunov_experiment(int s,
                                              const std::vector<long>& ps);

} // namespace hydrospec
