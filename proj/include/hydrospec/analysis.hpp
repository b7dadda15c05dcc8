#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hydrospec/chebtau.hpp"
#include "hydrospec/qz.hpp"
#include "hydrospec/rational.hpp"

namespace hydrospec {

// Identifying metadata carried with every computed spectrum. Reynolds
// number and wavenumber are exact decimal strings; they are empty for
// the fixed 7x7 benchmark, whose method field names the sign case.
struct SpectrumMeta {
    std::string flow;
    std::string re;
    std::string a;
    std::string method;
    long n = 0;
    long bits = 0;
    long infinite_count = 0;
    double wall_time_s = 0;
};

// Finite eigenvalues only, sorted by (real, imag) ascending.
struct SpectrumSet {
    std::vector<MPComplex> eigenvalues;
    SpectrumMeta meta;
};

// Closed axis-aligned box in the complex plane. Bounds are exact
// rationals so membership tests never depend on the point's precision.
class Region {
public:
    Region(Rational re_min, Rational re_max, Rational im_min, Rational im_max);

    // Decaying-mode windows used throughout the channel-flow runs.
    static Region poiseuille_box(); // 0 <= re <= 1, -1 <= im <= 0
    static Region couette_box();    // -1 <= re <= 1, -1 <= im <= 0
    static Region flow_box(FlowProfile flow);

    bool contains(const MPComplex& z) const;

    const Rational& re_min() const { return re_min_; }
    const Rational& re_max() const { return re_max_; }
    const Rational& im_min() const { return im_min_; }
    const Rational& im_max() const { return im_max_; }

private:
    Rational re_min_, re_max_, im_min_, im_max_;
};

SpectrumSet filter_region(const SpectrumSet& s, const Region& q);

// Symmetric brute-force Hausdorff distance, computed after widening both
// sides to the larger operand precision. Empty operands are an error;
// the distance to nothing is undefined, never zero.
MPReal hausdorff(const std::vector<MPComplex>& a,
                 const std::vector<MPComplex>& b);

// Assemble and solve one channel-flow problem at the given truncation
// and significand width, recording wall time and metadata.
SpectrumSet solve_tau(FlowProfile flow, const OSParams& params,
                      TauMethod method, long n, long bits,
                      const QZConfig& cfg = {});

struct ConvergenceRecord {
    long n = 0;
    long bits = 0;
    std::string eps_p; // 2^(1-P) as a round-trip decimal
    std::string d_h;   // "nan" when the member solve failed
    bool converged = true;
    SpectrumMeta reference;
};

struct SweepConfig {
    std::vector<long> ns;
    std::vector<long> ps;
    long ref_n = 0;
    long ref_p = 0;
    std::string cache_dir; // empty disables spectrum persistence
    int jobs = 1;
};

// Reference spectrum first, then every (N, P) member, all filtered by
// the flow's box before the distance. Non-convergent members flag their
// record and the sweep continues. Records come back sorted by (N, P).
std::vector<ConvergenceRecord> sweep(FlowProfile flow, const OSParams& params,
                                     TauMethod method, const SweepConfig& cfg);

// Least-squares slope of log d_H against log eps_P, excluding points at
// or below the saturation floor (records indistinguishable from the
// reference accuracy). Fewer than three surviving points is an error.
double fit_rate(const std::vector<std::pair<double, double>>& eps_vs_dist,
                double saturation_floor);

} // namespace hydrospec
