#include "hydrospec/classics.hpp"

#include <algorithm>
#include <chrono>
#include <utility>

#include "hydrospec/errors.hpp"
#include "hydrospec/qz.hpp"

namespace hydrospec {

GodunovCase godunov_case(int s, PrecisionContext ctx) {
    if (s != 1 && s != -1) throw usage_error("sign case must be +1 or -1");
    const long long at[7][7] = {
        {1, 2048, 256, 128, 64, 32, 16},
        {0, -2, 1024, 512, 256, 128, 32},
        {0, 0, 4, 512, 1024, 256, 64},
        {0, 0, 0, 0, 512, 512, 128},
        {0, 0, 0, 0, -4, 1024, 256},
        {0, 0, 0, 0, 0, 2, 2048},
        {0, 0, 0, 0, 0, 0, s},
    };
    const long long lo[7][7] = {
        {1, 0, 0, 0, 0, 0, 0},
        {0, 1, 0, 0, 0, 0, 0},
        {1, 0, 1, 0, 0, 0, 0},
        {0, 0, 0, 1, 0, 0, 0},
        {0, 0, 1, 0, 1, 0, 0},
        {1, 0, 0, 0, 0, 1, 0},
        {0, 1, 1, 0, 1, 0, 1},
    };
    // X = At*L, then the rows of A from L*A = X by forward substitution;
    // the unit diagonal keeps everything in integers
    long long x[7][7] = {};
    for (int i = 0; i < 7; ++i)
        for (int k = 0; k < 7; ++k)
            for (int j = 0; j < 7; ++j) x[i][j] += at[i][k] * lo[k][j];
    long long a[7][7];
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            long long acc = x[i][j];
            for (int k = 0; k < i; ++k) acc -= lo[i][k] * a[k][j];
            a[i][j] = acc;
        }

    GodunovCase c{s, MPMatrix(7, 7, ctx), {}};
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            c.a.at(i, j).re = MPReal(static_cast<long>(a[i][j]), ctx);
    for (int i = 0; i < 7; ++i)
        c.true_spectrum.push_back(static_cast<long>(at[i][i]));
    std::sort(c.true_spectrum.begin(), c.true_spectrum.end());
    return c;
}

std::vector<GodunovRecord> godunov_experiment(int s,
                                              const std::vector<long>& ps) {
    if (ps.empty()) throw usage_error("need at least one width");
    std::vector<GodunovRecord> out;
    out.reserve(ps.size());
    for (long p : ps) {
        PrecisionContext ctx(p);
        GodunovCase c = godunov_case(s, ctx);
        const auto t0 = std::chrono::steady_clock::now();
        Eigenvalues ev = eigenvalues_standard(c.a);
        const auto t1 = std::chrono::steady_clock::now();
        std::vector<MPComplex> truth;
        truth.reserve(c.true_spectrum.size());
        for (long v : c.true_spectrum)
            truth.emplace_back(MPReal(v, ctx), MPReal(0, ctx));
        MPReal dh = hausdorff(ev.finite, truth);
        GodunovRecord rec;
        rec.bits = p;
        rec.eps_p = machine_epsilon(ctx).to_decimal();
        rec.d_h = dh.to_decimal();
        rec.spectrum.eigenvalues = std::move(ev.finite);
        rec.spectrum.meta.flow = "godunov";
        rec.spectrum.meta.method = (s == 1) ? "s=+1" : "s=-1";
        rec.spectrum.meta.n = 7;
        rec.spectrum.meta.bits = p;
        rec.spectrum.meta.infinite_count =
            static_cast<long>(ev.infinite_count);
        rec.spectrum.meta.wall_time_s =
            std::chrono::duration<double>(t1 - t0).count();
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace hydrospec
