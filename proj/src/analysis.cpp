#include "hydrospec/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>
#include <utility>

#include "hydrospec/errors.hpp"
#include "hydrospec/io.hpp"

namespace hydrospec {

namespace {

const char* flow_name(FlowProfile f) {
    return f == FlowProfile::Poiseuille ? "poiseuille" : "couette";
}

const char* method_name(TauMethod m) {
    return m == TauMethod::D2 ? "d2" : "d4";
}

} // namespace

Region::Region(Rational re_min, Rational re_max, Rational im_min,
               Rational im_max)
    : re_min_(std::move(re_min)),
      re_max_(std::move(re_max)),
      im_min_(std::move(im_min)),
      im_max_(std::move(im_max)) {
    if ((re_max_ - re_min_).sign() < 0 || (im_max_ - im_min_).sign() < 0)
        throw usage_error("region bounds are reversed");
}

Region Region::poiseuille_box() {
    return Region(Rational(0), Rational(1), Rational(-1), Rational(0));
}

Region Region::couette_box() {
    return Region(Rational(-1), Rational(1), Rational(-1), Rational(0));
}

Region Region::flow_box(FlowProfile flow) {
    return flow == FlowProfile::Poiseuille ? poiseuille_box() : couette_box();
}

bool Region::contains(const MPComplex& z) const {
    // exact rational comparisons, independent of the point's width
    if (mpfr_nan_p(z.re.raw()) || mpfr_nan_p(z.im.raw())) return false;
    return mpfr_cmp_q(z.re.raw(), re_min_.raw()) >= 0 &&
           mpfr_cmp_q(z.re.raw(), re_max_.raw()) <= 0 &&
           mpfr_cmp_q(z.im.raw(), im_min_.raw()) >= 0 &&
           mpfr_cmp_q(z.im.raw(), im_max_.raw()) <= 0;
}

SpectrumSet filter_region(const SpectrumSet& s, const Region& q) {
    SpectrumSet out;
    out.meta = s.meta;
    for (const MPComplex& z : s.eigenvalues)
        if (q.contains(z)) out.eigenvalues.push_back(z);
    return out;
}

MPReal hausdorff(const std::vector<MPComplex>& a,
                 const std::vector<MPComplex>& b) {
    if (a.empty() || b.empty())
        throw usage_error("Hausdorff distance needs two non-empty sets");
    long bits = 2;
    for (const MPComplex& z : a) bits = std::max(bits, z.context().bits());
    for (const MPComplex& z : b) bits = std::max(bits, z.context().bits());
    PrecisionContext ctx(bits);
    auto widen = [&](const std::vector<MPComplex>& v) {
        std::vector<MPComplex> w;
        w.reserve(v.size());
        for (const MPComplex& z : v) w.push_back(z.to_precision(ctx));
        return w;
    };
    const std::vector<MPComplex> wa = widen(a), wb = widen(b);
    auto directed = [&](const std::vector<MPComplex>& x,
                        const std::vector<MPComplex>& y) {
        MPReal best(ctx);
        for (const MPComplex& p : x) {
            MPReal min_d(ctx);
            bool first = true;
            for (const MPComplex& q : y) {
                MPReal d = abs(p - q);
                if (first || d < min_d) {
                    min_d = d;
                    first = false;
                }
            }
            if (min_d > best) best = min_d;
        }
        return best;
    };
    MPReal fwd = directed(wa, wb);
    MPReal bwd = directed(wb, wa);
    return fwd > bwd ? fwd : bwd;
}

SpectrumSet solve_tau(FlowProfile flow, const OSParams& params,
                      TauMethod method, long n, long bits,
                      const QZConfig& cfg) {
    PrecisionContext ctx(bits);
    const auto t0 = std::chrono::steady_clock::now();
    TauSystem sys = (method == TauMethod::D2)
                        ? assemble_d2(flow, params, n, ctx)
                        : assemble_d4(flow, params, n, ctx);
    Eigenvalues ev = eigenvalues(sys.a, sys.b, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    SpectrumSet out;
    out.eigenvalues = std::move(ev.finite);
    out.meta.flow = flow_name(flow);
    out.meta.re = params.re.to_decimal();
    out.meta.a = params.a.to_decimal();
    out.meta.method = method_name(method);
    out.meta.n = n;
    out.meta.bits = bits;
    out.meta.infinite_count = static_cast<long>(ev.infinite_count);
    out.meta.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

namespace {

SpectrumSet cached_solve(FlowProfile flow, const OSParams& params,
                         TauMethod method, long n, long bits,
                         const std::string& dir, std::mutex& io_mutex) {
    std::string path;
    if (!dir.empty()) {
        SpectrumMeta probe;
        probe.flow = flow_name(flow);
        probe.re = params.re.to_decimal();
        probe.a = params.a.to_decimal();
        probe.method = method_name(method);
        probe.n = n;
        probe.bits = bits;
        path = spectrum_cache_path(dir, probe);
        if (std::filesystem::exists(path)) {
            SpectrumSet s = read_spectrum(path);
            if (s.meta.flow == probe.flow && s.meta.re == probe.re &&
                s.meta.a == probe.a && s.meta.method == probe.method &&
                s.meta.n == probe.n && s.meta.bits == probe.bits)
                return s;
        }
    }
    SpectrumSet s = solve_tau(flow, params, method, n, bits);
    if (!path.empty()) {
        std::lock_guard<std::mutex> lock(io_mutex);
        write_spectrum(s, path);
    }
    return s;
}

} // namespace

std::vector<ConvergenceRecord> sweep(FlowProfile flow, const OSParams& params,
                                     TauMethod method,
                                     const SweepConfig& cfg) {
    if (cfg.ns.empty() || cfg.ps.empty())
        throw usage_error("sweep needs at least one N and one P");
    std::vector<long> ns = cfg.ns, ps = cfg.ps;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    if (ns.front() < 4) throw usage_error("truncation must be at least 4");
    if (ps.front() < 2) throw usage_error("width must be at least 2 bits");
    if (cfg.ref_n < ns.back() || cfg.ref_p < ps.back())
        throw usage_error("reference run must dominate the sweep grid");
    if (!cfg.cache_dir.empty())
        std::filesystem::create_directories(cfg.cache_dir);

    std::mutex io_mutex;
    const SpectrumSet ref = cached_solve(flow, params, method, cfg.ref_n,
                                         cfg.ref_p, cfg.cache_dir, io_mutex);
    const Region q = Region::flow_box(flow);
    const SpectrumSet refq = filter_region(ref, q);
    if (refq.eigenvalues.empty())
        throw solver_error(
            "reference spectrum has no eigenvalues inside the comparison "
            "window");

    struct Task {
        long n, p;
    };
    std::vector<Task> tasks;
    for (long n : ns)
        for (long p : ps) tasks.push_back({n, p});

    std::vector<ConvergenceRecord> records(tasks.size());
    std::atomic<size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            ConvergenceRecord r;
            r.n = tasks[i].n;
            r.bits = tasks[i].p;
            r.eps_p =
                machine_epsilon(PrecisionContext(tasks[i].p)).to_decimal();
            r.reference = refq.meta;
            try {
                SpectrumSet s =
                    cached_solve(flow, params, method, tasks[i].n, tasks[i].p,
                                 cfg.cache_dir, io_mutex);
                SpectrumSet sq = filter_region(s, q);
                if (sq.eigenvalues.empty()) {
                    r.converged = false;
                    r.d_h = "nan";
                } else {
                    r.d_h = hausdorff(sq.eigenvalues, refq.eigenvalues)
                                .to_decimal();
                }
            } catch (const solver_error&) {
                r.converged = false;
                r.d_h = "nan";
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
            records[i] = std::move(r);
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return records;
}

double fit_rate(const std::vector<std::pair<double, double>>& eps_vs_dist,
                double saturation_floor) {
    std::vector<double> xs, ys;
    for (const auto& [eps, dh] : eps_vs_dist) {
        if (!(eps > 0) || !(dh > 0)) continue;
        if (dh <= 10.0 * saturation_floor) continue;
        xs.push_back(std::log(eps));
        ys.push_back(std::log(dh));
    }
    std::vector<double> distinct = xs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    if (distinct.size() < 3)
        throw solver_error(
            "too few points above the saturation floor to fit a rate");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace hydrospec
