#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hydrospec/analysis.hpp"
#include "hydrospec/classics.hpp"
#include "hydrospec/errors.hpp"
#include "hydrospec/io.hpp"

using namespace hydrospec;

namespace {

FlowProfile parse_flow(const std::string& s) {
    if (s == "poiseuille") return FlowProfile::Poiseuille;
    if (s == "couette") return FlowProfile::Couette;
    throw usage_error("flow must be poiseuille or couette");
}

TauMethod parse_method(const std::string& s) {
    if (s == "d2") return TauMethod::D2;
    if (s == "d4") return TauMethod::D4;
    throw usage_error("method must be d2 or d4");
}

const char* flow_name(FlowProfile f) {
    return f == FlowProfile::Poiseuille ? "poiseuille" : "couette";
}

const char* method_name(TauMethod m) {
    return m == TauMethod::D2 ? "d2" : "d4";
}

SpectrumMeta identity_meta(FlowProfile flow, const OSParams& prm,
                           TauMethod method, long n, long bits) {
    SpectrumMeta m;
    m.flow = flow_name(flow);
    m.re = prm.re.to_decimal();
    m.a = prm.a.to_decimal();
    m.method = method_name(method);
    m.n = n;
    m.bits = bits;
    return m;
}

// Solve through the spectrum cache in the output directory, so repeated
// invocations and the sweep command share work.
SpectrumSet solve_cached(FlowProfile flow, const OSParams& prm,
                         TauMethod method, long n, long bits,
                         const std::string& dir) {
    const SpectrumMeta probe = identity_meta(flow, prm, method, n, bits);
    const std::string path = spectrum_cache_path(dir, probe);
    if (std::filesystem::exists(path)) {
        SpectrumSet s = read_spectrum(path);
        if (s.meta.flow == probe.flow && s.meta.re == probe.re &&
            s.meta.a == probe.a && s.meta.method == probe.method &&
            s.meta.n == probe.n && s.meta.bits == probe.bits)
            return s;
    }
    SpectrumSet s = solve_tau(flow, prm, method, n, bits);
    write_spectrum(s, path);
    return s;
}

void write_scatter_csv(const SpectrumSet& s, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw parse_error("cannot open plot file for writing: " + path);
    f << "re,im\n";
    for (const MPComplex& z : s.eigenvalues)
        f << z.re.to_decimal() << "," << z.im.to_decimal() << "\n";
}

void note(const std::string& path) {
    std::cout << "wrote " << path << "\n";
}

struct GodunovArgs {
    int s = 1;
    std::vector<long> bits;
    std::string out = ".";
    bool plotdata = false;
};

int run_godunov(const GodunovArgs& g) {
    std::filesystem::create_directories(g.out);
    auto recs = godunov_experiment(g.s, g.bits);
    std::vector<ConvergenceRecord> rows;
    for (auto& r : recs) {
        const std::string path =
            spectrum_cache_path(g.out, r.spectrum.meta);
        write_spectrum(r.spectrum, path);
        note(path);
        ConvergenceRecord row;
        row.n = 7;
        row.bits = r.bits;
        row.eps_p = r.eps_p;
        row.d_h = r.d_h;
        rows.push_back(std::move(row));
    }
    const std::string tag = (g.s == 1) ? "sp1" : "sm1";
    const std::string csv = g.out + "/convergence_godunov_" + tag + ".csv";
    write_convergence_csv(rows, csv);
    note(csv);
    if (g.plotdata) {
        const std::string plot = g.out + "/plot_godunov_" + tag +
                                 "_eps_dh.csv";
        std::ofstream f(plot, std::ios::trunc);
        f << "eps_P,d_H\n";
        for (const auto& row : rows)
            f << row.eps_p << "," << row.d_h << "\n";
        note(plot);
        for (auto& r : recs) {
            const std::string scatter = g.out + "/plot_godunov_" + tag +
                                        "_P" + std::to_string(r.bits) +
                                        "_spectrum.csv";
            write_scatter_csv(r.spectrum, scatter);
            note(scatter);
        }
    }
    return 0;
}

struct SolveArgs {
    std::string flow = "poiseuille";
    std::string re, a;
    std::string method = "d2";
    long n = 0;
    long bits = 0;
    std::string out = ".";
    bool raw = false;
    bool plotdata = false;
};

int run_solve(const SolveArgs& sa) {
    const FlowProfile flow = parse_flow(sa.flow);
    const TauMethod method = parse_method(sa.method);
    const OSParams prm = OSParams::from_decimal(sa.re, sa.a);
    if (sa.n < 4) throw usage_error("truncation must be at least 4");
    if (sa.bits < 2) throw usage_error("width must be at least 2 bits");
    std::filesystem::create_directories(sa.out);
    SpectrumSet full = solve_cached(flow, prm, method, sa.n, sa.bits, sa.out);
    SpectrumSet inbox = filter_region(full, Region::flow_box(flow));
    const std::string key = spectrum_cache_key(full.meta);
    const std::string qpath = sa.out + "/spectrum_" + key + "_q.json";
    write_spectrum(inbox, qpath);
    note(qpath);
    if (sa.raw) note(spectrum_cache_path(sa.out, full.meta));
    if (sa.plotdata) {
        const std::string plot = sa.out + "/plot_spectrum_" + key + ".csv";
        write_scatter_csv(inbox, plot);
        note(plot);
    }
    std::cout << "eigenvalues in window: " << inbox.eigenvalues.size()
              << " of " << full.eigenvalues.size() << " finite ("
              << full.meta.infinite_count << " infinite)\n";
    if (!sa.raw) {
        // the cache holds the unfiltered set; drop it when not requested
        std::filesystem::remove(spectrum_cache_path(sa.out, full.meta));
    }
    return 0;
}

struct SweepArgs {
    std::string flow = "poiseuille";
    std::string re, a;
    std::string method = "d2";
    std::vector<long> ns;
    std::vector<long> bits;
    long ref_n = 0;
    long ref_bits = 0;
    long jobs = 0;
    std::string out = ".";
    bool plotdata = false;
};

int run_sweep(const SweepArgs& sa) {
    const FlowProfile flow = parse_flow(sa.flow);
    const TauMethod method = parse_method(sa.method);
    const OSParams prm = OSParams::from_decimal(sa.re, sa.a);
    std::filesystem::create_directories(sa.out);
    SweepConfig cfg;
    cfg.ns = sa.ns;
    cfg.ps = sa.bits;
    cfg.ref_n = sa.ref_n;
    cfg.ref_p = sa.ref_bits;
    cfg.cache_dir = sa.out;
    cfg.jobs = static_cast<int>(sa.jobs);
    auto records = sweep(flow, prm, method, cfg);
    for (const auto& r : records)
        if (!r.converged)
            std::cerr << "warning: no usable spectrum at N=" << r.n
                      << " P=" << r.bits << "\n";
    const std::string base = std::string(flow_name(flow)) + "_" +
                             method_name(method) + "_re" +
                             prm.re.to_decimal() + "_a" + prm.a.to_decimal() +
                             "_N" + std::to_string(sa.ref_n) + "_P" +
                             std::to_string(sa.ref_bits);
    const std::string csv = sa.out + "/convergence_" + base + ".csv";
    write_convergence_csv(records, csv);
    note(csv);
    if (sa.plotdata) {
        // one curve per width across N, one per truncation across eps_P
        for (long p : cfg.ps) {
            const std::string plot = sa.out + "/plot_" + base + "_P" +
                                     std::to_string(p) + "_n_dh.csv";
            std::ofstream f(plot, std::ios::trunc);
            f << "N,d_H\n";
            for (const auto& r : records)
                if (r.bits == p) f << r.n << "," << r.d_h << "\n";
            note(plot);
        }
        for (long n : cfg.ns) {
            const std::string plot = sa.out + "/plot_" + base + "_N" +
                                     std::to_string(n) + "_eps_dh.csv";
            std::ofstream f(plot, std::ios::trunc);
            f << "eps_P,d_H\n";
            for (const auto& r : records)
                if (r.n == n) f << r.eps_p << "," << r.d_h << "\n";
            note(plot);
        }
    }
    return 0;
}

struct CompareArgs {
    std::string re, a;
    std::vector<long> ns;
    long bits = 0;
    std::string ref;
    std::string out = ".";
};

int run_compare(const CompareArgs& ca) {
    const OSParams prm = OSParams::from_decimal(ca.re, ca.a);
    if (ca.bits < 2) throw usage_error("width must be at least 2 bits");
    if (ca.ns.empty()) throw usage_error("need at least one truncation");
    if (!std::filesystem::exists(ca.ref))
        throw usage_error("reference spectrum file not found: " + ca.ref);
    std::filesystem::create_directories(ca.out);
    const FlowProfile flow = FlowProfile::Poiseuille;
    const Region q = Region::flow_box(flow);
    SpectrumSet ref = filter_region(read_spectrum(ca.ref), q);
    if (ref.eigenvalues.empty())
        throw solver_error("reference spectrum has no eigenvalues inside "
                           "the comparison window");
    const std::string csv =
        ca.out + "/compare_d2d4_P" + std::to_string(ca.bits) + ".csv";
    std::ofstream f(csv, std::ios::trunc);
    if (!f) throw parse_error("cannot open " + csv + " for writing");
    f << "N,d_H_d2,d_H_d4,wall_d2,wall_d4\n";
    std::vector<long> ns = ca.ns;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    for (long n : ns) {
        SpectrumSet s2 =
            solve_cached(flow, prm, TauMethod::D2, n, ca.bits, ca.out);
        SpectrumSet s4 =
            solve_cached(flow, prm, TauMethod::D4, n, ca.bits, ca.out);
        SpectrumSet q2 = filter_region(s2, q);
        SpectrumSet q4 = filter_region(s4, q);
        auto dist = [&](const SpectrumSet& s) -> std::string {
            if (s.eigenvalues.empty()) return "nan";
            return hausdorff(s.eigenvalues, ref.eigenvalues).to_decimal();
        };
        f << n << "," << dist(q2) << "," << dist(q4) << ","
          << s2.meta.wall_time_s << "," << s4.meta.wall_time_s << "\n";
    }
    f.flush();
    if (!f.good()) throw parse_error("failed writing " + csv);
    note(csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-width spectral toolkit for channel-flow "
                 "stability and the 7x7 integer benchmark"};
    app.require_subcommand(1);

    long default_jobs = 1;
    if (const char* env = std::getenv("HYDROSPEC_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) default_jobs = v;
    }

    GodunovArgs ga;
    CLI::App* god = app.add_subcommand(
        "godunov", "Integer benchmark: spectra and distances per width");
    god->add_option("--s", ga.s, "sign case")
        ->required()
        ->check(CLI::IsMember({1, -1}));
    god->add_option("--bits", ga.bits, "significand widths")
        ->required()
        ->delimiter(',');
    god->add_option("--out", ga.out, "output directory");
    god->add_flag("--emit-plotdata", ga.plotdata, "write per-figure CSVs");

    SolveArgs sa;
    CLI::App* sol = app.add_subcommand(
        "solve", "Solve one channel-flow problem and write its spectrum");
    sol->add_option("--flow", sa.flow, "poiseuille or couette");
    sol->add_option("--re", sa.re, "Reynolds number (decimal)")->required();
    sol->add_option("--a", sa.a, "wavenumber (decimal)")->required();
    sol->add_option("--method", sa.method, "d2 or d4");
    sol->add_option("--n", sa.n, "truncation order")->required();
    sol->add_option("--bits", sa.bits, "significand width")->required();
    sol->add_option("--out", sa.out, "output directory");
    sol->add_flag("--raw", sa.raw, "keep the unfiltered spectrum file");
    sol->add_flag("--emit-plotdata", sa.plotdata, "write per-figure CSVs");

    SweepArgs wa;
    CLI::App* swp = app.add_subcommand(
        "sweep", "Distance of every (N, P) run to one reference run");
    swp->add_option("--flow", wa.flow, "poiseuille or couette");
    swp->add_option("--re", wa.re, "Reynolds number (decimal)")->required();
    swp->add_option("--a", wa.a, "wavenumber (decimal)")->required();
    swp->add_option("--method", wa.method, "d2 or d4");
    swp->add_option("--n-list", wa.ns, "truncation orders")
        ->required()
        ->delimiter(',');
    swp->add_option("--bits-list", wa.bits, "significand widths")
        ->required()
        ->delimiter(',');
    swp->add_option("--ref-n", wa.ref_n, "reference truncation")->required();
    swp->add_option("--ref-bits", wa.ref_bits, "reference width")->required();
    swp->add_option("--jobs", wa.jobs, "worker count")
        ->default_val(default_jobs);
    swp->add_option("--out", wa.out, "output directory");
    swp->add_flag("--emit-plotdata", wa.plotdata, "write per-figure CSVs");

    CompareArgs ca;
    CLI::App* cmp = app.add_subcommand(
        "compare-d2d4",
        "Accuracy and wall time of both methods against a reference file");
    cmp->add_option("--re", ca.re, "Reynolds number (decimal)")->required();
    cmp->add_option("--a", ca.a, "wavenumber (decimal)")->required();
    cmp->add_option("--n-list", ca.ns, "truncation orders")
        ->required()
        ->delimiter(',');
    cmp->add_option("--bits", ca.bits, "significand width")->required();
    cmp->add_option("--ref", ca.ref, "reference spectrum file")->required();
    cmp->add_option("--out", ca.out, "output directory");

    int rc = 0;
    god->callback([&]() { rc = run_godunov(ga); });
    sol->callback([&]() { rc = run_solve(sa); });
    swp->callback([&]() { rc = run_sweep(wa); });
    cmp->callback([&]() { rc = run_compare(ca); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const solver_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const arithmetic_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return rc;
}
