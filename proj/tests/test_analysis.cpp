#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hydrospec/analysis.hpp"
#include "hydrospec/errors.hpp"
#include "hydrospec/io.hpp"

using namespace hydrospec;

namespace {

MPComplex zc(double re, double im, PrecisionContext ctx) {
    return MPComplex(MPReal::from_double(re, ctx),
                     MPReal::from_double(im, ctx));
}

SpectrumSet make_set(const std::vector<std::pair<double, double>>& pts,
                     long bits) {
    PrecisionContext ctx(bits);
    SpectrumSet s;
    for (auto [re, im] : pts) s.eigenvalues.push_back(zc(re, im, ctx));
    s.meta.flow = "poiseuille";
    s.meta.re = "100";
    s.meta.a = "1";
    s.meta.method = "d2";
    s.meta.n = static_cast<long>(pts.size());
    s.meta.bits = bits;
    return s;
}

double dval(const std::string& decimal) { return std::stod(decimal); }

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("hydrospec_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int counter() {
        static int c = 0;
        return c++;
    }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("region filtering keeps the closed box") {
    PrecisionContext ctx(64);
    Region pois = Region::poiseuille_box();
    Region coue = Region::couette_box();

    SpectrumSet s = make_set({{0.5, -0.5}, {2.0, 0.0}}, 64);
    SpectrumSet f = filter_region(s, pois);
    REQUIRE(f.eigenvalues.size() == 1);
    CHECK(f.eigenvalues[0] == zc(0.5, -0.5, ctx));
    CHECK(f.meta.flow == s.meta.flow);
    CHECK(f.meta.n == s.meta.n);

    SpectrumSet empty = make_set({}, 64);
    CHECK(filter_region(empty, pois).eigenvalues.empty());

    SpectrumSet left = make_set({{-0.9, -0.1}}, 64);
    CHECK(filter_region(left, coue).eigenvalues.size() == 1);
    CHECK(filter_region(left, pois).eigenvalues.empty());

    // all four corners are inside, one ulp outside is not
    SpectrumSet corners =
        make_set({{0, 0}, {1, 0}, {0, -1}, {1, -1}}, 64);
    CHECK(filter_region(corners, pois).eigenvalues.size() == 4);
    const double ulp = 1.0 / 9007199254740992.0;
    SpectrumSet outside = make_set({{1 + 2 * ulp, -0.5}, {0.5, 2 * ulp}}, 64);
    CHECK(filter_region(outside, pois).eigenvalues.empty());

    // idempotent
    SpectrumSet once = filter_region(s, pois);
    SpectrumSet twice = filter_region(once, pois);
    CHECK(once.eigenvalues.size() == twice.eigenvalues.size());

    CHECK_THROWS_AS(
        Region(Rational(1), Rational(0), Rational(0), Rational(1)),
        usage_error);
}

TEST_CASE("hausdorff distance on known configurations") {
    PrecisionContext ctx(113);
    std::vector<MPComplex> a{zc(1, 1, ctx)};
    CHECK(hausdorff(a, a).is_zero());

    std::vector<MPComplex> z{zc(0, 0, ctx)};
    std::vector<MPComplex> tf{zc(3, 0, ctx), zc(4, 0, ctx)};
    CHECK(hausdorff(z, tf) == MPReal(4, ctx));
    CHECK(hausdorff(tf, z) == MPReal(4, ctx));

    // duplicates collapse: sets, not multisets
    std::vector<MPComplex> dup{zc(1, 0, ctx), zc(1, 0, ctx)};
    std::vector<MPComplex> single{zc(1, 0, ctx)};
    CHECK(hausdorff(dup, single).is_zero());

    CHECK_THROWS_AS(hausdorff({}, single), usage_error);
    CHECK_THROWS_AS(hausdorff(single, {}), usage_error);
}

TEST_CASE("hausdorff widens to the larger operand precision") {
    PrecisionContext narrow(53), wide(300);
    // the gap is far below the narrow resolution but must survive
    MPReal tiny = MPReal(1, wide);
    for (int k = 0; k < 200; ++k) tiny = tiny / MPReal(2, wide);
    std::vector<MPComplex> a{MPComplex(MPReal(0, narrow), MPReal(0, narrow))};
    std::vector<MPComplex> b{MPComplex(tiny, MPReal(0, wide))};
    MPReal d = hausdorff(a, b);
    CHECK(!d.is_zero());
    CHECK(d == tiny);
}

TEST_CASE("hausdorff is symmetric and satisfies the triangle inequality") {
    PrecisionContext ctx(113);
    // three deterministic pseudo-random point clouds
    auto cloud = [&](int seed, int count) {
        std::vector<MPComplex> v;
        unsigned state = static_cast<unsigned>(seed) * 2654435761u + 1;
        for (int k = 0; k < count; ++k) {
            state = state * 1664525u + 1013904223u;
            const double re = (state >> 8) % 2000 / 1000.0 - 1.0;
            state = state * 1664525u + 1013904223u;
            const double im = (state >> 8) % 2000 / 1000.0 - 1.0;
            v.push_back(zc(re, im, ctx));
        }
        return v;
    };
    for (int trial = 0; trial < 5; ++trial) {
        auto a = cloud(3 * trial + 1, 6 + trial);
        auto b = cloud(3 * trial + 2, 9 - trial);
        auto c = cloud(3 * trial + 3, 7);
        MPReal ab = hausdorff(a, b);
        MPReal ba = hausdorff(b, a);
        MPReal bc = hausdorff(b, c);
        MPReal ac = hausdorff(a, c);
        CHECK(ab == ba);
        CHECK(ab >= MPReal(0, ctx));
        // tiny slack for the rounding of the distances themselves
        MPReal slack = machine_epsilon(PrecisionContext(100)).to_precision(ctx);
        CHECK(ac <= ab + bc + slack);
    }
}

TEST_CASE("channel solve returns sorted spectra with counts that add up") {
    OSParams prm = OSParams::from_decimal("100", "1");
    SpectrumSet s = solve_tau(FlowProfile::Poiseuille, prm, TauMethod::D2,
                              30, 113);
    const long order = 2 * (30 + 3);
    CHECK(s.meta.flow == "poiseuille");
    CHECK(s.meta.re == "100");
    CHECK(s.meta.a == "1");
    CHECK(s.meta.method == "d2");
    CHECK(s.meta.n == 30);
    CHECK(s.meta.bits == 113);
    CHECK(s.meta.wall_time_s > 0);
    CHECK(static_cast<long>(s.eigenvalues.size()) + s.meta.infinite_count ==
          order);
    // the mass matrix has rank at most N+1
    CHECK(s.meta.infinite_count >= 35);
    for (size_t k = 1; k < s.eigenvalues.size(); ++k) {
        const MPComplex& p = s.eigenvalues[k - 1];
        const MPComplex& q = s.eigenvalues[k];
        const bool ordered =
            p.re < q.re || (p.re == q.re && (p.im < q.im || p.im == q.im));
        CHECK(ordered);
    }

    SpectrumSet s4 = solve_tau(FlowProfile::Couette, prm, TauMethod::D4,
                               30, 113);
    CHECK(s4.meta.method == "d4");
    CHECK(static_cast<long>(s4.eigenvalues.size()) +
              s4.meta.infinite_count ==
          35);
    CHECK(s4.meta.infinite_count >= 4);
}

TEST_CASE("spectrum files round-trip bitwise") {
    TempDir dir;
    OSParams prm = OSParams::from_decimal("100", "1");
    SpectrumSet s = solve_tau(FlowProfile::Poiseuille, prm, TauMethod::D4,
                              20, 113);
    const std::string path = dir.str() + "/spec.json";
    write_spectrum(s, path);
    SpectrumSet r = read_spectrum(path);
    CHECK(r.meta.flow == s.meta.flow);
    CHECK(r.meta.re == s.meta.re);
    CHECK(r.meta.a == s.meta.a);
    CHECK(r.meta.method == s.meta.method);
    CHECK(r.meta.n == s.meta.n);
    CHECK(r.meta.bits == s.meta.bits);
    CHECK(r.meta.infinite_count == s.meta.infinite_count);
    REQUIRE(r.eigenvalues.size() == s.eigenvalues.size());
    for (size_t k = 0; k < s.eigenvalues.size(); ++k)
        CHECK(r.eigenvalues[k] == s.eigenvalues[k]);

    // a second write of the loaded set reproduces the file byte for byte
    const std::string again = dir.str() + "/spec2.json";
    SpectrumSet r2 = r;
    r2.meta.wall_time_s = s.meta.wall_time_s;
    write_spectrum(r2, again);
    std::ifstream f1(path), f2(again);
    std::string b1((std::istreambuf_iterator<char>(f1)),
                   std::istreambuf_iterator<char>());
    std::string b2((std::istreambuf_iterator<char>(f2)),
                   std::istreambuf_iterator<char>());
    CHECK(b1 == b2);

    CHECK_THROWS_AS(read_spectrum(dir.str() + "/missing.json"), parse_error);
    const std::string bad = dir.str() + "/bad.json";
    std::ofstream(bad) << "{borken";
    CHECK_THROWS_AS(read_spectrum(bad), parse_error);
}

TEST_CASE("cache keys separate every identity field") {
    SpectrumMeta m;
    m.flow = "poiseuille";
    m.re = "10000";
    m.a = "1";
    m.method = "d2";
    m.n = 200;
    m.bits = 53;
    const std::string base = spectrum_cache_key(m);
    auto differs = [&](SpectrumMeta v) { return spectrum_cache_key(v) != base; };
    SpectrumMeta v = m;
    v.flow = "couette";
    CHECK(differs(v));
    v = m;
    v.re = "10001";
    CHECK(differs(v));
    v = m;
    v.a = "1.02";
    CHECK(differs(v));
    v = m;
    v.method = "d4";
    CHECK(differs(v));
    v = m;
    v.n = 201;
    CHECK(differs(v));
    v = m;
    v.bits = 54;
    CHECK(differs(v));
    CHECK(spectrum_cache_key(m) == base);
}

TEST_CASE("sweep produces ordered reproducible records with a warm cache") {
    TempDir dir;
    OSParams prm = OSParams::from_decimal("100", "1");
    SweepConfig cfg;
    cfg.ns = {16, 10};
    cfg.ps = {96, 64};
    cfg.ref_n = 24;
    cfg.ref_p = 128;
    cfg.cache_dir = dir.str();
    auto recs = sweep(FlowProfile::Poiseuille, prm, TauMethod::D2, cfg);
    REQUIRE(recs.size() == 4);
    // sorted by (N, P) regardless of input order
    CHECK(recs[0].n == 10);
    CHECK(recs[0].bits == 64);
    CHECK(recs[1].n == 10);
    CHECK(recs[1].bits == 96);
    CHECK(recs[2].n == 16);
    CHECK(recs[3].n == 16);
    for (const auto& r : recs) {
        CHECK(r.converged);
        CHECK(dval(r.d_h) >= 0);
        CHECK(dval(r.eps_p) > 0);
        CHECK(r.reference.n == 24);
        CHECK(r.reference.bits == 128);
    }

    // warm cache: identical records without recomputation
    auto again = sweep(FlowProfile::Poiseuille, prm, TauMethod::D2, cfg);
    REQUIRE(again.size() == recs.size());
    for (size_t k = 0; k < recs.size(); ++k) {
        CHECK(again[k].d_h == recs[k].d_h);
        CHECK(again[k].eps_p == recs[k].eps_p);
    }

    // worker count changes scheduling only
    cfg.jobs = 3;
    auto parallel = sweep(FlowProfile::Poiseuille, prm, TauMethod::D2, cfg);
    REQUIRE(parallel.size() == recs.size());
    for (size_t k = 0; k < recs.size(); ++k)
        CHECK(parallel[k].d_h == recs[k].d_h);

    // the reference spectrum and all members were persisted
    size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir.str()))
        if (e.path().extension() == ".json") ++files;
    CHECK(files == 5);

    // self distance is exactly zero
    SweepConfig self;
    self.ns = {24};
    self.ps = {128};
    self.ref_n = 24;
    self.ref_p = 128;
    self.cache_dir = dir.str();
    auto one = sweep(FlowProfile::Poiseuille, prm, TauMethod::D2, self);
    REQUIRE(one.size() == 1);
    CHECK(dval(one[0].d_h) == 0);

    SweepConfig bad = cfg;
    bad.ref_n = 12;
    CHECK_THROWS_AS(sweep(FlowProfile::Poiseuille, prm, TauMethod::D2, bad),
                    usage_error);
    bad = cfg;
    bad.ns = {};
    CHECK_THROWS_AS(sweep(FlowProfile::Poiseuille, prm, TauMethod::D2, bad),
                    usage_error);
}

TEST_CASE("convergence files carry the exact record fields") {
    TempDir dir;
    ConvergenceRecord a;
    a.n = 10;
    a.bits = 64;
    a.eps_p = "1.08e-19";
    a.d_h = "0.5";
    ConvergenceRecord b;
    b.n = 10;
    b.bits = 96;
    b.eps_p = "2.5e-29";
    b.d_h = "nan";
    b.converged = false;
    const std::string path = dir.str() + "/conv.csv";
    write_convergence_csv({a, b}, path);
    std::ifstream f(path);
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    CHECK(text == "N,P,eps_P,d_H\n10,64,1.08e-19,0.5\n10,96,2.5e-29,nan\n");
}

TEST_CASE("rate fitting recovers exact slopes and rejects thin data") {
    std::vector<std::pair<double, double>> unit{
        {1e-5, 1e-5}, {1e-10, 1e-10}, {1e-15, 1e-15}, {1e-20, 1e-20}};
    CHECK(fit_rate(unit, 0.0) == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<std::pair<double, double>> half;
    for (double e : {1e-6, 1e-12, 1e-18, 1e-24})
        half.emplace_back(e, std::sqrt(e));
    CHECK(fit_rate(half, 0.0) == doctest::Approx(0.5).epsilon(1e-9));

    // saturated tail is excluded and does not drag the slope
    std::vector<std::pair<double, double>> mixed = unit;
    mixed.emplace_back(1e-40, 3e-22);
    mixed.emplace_back(1e-50, 3e-22);
    CHECK(fit_rate(mixed, 1e-22) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(fit_rate({{1e-5, 1e-5}, {1e-10, 1e-10}}, 0.0),
                    solver_error);
    CHECK_THROWS_AS(fit_rate(mixed, 1.0), solver_error);
}
