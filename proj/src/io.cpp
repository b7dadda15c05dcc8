#include "hydrospec/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "hydrospec/errors.hpp"

namespace hydrospec {

using ordered_json = nlohmann::ordered_json;

void write_spectrum(const SpectrumSet& s, const std::string& path) {
    ordered_json j;
    j["meta"] = {{"flow", s.meta.flow},
                 {"re", s.meta.re},
                 {"a", s.meta.a},
                 {"method", s.meta.method},
                 {"N", s.meta.n},
                 {"P", s.meta.bits},
                 {"infinite_count", s.meta.infinite_count},
                 {"wall_time_s", s.meta.wall_time_s}};
    ordered_json arr = ordered_json::array();
    for (const MPComplex& z : s.eigenvalues)
        arr.push_back({{"re", z.re.to_decimal()}, {"im", z.im.to_decimal()}});
    j["eigenvalues"] = std::move(arr);
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw parse_error("cannot open spectrum file for writing: " + path);
    f << j.dump(1) << "\n";
    f.flush();
    if (!f.good()) throw parse_error("failed writing spectrum file: " + path);
}

SpectrumSet read_spectrum(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw parse_error("cannot open spectrum file: " + path);
    ordered_json j;
    SpectrumSet s;
    try {
        f >> j;
        const auto& m = j.at("meta");
        s.meta.flow = m.at("flow").get<std::string>();
        s.meta.re = m.at("re").get<std::string>();
        s.meta.a = m.at("a").get<std::string>();
        s.meta.method = m.at("method").get<std::string>();
        s.meta.n = m.at("N").get<long>();
        s.meta.bits = m.at("P").get<long>();
        s.meta.infinite_count = m.at("infinite_count").get<long>();
        s.meta.wall_time_s = m.at("wall_time_s").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("malformed spectrum file " + path + ": " +
                          e.what());
    }
    if (s.meta.bits < 2)
        throw parse_error("spectrum file " + path +
                          " declares an invalid width");
    PrecisionContext ctx(s.meta.bits);
    try {
        for (const auto& e : j.at("eigenvalues")) {
            MPReal re =
                MPReal::from_decimal(e.at("re").get<std::string>(), ctx);
            MPReal im =
                MPReal::from_decimal(e.at("im").get<std::string>(), ctx);
            s.eigenvalues.emplace_back(std::move(re), std::move(im));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("malformed spectrum file " + path + ": " +
                          e.what());
    }
    return s;
}

void write_convergence_csv(const std::vector<ConvergenceRecord>& records,
                           const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw parse_error("cannot open convergence file for writing: " +
                          path);
    f << "N,P,eps_P,d_H\n";
    for (const ConvergenceRecord& r : records)
        f << r.n << "," << r.bits << "," << r.eps_p << "," << r.d_h << "\n";
    f.flush();
    if (!f.good())
        throw parse_error("failed writing convergence file: " + path);
}

std::string spectrum_cache_key(const SpectrumMeta& meta) {
    const std::string id = meta.flow + "|" + meta.re + "|" + meta.a + "|" +
                           meta.method + "|" + std::to_string(meta.n) + "|" +
                           std::to_string(meta.bits);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string spectrum_cache_path(const std::string& dir,
                                const SpectrumMeta& meta) {
    return dir + "/spectrum_" + spectrum_cache_key(meta) + ".json";
}

} // namespace hydrospec
