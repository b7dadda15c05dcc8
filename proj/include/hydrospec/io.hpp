#pragma once

#include <string>
#include <vector>

#include "hydrospec/analysis.hpp"

namespace hydrospec {

// Spectrum files hold round-trip decimal strings, so a load followed by
// a store reproduces the file and the values bit-exactly.
void write_spectrum(const SpectrumSet& s, const std::string& path);
SpectrumSet read_spectrum(const std::string& path);

// Convergence files: header `N,P,eps_P,d_H`, one row per record.
void write_convergence_csv(const std::vector<ConvergenceRecord>& records,
                           const std::string& path);

// Stable content key over the identifying metadata fields, used to name
// cached spectrum files.
std::string spectrum_cache_key(const SpectrumMeta& meta);

// Canonical location of the cached (unfiltered) spectrum for this
// metadata inside a cache directory. Every producer and consumer of the
// cache must agree on this name.
std::string spectrum_cache_path(const std::string& dir,
                                const SpectrumMeta& meta);

} // namespace hydrospec
