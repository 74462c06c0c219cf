#pragma once

#include <optional>
#include <string>

#include "valdet/periodic.hpp"

namespace valdet {

// Optional binary cache of orbit tables keyed by (system hash, N, precision).
// Little-endian length-prefixed records with a versioned header.  The cache
// is an optimization only; results never depend on its presence.

uint64_t system_hash(const SystemSpec& sys);

std::string cache_path(const std::string& dir, const SystemSpec& sys, int N);

bool save_orbit_table(const std::string& path, const SystemSpec& sys,
                      const OrbitTable& table);

std::optional<OrbitTable> load_orbit_table(const std::string& path,
                                           const SystemSpec& sys, int N);

// Uses VALDET_CACHE_DIR when set; otherwise computes directly.
OrbitTable build_orbit_table_cached(const SystemSpec& sys, int N, unsigned threads);

} // namespace valdet
