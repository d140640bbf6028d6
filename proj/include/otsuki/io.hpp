#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "otsuki/edwards.hpp"
#include "otsuki/geodesic.hpp"
#include "otsuki/pipeline.hpp"
#include "otsuki/spectral.hpp"

namespace otsuki {

using json = nlohmann::ordered_json;

json to_json(const GeodesicFamily& family);
/// Family data plus node samples; `stride` thins the node list.
json to_json(const Trajectory& traj, int stride = 1);
json to_json(const SpectrumSummary& summary);
json to_json(const BoundaryFormData& data);
json to_json(const TwistedCount& count);
json to_json(const IndexReport& report);

/// Serializes like json::dump but writes every floating-point number with
/// 17 significant digits (%.17g). indent < 0 gives a single line.
std::string dump_json(const json& value, int indent = -1);

/// Bumped whenever the report layout or the numerics change.
constexpr int cache_version = 1;

struct CacheKey {
    int p = 0;
    int q = 0;
    int n = 0;
    int version = cache_version;

    /// "p-q-n-vK".
    std::string canonical() const;
};

/// $OTSUKI_CACHE when set, otherwise ./.cache.
std::filesystem::path default_cache_dir();

/// Writes {"key", "version", "report"} to dir/<key>.json, creating dir.
void cache_store(const std::filesystem::path& dir, const CacheKey& key, const json& report);

/// The stored report on an exact key and version match. A file that fails
/// to parse or carries another key is a miss and prints a warning to stderr.
std::optional<json> cache_load(const std::filesystem::path& dir, const CacheKey& key);

} // namespace otsuki
