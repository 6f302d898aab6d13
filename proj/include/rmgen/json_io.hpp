#ifndef RMGEN_JSON_IO_HPP
#define RMGEN_JSON_IO_HPP

#include "rmgen/features.hpp"
#include "rmgen/propagation.hpp"
#include "rmgen/tx.hpp"

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace rmgen {

using Json = nlohmann::json;

/// Reads a JSON document; MissingFile if absent, ConfigError if unparsable.
Json read_json(const std::filesystem::path& path);
/// Writes with sorted keys and two-space indent, so equal values give equal bytes.
void write_json(const std::filesystem::path& path, const Json& value);

/// {"hpbw_deg", "fnbw_deg", "floor_db", "peak_db": "auto" | number}
Json pattern_to_json(const AntennaPattern& p);
AntennaPattern pattern_from_json(const Json& j);

Json tx_to_json(const TxConfig& tx);
TxConfig tx_from_json(const Json& j);
std::vector<TxConfig> read_tx_list(const std::filesystem::path& path);
void write_tx_list(const std::filesystem::path& path, const std::vector<TxConfig>& txs);

/// Missing keys keep their defaults. The result is validated.
Json params_to_json(const SimParams& p);
SimParams params_from_json(const Json& j);

Json grid_to_json(const GridGeometry& g);
GridGeometry grid_from_json(const Json& j);

Json bounds_to_json(const FeatureBounds& b);
FeatureBounds bounds_from_json(const Json& j);

}  // namespace rmgen

#endif  // RMGEN_JSON_IO_HPP
