#ifndef RMGEN_PIPELINE_HPP
#define RMGEN_PIPELINE_HPP

#include "rmgen/dataset.hpp"
#include "rmgen/placement.hpp"
#include "rmgen/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace rmgen {

/// Every knob of one dataset build. Read from a single JSON file; see
/// README for the schema.
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::filesystem::path output = "dataset";

    int synthetic_count = 0;  ///< scenes generated from `synthetic`
    SyntheticSpec synthetic;
    std::vector<std::filesystem::path> scene_dirs;  ///< scenes loaded from disk

    PlacementOptions placement;
    int tx_per_scene = 1;
    std::vector<AntennaPattern> patterns;  ///< default: the eight reference patterns
    int patterns_per_tx = 2;  ///< with the defaults: one narrow and one wide

    SimParams params;
    FeatureConfig features;
    std::uint64_t split_seed = 42;
    SplitFractions split;

    Json to_json() const;
    /// Missing keys keep defaults; unknown top-level keys raise ConfigError.
    static PipelineConfig from_json(const Json& j);
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// One scene with its id.
struct NamedScene {
    std::string id;
    Scene scene;
};

/// Picks Tx sites for a scene. Candidate positions are visited in a seeded
/// order; a position is used when every pattern drawn for it has a valid
/// orientation, one of which is then drawn per pattern.
std::vector<TxConfig> plan_transmitters(const NamedScene& scene, const PipelineConfig& config, std::uint64_t stream);

/// Simulation, LoS and features for one Tx.
SampleRecord make_sample(const NamedScene& scene, const TxConfig& tx, const PipelineConfig& config,
                         const std::string& sample_id);

/// Full run: scenes, placement, samples, manifest. Completed sample
/// directories (marked by `.complete`) are kept as they are, so a rerun only
/// fills gaps. Output does not depend on `jobs`. Errors name the scene or
/// sample they came from.
Manifest run_pipeline(const PipelineConfig& config, unsigned jobs = 1);

}  // namespace rmgen

#endif  // RMGEN_PIPELINE_HPP
