#ifndef RMGEN_DATASET_HPP
#define RMGEN_DATASET_HPP

#include "rmgen/features.hpp"
#include "rmgen/json_io.hpp"
#include "rmgen/propagation.hpp"
#include "rmgen/spatial.hpp"
#include "rmgen/visibility.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rmgen {

inline constexpr int kDatasetVersion = 1;
inline constexpr const char* kDatasetFormat = "rmgen-dataset";

/// One radio map with its inputs. On disk (a sample directory):
///   sample.json  tx.json  channels.json  target.f32  [pl_db.f32]
///   features/<channel>.f32  [los/{ground,top,min_visible,cone_mask}.f32]
/// Every .f32 has its .json header next to it.
struct SampleRecord {
    std::string sample_id;
    std::string scene_id;
    std::string pattern_id;
    TxConfig tx;
    GridGeometry grid;
    SimParams params;
    FeatureStack features;
    RasterF target;  ///< gray radio map in [0, 1]
    std::optional<RasterF> pl_db;
    std::optional<LosMaps> los;
};

/// Checks ids and that every raster matches `grid`. Throws DimensionMismatch
/// or ConfigError.
void validate_sample(const SampleRecord& sample);

void write_sample(const SampleRecord& sample, const std::filesystem::path& dir);
/// Pieces of a sample directory, for tools that build it step by step.
void write_feature_stack(const FeatureStack& stack, const std::filesystem::path& sample_dir, double resolution);
void write_los_maps(const LosMaps& maps, const std::filesystem::path& sample_dir, double resolution);
/// Throws MissingFile when a required file is absent.
SampleRecord read_sample(const std::filesystem::path& dir);

struct SplitFractions {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

/// Scene ids per split; the three lists partition the input scenes.
struct SplitAssignment {
    std::vector<std::string> train, val, test;

    /// "train", "val" or "test"; ConfigError for an unknown scene.
    std::string split_of(const std::string& scene_id) const;
    friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

/// Seeded shuffle of the sorted unique scene ids, cut into val, test, train.
/// With three or more scenes val and test hold at least one each.
SplitAssignment assign_splits(std::vector<std::string> scene_ids, std::uint64_t seed, const SplitFractions& fractions = {});

struct ManifestChannel {
    std::string name;
    ChannelBounds bounds;
    friend bool operator==(const ManifestChannel&, const ManifestChannel&) = default;
};

struct ManifestEntry {
    std::string sample_id;
    std::string scene_id;
    std::string pattern_id;
    std::string split;
    std::string path;  ///< relative to the dataset root
    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
    int version = kDatasetVersion;
    GridGeometry grid;
    std::vector<ManifestChannel> channels;
    bool normalized = true;
    std::uint64_t split_seed = 0;
    SplitFractions fractions;
    SplitAssignment splits;
    SimParams params;
    std::vector<ManifestEntry> samples;  ///< sorted by sample id

    Json to_json() const;
    /// Throws ManifestVersionMismatch for another format or version.
    static Manifest from_json(const Json& j);
};

/// Writes samples/<id>/ for every record plus manifest.json. All records must
/// share grid, channel registry and SimParams. Throws DuplicateSampleId.
Manifest export_dataset(const std::vector<SampleRecord>& samples, const std::filesystem::path& out_dir,
                        std::uint64_t split_seed, const SplitFractions& fractions = {}, unsigned jobs = 1);
/// Same, reading each sample directory first (MissingFile on gaps).
Manifest export_dataset(const std::vector<std::filesystem::path>& sample_dirs, const std::filesystem::path& out_dir,
                        std::uint64_t split_seed, const SplitFractions& fractions = {}, unsigned jobs = 1);

/// Builds the manifest for records already stored under `out_dir/samples`.
Manifest build_manifest(const std::vector<SampleRecord>& samples, std::uint64_t split_seed,
                        const SplitFractions& fractions = {});

Manifest read_manifest(const std::filesystem::path& dataset_dir);

struct Dataset {
    Manifest manifest;
    std::vector<SampleRecord> samples;  ///< manifest order
};
Dataset load_dataset(const std::filesystem::path& dataset_dir);

/// Metrics on gray maps. dB values come from the inverse gray map over the
/// fixed [-127, -50] dB window, so one gray unit is 77 dB.
inline constexpr double kGrayDbScale = 77.0;

double rmse_gray(const RasterF& pred, const RasterF& truth);
double rmse_db(const RasterF& pred, const RasterF& truth);
/// sum (pred_db - truth_db)^2 / sum truth_db^2, as a ratio.
double nmse_db(const RasterF& pred, const RasterF& truth);

/// Pools squared errors over many maps (dataset-level metrics).
class MetricAccumulator {
public:
    void add(const RasterF& pred, const RasterF& truth);
    double rmse_gray() const;
    double rmse_db() const { return kGrayDbScale * rmse_gray(); }
    double nmse_db() const;
    std::size_t pixels() const { return pixels_; }
    std::size_t maps() const { return maps_; }

private:
    double sq_gray_ = 0.0, sq_err_db_ = 0.0, sq_truth_db_ = 0.0;
    std::size_t pixels_ = 0, maps_ = 0;
};

/// Applies a grid symmetry to every raster and the Tx. Geometry channels
/// (azimuth, dx, dy, grid anchors) are recomputed for the new pose.
SampleRecord augment(const SampleRecord& sample, SpatialOp op);

}  // namespace rmgen

#endif  // RMGEN_DATASET_HPP
