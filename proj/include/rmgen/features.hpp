#ifndef RMGEN_FEATURES_HPP
#define RMGEN_FEATURES_HPP

#include "rmgen/scene.hpp"
#include "rmgen/tx.hpp"
#include "rmgen/visibility.hpp"

#include <string>
#include <vector>

namespace rmgen {

/// Global value range of a channel; normalization maps [lo, hi] to [-1, 1].
struct ChannelBounds {
    double lo = 0.0;
    double hi = 1.0;

    /// Affine record: normalized = (value - offset) / scale - 1.
    double offset() const { return lo; }
    double scale() const { return (hi - lo) / 2.0; }

    friend bool operator==(const ChannelBounds&, const ChannelBounds&) = default;
};

struct Channel {
    std::string name;
    RasterF values;
    ChannelBounds bounds;
};

/// Ordered, uniquely named channels over one grid.
struct FeatureStack {
    std::vector<Channel> channels;
    bool normalized = false;

    bool contains(const std::string& name) const;
    const Channel& at(const std::string& name) const;
    std::vector<std::string> names() const;

    /// Appends a channel; throws ConfigError on a duplicate name.
    void append(Channel channel);
    /// Appends the channels of `other` whose names are not present yet.
    /// Equal names denote the same definition, so the first copy is kept.
    void merge(const FeatureStack& other);
};

/// Range knobs for the channel families. Distance ranges derive from the grid.
struct FeatureBounds {
    double height_max = 32.0;  ///< heights [0, h]; Tx-relative heights [-h, h]
    double gain_min_db = -30.0;
    double gain_max_db = 30.0;
};

FeatureStack basic_features(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds = {});
FeatureStack grid_anchor(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds = {});
FeatureStack cylindrical_features(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds = {});
FeatureStack euclidean_features(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds = {});
FeatureStack spherical_features(const Scene& scene, const TxConfig& tx, const FeatureBounds& bounds = {});
FeatureStack gain_slices(const Scene& scene, const TxConfig& tx, const std::vector<double>& heights,
                         const FeatureBounds& bounds = {});

/// Heights 0, step, 2 step, ... up to and including `top`.
std::vector<double> slice_heights(double step, double top = 28.0);
std::string slice_name(const std::string& prefix, double height);

enum class FsplVariant { Floor, FloorTop, Slices };
/// g - 20 log10(d) towards each target point, d (3D) floored at 1 m.
FeatureStack fspl_features(const Scene& scene, const TxConfig& tx, FsplVariant variant,
                           const std::vector<double>& heights = slice_heights(4.0), const FeatureBounds& bounds = {});

enum class LosVariant { Binary, Ours };
enum class LosFrame { Absolute, Relative, Spherical };
FeatureStack los_features(const Scene& scene, const TxConfig& tx, LosVariant variant, LosFrame frame,
                          double ceiling = kDefaultLosCeiling, const FeatureBounds& bounds = {});
FeatureStack los_features(const LosMaps& maps, const GridGeometry& geometry, const TxConfig& tx, LosVariant variant,
                          LosFrame frame, double ceiling = kDefaultLosCeiling, const FeatureBounds& bounds = {});

/// R, G, B, IR channels of the aerial image in [0, 255]. Empty without one.
FeatureStack aerial_features(const Scene& scene);

/// Maps every channel to [-1, 1] with its bounds. A value outside the
/// bounds raises NormalizationRange; nothing is clamped.
FeatureStack normalize(const FeatureStack& stack);
FeatureStack denormalize(const FeatureStack& stack);

/// Channels that depend only on grid geometry and the Tx pose and change
/// under flips/rotations of the grid (azimuth, dx, dy, grid-anchor ramps).
bool is_frame_dependent(const std::string& name);

/// Recomputes a frame-dependent channel (raw values) for the given pose.
Channel frame_channel(const std::string& name, const GridGeometry& geometry, const TxConfig& tx,
                      const FeatureBounds& bounds = {});

/// Which encodings to synthesize for a sample, in this order:
/// basic, grid_anchor, cylindrical, euclidean, spherical, gain_slices, fspl,
/// los, aerial. Channels shared between sets appear once.
struct FeatureConfig {
    std::vector<std::string> sets{"basic", "cylindrical", "fspl", "los"};
    FsplVariant fspl_variant = FsplVariant::FloorTop;
    double slice_step_m = 4.0;
    double slice_top_m = 28.0;
    LosVariant los_variant = LosVariant::Ours;
    LosFrame los_frame = LosFrame::Absolute;
    double los_ceiling_m = kDefaultLosCeiling;
    FeatureBounds bounds;
    bool normalize = true;

    /// Throws ConfigError for unknown set names or empty ranges.
    void validate() const;
};

std::vector<std::string> known_feature_sets();

/// Builds the configured stack. `los` is reused when given (it must have been
/// computed with the configured ceiling), else computed here.
FeatureStack build_features(const Scene& scene, const TxConfig& tx, const FeatureConfig& config,
                            const LosMaps* los = nullptr);

}  // namespace rmgen

#endif  // RMGEN_FEATURES_HPP
