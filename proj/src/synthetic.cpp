#include "rmgen/synthetic.hpp"

#include "rmgen/errors.hpp"
#include "rmgen/rng.hpp"

#include <algorithm>
#include <cmath>

namespace rmgen {

namespace {

constexpr double kVegetationMin = 2.0;
constexpr double kVegetationMax = 15.0;

AerialImage render_aerial(const RasterF& buildings, const RasterF& vegetation) {
    AerialImage img;
    img.height = static_cast<int>(buildings.rows());
    img.width = static_cast<int>(buildings.cols());
    img.rgba.resize(static_cast<std::size_t>(img.width) * img.height * 4);
    auto byte = [](double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); };
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            std::uint8_t* px = &img.rgba[(static_cast<std::size_t>(r) * img.width + c) * 4];
            const double b = buildings(r, c), v = vegetation(r, c);
            px[0] = byte(b > 0 ? 150 + 3 * b : 90);
            px[1] = byte(v > 0 ? 120 + 6 * v : (b > 0 ? 140 : 100));
            px[2] = byte(b > 0 ? 140 : 80);
            px[3] = byte(v > 0 ? 200 : 60);
        }
    return img;
}

}  // namespace

Scene generate_synthetic_scene(const SyntheticSpec& spec) {
    if (spec.grid_size < 1 || spec.n_buildings < 0 || !(spec.resolution > 0.0))
        throw PreconditionViolation("synthetic scene: invalid grid size, building count or resolution");
    if (!(spec.height_min > 0.0) || spec.height_max < spec.height_min)
        throw PreconditionViolation("synthetic scene: height range must satisfy 0 < min <= max");
    if (!(spec.vegetation_density >= 0.0 && spec.vegetation_density <= 1.0))
        throw PreconditionViolation("synthetic scene: vegetation density outside [0, 1]");

    const int n = spec.grid_size;
    Rng rng(spec.seed);
    RasterF buildings = RasterF::Zero(n, n);
    RasterF vegetation = RasterF::Zero(n, n);

    const int max_side = std::max(3, n / 4);
    for (int i = 0; i < spec.n_buildings; ++i) {
        const int w = std::min(n, rng.between(3, max_side));
        const int h = std::min(n, rng.between(3, max_side));
        const int c0 = rng.between(0, n - w);
        const int r0 = rng.between(0, n - h);
        const float height = static_cast<float>(rng.uniform(spec.height_min, spec.height_max));
        auto block = buildings.block(r0, c0, h, w);
        block = block.max(height);
    }

    const long ground = (buildings == 0.0f).count();
    const long target = std::lround(spec.vegetation_density * static_cast<double>(ground));
    long covered = 0;
    // Bounded so that dense targets on crowded grids terminate.
    for (int attempt = 0; covered < target && attempt < 16 * n * n; ++attempt) {
        const int cr = rng.between(0, n - 1);
        const int cc = rng.between(0, n - 1);
        const int radius = rng.between(1, 3);
        const float height = static_cast<float>(rng.uniform(kVegetationMin, kVegetationMax));
        for (int r = std::max(0, cr - radius); r <= std::min(n - 1, cr + radius) && covered < target; ++r)
            for (int c = std::max(0, cc - radius); c <= std::min(n - 1, cc + radius) && covered < target; ++c) {
                if ((r - cr) * (r - cr) + (c - cc) * (c - cc) > radius * radius) continue;
                if (buildings(r, c) > 0.0f || vegetation(r, c) > 0.0f) continue;
                vegetation(r, c) = height;
                ++covered;
            }
    }

    std::optional<AerialImage> aerial;
    if (spec.aerial) aerial = render_aerial(buildings, vegetation);
    return Scene(HeightGrid(std::move(buildings), spec.resolution), HeightGrid(std::move(vegetation), spec.resolution),
                 std::move(aerial));
}

}  // namespace rmgen
