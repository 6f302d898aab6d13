// Command-line front end: one subcommand per pipeline stage plus `run`.

#include "rmgen/dataset.hpp"
#include "rmgen/errors.hpp"
#include "rmgen/pipeline.hpp"
#include "rmgen/raster_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace rmgen;

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

TxConfig pick_tx(const fs::path& path, std::size_t index) {
    const auto txs = read_tx_list(path);
    if (index >= txs.size())
        throw ConfigError(path.string() + " holds " + std::to_string(txs.size()) + " records, index " +
                          std::to_string(index) + " requested");
    return txs[index];
}

// Options shared with the pipeline config; a --config file supplies defaults.
PipelineConfig base_config(const std::string& config_path) {
    if (config_path.empty()) {
        PipelineConfig c;
        c.patterns = default_patterns();
        return c;
    }
    return load_pipeline_config(config_path);
}

std::vector<fs::path> find_targets(const fs::path& root) {
    std::vector<fs::path> out;
    if (fs::exists(root / "target.f32")) out.emplace_back("target.f32");
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() == "target.f32" && e.path().parent_path() != root)
            out.push_back(fs::relative(e.path(), root));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rmgen: radio-map dataset generator"};
    app.require_subcommand(1);
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string config_path;
    app.add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)");
    app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { seed = s, seed_given = true; }, "Seed");
    app.add_option("--config", config_path, "Pipeline config JSON");

    // gen-scene
    auto* gen = app.add_subcommand("gen-scene", "Generate a synthetic scene directory");
    SyntheticSpec spec;
    std::string gen_out;
    gen->add_option("--out", gen_out, "Scene directory")->required();
    gen->add_option("--grid-size", spec.grid_size);
    gen->add_option("--n-buildings", spec.n_buildings);
    gen->add_option("--height-min", spec.height_min);
    gen->add_option("--height-max", spec.height_max);
    gen->add_option("--vegetation-density", spec.vegetation_density);
    gen->add_option("--resolution", spec.resolution);
    gen->add_flag("--aerial", spec.aerial, "Also write aerial.png");

    // place-tx
    auto* place = app.add_subcommand("place-tx", "Choose Tx sites and orientations on roof edges");
    std::string place_scene, place_out, place_tilts, place_patterns;
    double azimuth_step = -1, min_coverage = -1;
    int tx_per_scene = 0, patterns_per_tx = 0;
    place->add_option("--scene", place_scene)->required();
    place->add_option("--out", place_out)->required();
    place->add_option("--azimuth-step", azimuth_step);
    place->add_option("--tilts", place_tilts, "Comma separated, e.g. 0,-5,-10");
    place->add_option("--min-coverage", min_coverage);
    place->add_option("--tx-per-scene", tx_per_scene);
    place->add_option("--patterns-per-tx", patterns_per_tx);
    place->add_option("--patterns", place_patterns, "JSON list of pattern specs");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate one radio map into a sample directory");
    std::string sim_scene, sim_tx, sim_params, sim_out, sim_id;
    std::size_t sim_index = 0;
    sim->add_option("--scene", sim_scene)->required();
    sim->add_option("--tx", sim_tx)->required();
    sim->add_option("--index", sim_index);
    sim->add_option("--params", sim_params, "SimParams JSON");
    sim->add_option("--out", sim_out)->required();
    sim->add_option("--sample-id", sim_id, "Defaults to the output directory name");

    // los
    auto* los = app.add_subcommand("los", "Write LoS maps into a sample directory");
    std::string los_scene, los_tx, los_out;
    std::size_t los_index = 0;
    double ceiling = kDefaultLosCeiling;
    los->add_option("--scene", los_scene)->required();
    los->add_option("--tx", los_tx)->required();
    los->add_option("--index", los_index);
    los->add_option("--ceiling", ceiling);
    los->add_option("--out", los_out)->required();

    // features
    auto* feat = app.add_subcommand("features", "Write feature channels into a sample directory");
    std::string feat_scene, feat_tx, feat_out, feat_sets;
    std::size_t feat_index = 0;
    bool raw = false;
    feat->add_option("--scene", feat_scene)->required();
    feat->add_option("--tx", feat_tx)->required();
    feat->add_option("--index", feat_index);
    feat->add_option("--sets", feat_sets, "Comma separated feature sets");
    feat->add_flag("--raw", raw, "Skip normalization");
    feat->add_option("--out", feat_out)->required();

    // export-dataset
    auto* exp = app.add_subcommand("export-dataset", "Package sample directories with a manifest");
    std::vector<std::string> exp_samples;
    std::string exp_out;
    std::uint64_t split_seed = 42;
    exp->add_option("--samples", exp_samples, "Sample directories")->required();
    exp->add_option("--out", exp_out)->required();
    exp->add_option("--split-seed", split_seed);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Compare predicted and true gray maps");
    std::string pred_dir, truth_dir, metric = "rmse";
    eval->add_option("--pred", pred_dir)->required();
    eval->add_option("--truth", truth_dir)->required();
    eval->add_option("--metric", metric)->check(CLI::IsMember({"rmse", "nmse"}));

    // run
    auto* run = app.add_subcommand("run", "Full pipeline from a config file");
    std::string run_out;
    run->add_option("--out", run_out, "Overrides the config output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            spec.seed = seed;
            save_scene_dir(generate_synthetic_scene(spec), gen_out);
        } else if (place->parsed()) {
            PipelineConfig c = base_config(config_path);
            if (seed_given) c.seed = seed;
            if (azimuth_step > 0) c.placement.azimuth_step_deg = azimuth_step;
            if (!place_tilts.empty()) c.placement.tilts_deg = parse_list(place_tilts);
            if (min_coverage >= 0) c.placement.min_coverage = min_coverage;
            if (tx_per_scene > 0) c.tx_per_scene = tx_per_scene;
            if (!place_patterns.empty()) {
                c.patterns.clear();
                for (const Json& p : read_json(place_patterns)) c.patterns.push_back(pattern_from_json(p));
            }
            if (patterns_per_tx > 0) c.patterns_per_tx = patterns_per_tx;
            c.patterns_per_tx = std::min<int>(c.patterns_per_tx, static_cast<int>(c.patterns.size()));
            const NamedScene ns{fs::path(place_scene).filename().string(), load_scene_dir(place_scene)};
            const auto txs = plan_transmitters(ns, c, 0);
            write_tx_list(place_out, txs);
            std::cerr << txs.size() << " transmitter(s) written to " << place_out << "\n";
            if (txs.empty()) return 3;
        } else if (sim->parsed()) {
            PipelineConfig c = base_config(config_path);
            if (!sim_params.empty()) c.params = params_from_json(read_json(sim_params));
            const Scene scene = load_scene_dir(sim_scene);
            const TxConfig tx = pick_tx(sim_tx, sim_index);
            const RadioMap map = simulate_radio_map(scene, tx, c.params, jobs);
            SampleRecord s;
            s.sample_id = sim_id.empty() ? fs::path(sim_out).filename().string() : sim_id;
            s.scene_id = tx.scene_id.empty() ? fs::path(sim_scene).filename().string() : tx.scene_id;
            s.pattern_id = tx.pattern_id;
            s.tx = tx;
            s.grid = scene.geometry();
            s.params = c.params;
            s.target = map.gray;
            s.pl_db = map.pl_db;
            write_sample(s, sim_out);
        } else if (los->parsed()) {
            const Scene scene = load_scene_dir(los_scene);
            const TxConfig tx = pick_tx(los_tx, los_index);
            const SimParams params = base_config(config_path).params;
            write_los_maps(compute_los(scene, tx, ceiling, params.rx_height_m, jobs), los_out, scene.resolution());
        } else if (feat->parsed()) {
            PipelineConfig c = base_config(config_path);
            if (!feat_sets.empty()) c.features.sets = split_names(feat_sets);
            if (raw) c.features.normalize = false;
            const Scene scene = load_scene_dir(feat_scene);
            const TxConfig tx = pick_tx(feat_tx, feat_index);
            write_feature_stack(build_features(scene, tx, c.features), feat_out, scene.resolution());
        } else if (exp->parsed()) {
            std::vector<fs::path> dirs(exp_samples.begin(), exp_samples.end());
            const Manifest m = export_dataset(dirs, exp_out, split_seed, {}, jobs);
            std::cerr << m.samples.size() << " sample(s) exported to " << exp_out << "\n";
        } else if (eval->parsed()) {
            const auto targets = find_targets(truth_dir);
            if (targets.empty()) throw MissingFile("no target.f32 under " + truth_dir);
            MetricAccumulator acc;
            for (const fs::path& rel : targets) {
                const fs::path pred = fs::path(pred_dir) / rel;
                acc.add(read_raster(pred).values, read_raster(fs::path(truth_dir) / rel).values);
            }
            const Json report = {{"metric", metric},
                                 {"value", metric == "rmse" ? acc.rmse_gray() : acc.nmse_db()},
                                 {"rmse_gray", acc.rmse_gray()},
                                 {"rmse_db", acc.rmse_db()},
                                 {"nmse_db", acc.nmse_db()},
                                 {"maps", acc.maps()},
                                 {"pixels", acc.pixels()}};
            std::cout << report.dump(2) << "\n";
        } else if (run->parsed()) {
            if (config_path.empty()) throw ConfigError("run needs --config");
            PipelineConfig c = load_pipeline_config(config_path);
            if (seed_given) c.seed = seed;
            if (!run_out.empty()) c.output = run_out;
            const Manifest m = run_pipeline(c, jobs);
            std::cerr << m.samples.size() << " sample(s) in " << c.output.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
