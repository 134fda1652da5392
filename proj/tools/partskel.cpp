// partskel command-line driver.

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "partskel/config.hpp"
#include "partskel/error.hpp"
#include "partskel/pipeline.hpp"
#include "partskel/synth.hpp"

namespace {

using namespace partskel;

struct PipelineArgs {
    std::string config_file;
    std::string dataset;
    std::map<std::string, std::string> overrides;
    bool force = false;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& args) {
    cmd->add_option("root", args.dataset, "Dataset root (same as --dataset)");
    cmd->add_option("--config", args.config_file, "Config file (key = value); flags override it");
    for (const auto& key : PipelineConfig::keys()) {
        cmd->add_option_function<std::string>(
            "--" + key, [&args, key](const std::string& v) { args.overrides[key] = v; }, "Config key " + key);
    }
    cmd->add_flag("--force", args.force, "Overwrite or compare despite stamp mismatches");
}

PipelineConfig resolve(const PipelineArgs& args) {
    PipelineConfig cfg = args.config_file.empty() ? PipelineConfig{} : PipelineConfig::load(args.config_file);
    for (const auto& [k, v] : args.overrides) cfg.set(k, v);
    if (!args.dataset.empty()) cfg.dataset = args.dataset;
    cfg.validate();
    return cfg;
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

std::vector<SweepPoint> parse_points(const std::string& text) {
    std::vector<SweepPoint> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ValidationError("sweep point '" + item + "' is not radius:width");
        try {
            out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        } catch (const std::logic_error&) {
            throw ValidationError("sweep point '" + item + "' is not numeric");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parsing-skeleton gait toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic walker dataset");
    std::string synth_out;
    std::string synth_conditions = "normal,bag";
    BenchmarkSpec spec;
    synth->add_option("out", synth_out, "Dataset root to create")->required();
    synth->add_option("--identities", spec.identities, "Number of identities")->capture_default_str();
    synth->add_option("--clips", spec.clips_per_identity, "Clips per identity and condition")->capture_default_str();
    synth->add_option("--conditions", synth_conditions, "Comma-separated: normal, bag, clothes")->capture_default_str();
    synth->add_option("--frames", spec.frames, "Frames per clip")->capture_default_str();
    synth->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
    synth->add_option("--workers", spec.workers, "Worker threads")->capture_default_str();
    synth->add_option("--noise", spec.options.joint_noise, "Keypoint jitter std-dev, pixels")->capture_default_str();
    synth->add_option("--dropout", spec.options.dropout, "Low-confidence joint probability")->capture_default_str();
    synth->add_flag("--force", spec.force, "Clear a non-empty output directory");

    PipelineArgs render_args, fuse_args, entropy_args, eval_args, sweep_args, bench_args;
    auto* render = app.add_subcommand("render", "Render parsing skeletons for every frame");
    add_pipeline_options(render, render_args);
    bool render_bench = false;
    render->add_flag("--bench", render_bench, "Report wall time per frame");

    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse rendered skeletons with silhouettes");
    add_pipeline_options(fuse_cmd, fuse_args);

    auto* entropy = app.add_subcommand("entropy", "Pixel-class entropy of silhouettes and fused samples");
    add_pipeline_options(entropy, entropy_args);

    auto* eval = app.add_subcommand("eval", "Silhouette-only vs fused recognition report, plus entropy");
    add_pipeline_options(eval, eval_args);

    auto* sweep = app.add_subcommand("sweep", "Radius/line-width sweep, rendered in memory");
    add_pipeline_options(sweep, sweep_args);
    std::string sweep_points;
    sweep->add_option("--points", sweep_points, "radius:width pairs, e.g. 3:3,10:12,20:24");

    auto* bench = app.add_subcommand("bench", "Time in-memory render + fuse");
    add_pipeline_options(bench, bench_args);
    int repeats = 3;
    bench->add_option("--repeats", repeats, "Passes over the dataset")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            spec.conditions.clear();
            std::stringstream in(synth_conditions);
            std::string c;
            while (std::getline(in, c, ',')) spec.conditions.push_back(parse_condition(c));
            const auto manifest = generate_benchmark(synth_out, spec);
            std::printf("wrote %zu sequences to %s\n", manifest.sequences.size(), synth_out.c_str());
        } else if (render->parsed()) {
            const auto s = cmd_render(resolve(render_args), warn);
            std::printf("rendered %zu frames in %zu sequences (%zu without valid joints)\n", s.frames, s.sequences,
                        s.empty_frames);
            if (render_bench) std::printf("%.4f ms/frame\n", s.ms_per_frame);
        } else if (fuse_cmd->parsed()) {
            const auto cfg = resolve(fuse_args);
            const auto s = cmd_fuse(cfg, fuse_args.force);
            std::printf("fused %zu frames in %zu sequences (%s, config %s)\n", s.frames, s.sequences,
                        std::string(to_string(cfg.strategy)).c_str(), cfg.hash().c_str());
        } else if (entropy->parsed()) {
            std::cout << format_entropy_text(cmd_entropy(resolve(entropy_args), entropy_args.force));
        } else if (eval->parsed()) {
            const auto cfg = resolve(eval_args);
            std::cout << format_entropy_text(cmd_entropy(cfg, eval_args.force));
            std::cout << format_eval_text(cmd_eval(cfg, eval_args.force, warn));
        } else if (sweep->parsed()) {
            const auto points = sweep_points.empty() ? default_sweep() : parse_points(sweep_points);
            std::cout << format_sweep_text(cmd_sweep(resolve(sweep_args), points, warn));
        } else if (bench->parsed()) {
            const auto r = cmd_bench(resolve(bench_args), repeats);
            std::printf("%zu frames in %.3f s: %.1f frames/s, %.4f ms/frame\n", r.frames, r.seconds,
                        r.frames_per_second(), r.ms_per_frame());
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
