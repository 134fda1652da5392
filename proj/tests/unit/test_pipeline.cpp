#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "partskel/error.hpp"
#include "partskel/image_io.hpp"
#include "partskel/pipeline.hpp"
#include "partskel/synth.hpp"
#include "partskel/tensor_io.hpp"

using namespace partskel;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

PipelineConfig small_dataset(const std::string& name, int frames = 6) {
    const auto root = fs::temp_directory_path() / ("partskel_pipeline_" + name);
    BenchmarkSpec spec;
    spec.identities = 3;
    spec.clips_per_identity = 2;
    spec.frames = frames;
    spec.force = true;
    spec.seed = 5;
    generate_benchmark(root, spec);
    PipelineConfig cfg;
    cfg.dataset = root;
    return cfg;
}

std::size_t count_files(const fs::path& dir, const std::string& ext) {
    std::size_t n = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir)) n += e.path().extension() == ext;
    return n;
}

}  // namespace

TEST(Pipeline, RenderWritesOneRasterPerFrame) {
    auto cfg = small_dataset("render");
    const auto s = cmd_render(cfg);
    EXPECT_EQ(s.sequences, 12u);
    EXPECT_EQ(s.frames, 72u);
    std::size_t pngs = 0;
    for (const auto& e : Manifest::load(cfg.dataset).sequences) {
        pngs += count_files(DatasetLayout(cfg.dataset).parsing_dir(e.sequence_id), ".png");
        EXPECT_TRUE(fs::exists(DatasetLayout(cfg.dataset).render_log(e.sequence_id)));
    }
    EXPECT_EQ(pngs, s.frames);
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, RenderIsByteIdenticalOnRerun) {
    auto cfg = small_dataset("rerun");
    cmd_render(cfg);
    const DatasetLayout layout(cfg.dataset);
    const auto first = read_file(layout.parsing_path("id001_bag_01", 3));
    cfg.workers = 3;
    cmd_render(cfg);
    EXPECT_EQ(read_file(layout.parsing_path("id001_bag_01", 3)), first);
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, FullyFilteredRenderWarnsAndLogs) {
    auto cfg = small_dataset("filtered", 3);
    cfg.tau = 1.0;  // synth confidences stay below 1
    std::vector<std::string> warnings;
    const auto s = cmd_render(cfg, [&](const std::string& w) { warnings.push_back(w); });
    EXPECT_EQ(s.empty_frames, s.frames);
    ASSERT_EQ(warnings.size(), 1u);
    const DatasetLayout layout(cfg.dataset);
    const auto r = read_label_png(layout.parsing_path("id000_normal_00", 0));
    for (auto v : r.labels()) EXPECT_EQ(v, 0);
    EXPECT_NE(read_file(layout.render_log("id000_normal_00")).find("frame 2"), std::string::npos);
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, MissingSilhouetteNamesTheFrame) {
    auto cfg = small_dataset("missing", 3);
    fs::remove(cfg.dataset / "id002_bag_00" / "sil" / "1.png");
    try {
        cmd_render(cfg);
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("id002_bag_00"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("frame 1"), std::string::npos);
    }
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, FuseStampsManifestAndGuardsStrategy) {
    auto cfg = small_dataset("fuse", 3);
    EXPECT_THROW(cmd_fuse(cfg), ValidationError);  // nothing rendered yet
    cmd_render(cfg);
    cmd_fuse(cfg);
    const auto m = Manifest::load(cfg.dataset);
    EXPECT_EQ(m.stamps.at("fuse_strategy"), "crf");
    EXPECT_EQ(m.stamps.at("config_hash"), cfg.hash());
    const DatasetLayout layout(cfg.dataset);
    EXPECT_EQ(read_label_png(layout.fused_path("id000_normal_00", Strategy::Crf, 0)).size(), kTargetSize);

    cfg.strategy = Strategy::Dcf;
    EXPECT_THROW(cmd_fuse(cfg), ValidationError);
    cmd_fuse(cfg, true);
    const auto stack = to_channel_stack(read_tensor(layout.fused_path("id000_normal_00", Strategy::Dcf, 0)));
    EXPECT_EQ(stack.channels(), 13);
    EXPECT_EQ(collapse_dcf(stack), read_label_png(layout.fused_path("id000_normal_00", Strategy::Crf, 0)));
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, ReportsRefuseDifferentConfigHashUnlessForced) {
    auto cfg = small_dataset("hash", 4);
    cmd_render(cfg);
    cmd_fuse(cfg);
    auto changed = cfg;
    changed.margin = 0.3;
    EXPECT_THROW(cmd_eval(changed), ReportError);
    EXPECT_THROW(cmd_entropy(changed), ReportError);
    EXPECT_NO_THROW(cmd_eval(changed, true));
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, EvalReportsPerConditionWithSanityRow) {
    auto cfg = small_dataset("eval", 8);
    cmd_render(cfg);
    cmd_fuse(cfg);
    const auto entropy = cmd_entropy(cfg);
    EXPECT_GT(entropy.delta("crf"), 0.0);
    const auto s = cmd_eval(cfg);
    ASSERT_EQ(s.rows.size(), 5u);
    EXPECT_EQ(s.rows[0].representation, "silhouette");
    EXPECT_EQ(s.rows[1].representation, "crf");
    EXPECT_EQ(s.rows[0].condition, "normal");
    EXPECT_EQ(s.rows[2].condition, "bag");
    EXPECT_EQ(s.rows.back().representation, "sanity");
    EXPECT_EQ(s.rows.back().report.rank1, 1.0);
    EXPECT_EQ(s.config_hash, cfg.hash());
    for (const auto* name : {"eval_report.txt", "eval_report.json", "entropy_report.txt", "entropy_report.json"}) {
        EXPECT_TRUE(fs::exists(cfg.output_root() / name)) << name;
    }
    const auto json = read_file(cfg.output_root() / "eval_report.json");
    EXPECT_NE(json.find(cfg.hash()), std::string::npos);
    EXPECT_EQ(json.find(cfg.dataset.string()), std::string::npos);
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, ConditionWithoutProbesIsSkippedWithWarning) {
    auto cfg = small_dataset("skip", 4);
    auto m = Manifest::load(cfg.dataset);
    for (auto& e : m.sequences) {
        if (e.condition == "bag") e.split = Split::Gallery;
    }
    m.save(cfg.dataset);
    const auto seqs = load_dataset(DatasetLayout(cfg.dataset), m);
    std::vector<std::string> warnings;
    const auto s = evaluate_sequences(m, seqs, cfg, [&](const std::string& w) { warnings.push_back(w); });
    EXPECT_EQ(s.skipped, (std::vector<std::string>{"bag"}));
    EXPECT_EQ(warnings.size(), 1u);
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, InMemoryMatchesDisk) {
    auto cfg = small_dataset("memory", 4);
    cmd_render(cfg);
    cmd_fuse(cfg);
    const DatasetLayout layout(cfg.dataset);
    const auto m = Manifest::load(cfg.dataset);
    const auto seq = load_sequence(layout, m.sequences[3]);
    const auto fused = process_sequence(seq, cfg, Strategy::Crf);
    for (std::size_t i = 0; i < fused.size(); ++i) {
        EXPECT_EQ(fused[i].crf(), read_label_png(layout.fused_path(seq.entry.sequence_id, Strategy::Crf,
                                                                   seq.keypoints.frames[i].frame_index)));
    }
    EXPECT_EQ(cmd_eval(cfg).rows, evaluate_sequences(m, load_dataset(layout, m), cfg).rows);
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, SweepEmitsOneRowPerPoint) {
    auto cfg = small_dataset("sweep", 4);
    const auto s = cmd_sweep(cfg, default_sweep());
    ASSERT_EQ(s.rows.size(), 3u);
    EXPECT_EQ(s.rows[1].point.radius, 10.0);
    EXPECT_EQ(s.rows[1].point.line_width, 12.0);
    for (const auto& row : s.rows) EXPECT_EQ(row.eval.size(), 2u);
    EXPECT_TRUE(fs::exists(cfg.output_root() / "sweep_report.json"));
    fs::remove_all(cfg.dataset);
}

TEST(Pipeline, AutoAlignMapsKeypointsOntoForeground) {
    auto cfg = small_dataset("align", 2);
    cfg.auto_align = true;
    const DatasetLayout layout(cfg.dataset);
    const auto seq = load_sequence(layout, Manifest::load(cfg.dataset).sequences[0]);
    auto shifted = seq.keypoints.frames[0];
    for (auto& j : shifted.joints) j.x += 200.0;  // far outside the canvas
    const auto aligned = prepare_frame(shifted, seq.silhouettes[0], cfg);
    const auto box = foreground_bounds(seq.silhouettes[0]);
    ASSERT_TRUE(box.has_value());
    for (const auto& j : aligned.joints) {
        if (j.confidence < cfg.tau) continue;
        EXPECT_GE(j.x, box->x - 1e-9);
        EXPECT_LE(j.x, box->x + box->width + 1e-9);
    }
    fs::remove_all(cfg.dataset);
}

#ifdef PARTSKEL_CLI
TEST(Cli, ExitCodes) {
    const auto root = fs::temp_directory_path() / "partskel_cli_codes";
    fs::remove_all(root);
    const std::string cli = PARTSKEL_CLI;
    auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    EXPECT_EQ(run("synth " + root.string() + " --identities 2 --clips 1 --frames 2"), 0);
    EXPECT_EQ(run("render " + root.string()), 0);
    EXPECT_EQ(run("render " + root.string() + " --radius 0"), 1);
    EXPECT_EQ(run("render " + root.string() + " --bogus 1"), 1);
    EXPECT_EQ(run("render " + (root / "absent").string()), 2);
    EXPECT_EQ(run("synth " + root.string() + " --identities 2"), 1);  // non-empty without --force
    fs::remove_all(root);
}
#endif
