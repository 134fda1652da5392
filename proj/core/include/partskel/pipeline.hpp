#pragma once

/// \file pipeline.hpp
/// \brief Dataset-level commands: render, fuse, entropy, evaluation, sweeps and timing.
///
/// Every command processes sequences on a worker pool. Work is split per sequence,
/// results are written to per-sequence slots and reduced in manifest order, so the
/// outputs do not depend on the number of workers.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "partskel/analysis.hpp"
#include "partskel/config.hpp"
#include "partskel/dataset.hpp"
#include "partskel/gaitlab.hpp"

namespace partskel {

/// Receives non-fatal warnings (the CLI prints them to stderr).
using WarningSink = std::function<void(const std::string&)>;

struct LoadedSequence {
    ManifestEntry entry;
    KeypointSequence keypoints;
    std::vector<SilhouetteMask> silhouettes;  ///< one per keypoint frame
};

/// Loads keypoints and every frame's silhouette. Throws IoError naming the frame
/// when a silhouette is missing; all silhouettes of a sequence must share a size.
LoadedSequence load_sequence(const DatasetLayout& layout, const ManifestEntry& entry);
std::vector<LoadedSequence> load_dataset(const DatasetLayout& layout, const Manifest& manifest, int workers = 1);

/// Keypoints as rendered: optionally aligned onto the silhouette foreground box.
KeypointFrame prepare_frame(const KeypointFrame& frame, const SilhouetteMask& sil, const PipelineConfig& cfg);

/// Renders one sequence on its silhouette canvas.
std::vector<LabelRaster> render_sequence(const LoadedSequence& seq, const PipelineConfig& cfg);
/// Renders and fuses one sequence in memory.
std::vector<FusedSample> process_sequence(const LoadedSequence& seq, const PipelineConfig& cfg, Strategy strategy);
/// Silhouette-only samples: the lifted silhouette at the target size, as CRF samples.
std::vector<FusedSample> silhouette_sequence(const LoadedSequence& seq, const PipelineConfig& cfg);

struct RenderSummary {
    std::size_t sequences = 0;
    std::size_t frames = 0;
    std::size_t empty_frames = 0;  ///< frames with no valid joint
    double ms_per_frame = 0.0;     ///< wall time per frame, including I/O
};

/// Writes `<out>/<seq>/parsing/<frame>.png` and `<out>/<seq>/render.log`.
RenderSummary cmd_render(const PipelineConfig& cfg, const WarningSink& warn = {});

struct FuseSummary {
    std::size_t sequences = 0;
    std::size_t frames = 0;
};

/// Fuses rendered rasters with silhouettes into `<out>/<seq>/{crf|dcf}/`, then
/// stamps the manifest with the strategy and config hash. Refuses when the
/// manifest carries a different strategy stamp unless `force` is set.
FuseSummary cmd_fuse(const PipelineConfig& cfg, bool force = false);

/// Entropy of the silhouette baseline and every fused strategy present on disk.
EntropyReport cmd_entropy(const PipelineConfig& cfg, bool force = false);

struct EvalRow {
    std::string representation;  ///< "silhouette", "crf", "dcf" or "sanity"
    std::string condition;
    EvalReport report;

    friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

struct EvalSummary {
    std::string config_hash;
    std::string strategy;
    double radius = 0.0;
    double line_width = 0.0;
    std::vector<EvalRow> rows;
    std::vector<std::string> skipped;  ///< conditions without probes
};

/// Per-sequence descriptors for one representation, aligned with the manifest.
struct DescriptorSet {
    std::string representation;
    std::vector<std::vector<double>> descriptors;
};

/// Fits the embedding head on the gallery, then evaluates every condition's
/// probes against the gallery for each representation. A final "sanity" row
/// matches the gallery against itself for the first representation.
EvalSummary evaluate_descriptors(const Manifest& manifest, std::span<const DescriptorSet> sets,
                                 const PipelineConfig& cfg, const WarningSink& warn = {});

/// In-memory silhouette vs fused comparison on loaded sequences.
EvalSummary evaluate_sequences(const Manifest& manifest, std::span<const LoadedSequence> sequences,
                               const PipelineConfig& cfg, const WarningSink& warn = {});

/// Reads fused outputs from disk. Refuses when the manifest's config hash differs
/// from `cfg` unless `force` is set.
EvalSummary cmd_eval(const PipelineConfig& cfg, bool force = false, const WarningSink& warn = {});

struct SweepPoint {
    double radius = 0.0;
    double line_width = 0.0;
};

/// Radius/width pairs compared by default; (10, 12) is the shipped default.
const std::vector<SweepPoint>& default_sweep();

struct SweepRow {
    SweepPoint point;
    double entropy = 0.0;        ///< fused entropy over the dataset
    double entropy_delta = 0.0;  ///< fused minus silhouette entropy
    std::vector<EvalRow> eval;   ///< fused rows only, one per condition
};

struct SweepSummary {
    std::string config_hash;  ///< hash of the base config
    std::vector<SweepRow> rows;
};

SweepSummary sweep_sequences(const Manifest& manifest, std::span<const LoadedSequence> sequences,
                             const PipelineConfig& cfg, std::span<const SweepPoint> points,
                             const WarningSink& warn = {});
SweepSummary cmd_sweep(const PipelineConfig& cfg, std::span<const SweepPoint> points, const WarningSink& warn = {});

struct BenchResult {
    std::size_t frames = 0;
    double seconds = 0.0;
    [[nodiscard]] double frames_per_second() const { return seconds > 0.0 ? frames / seconds : 0.0; }
    [[nodiscard]] double ms_per_frame() const { return frames > 0 ? 1000.0 * seconds / frames : 0.0; }
};

/// Times render + fuse in memory over the loaded sequences, `repeats` passes.
BenchResult bench_sequences(std::span<const LoadedSequence> sequences, const PipelineConfig& cfg, int repeats = 1);
BenchResult cmd_bench(const PipelineConfig& cfg, int repeats = 1);

// reports

std::string format_eval_text(const EvalSummary& summary);
std::string format_eval_json(const EvalSummary& summary);
/// Writes eval_report.txt and eval_report.json into `dir`.
void write_eval_report(const std::filesystem::path& dir, const EvalSummary& summary);

std::string format_sweep_text(const SweepSummary& summary);
std::string format_sweep_json(const SweepSummary& summary);
/// Writes sweep_report.txt and sweep_report.json into `dir`.
void write_sweep_report(const std::filesystem::path& dir, const SweepSummary& summary);

}  // namespace partskel
