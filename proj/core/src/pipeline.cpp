#include "partskel/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "partskel/error.hpp"
#include "partskel/image_io.hpp"
#include "partskel/parallel.hpp"
#include "partskel/tensor_io.hpp"

namespace partskel {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

DatasetLayout layout_for(const PipelineConfig& cfg) {
    if (cfg.dataset.empty()) throw ConfigError("no dataset root given");
    return DatasetLayout(cfg.dataset, cfg.output_root());
}

Manifest load_manifest(const DatasetLayout& layout) {
    if (!fs::exists(layout.manifest_path())) {
        throw IoError("no manifest in dataset directory " + layout.root().string());
    }
    Manifest m = Manifest::load(layout.root());
    m.validate_paths(layout.root());
    return m;
}

void check_hash(const Manifest& manifest, const PipelineConfig& cfg, bool force) {
    const auto it = manifest.stamps.find("config_hash");
    if (it == manifest.stamps.end() || force) return;
    if (it->second != cfg.hash()) {
        throw ReportError("outputs were produced with config hash " + it->second + " but the current config hashes to " +
                          cfg.hash() + "; rerun fuse or pass --force");
    }
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw IoError("cannot write " + path.string());
}

bool has_valid_joint(const KeypointFrame& frame, const RenderConfig& rc) {
    return !filter_valid(frame, ValidityConfig{rc.tau, rc.canvas.width, rc.canvas.height}).empty();
}

LabelRaster as_labels(const FusedSample& s) {
    return s.strategy == Strategy::Crf ? s.crf() : collapse_dcf(s.dcf());
}

}  // namespace

LoadedSequence load_sequence(const DatasetLayout& layout, const ManifestEntry& entry) {
    LoadedSequence seq{entry, load_keypoint_sequence(layout.keypoints_path(entry)), {}};
    seq.keypoints.sequence_id = entry.sequence_id;
    seq.silhouettes.reserve(seq.keypoints.frames.size());
    for (const auto& f : seq.keypoints.frames) {
        const fs::path p = layout.silhouette_path(entry, f.frame_index);
        if (!fs::exists(p)) {
            throw IoError("sequence " + entry.sequence_id + ": missing silhouette for frame " +
                          std::to_string(f.frame_index) + " (" + p.string() + ")");
        }
        seq.silhouettes.push_back(read_mask_png(p));
        if (seq.silhouettes.back().size() != seq.silhouettes.front().size()) {
            throw ValidationError("sequence " + entry.sequence_id + ": silhouette size changes at frame " +
                                  std::to_string(f.frame_index));
        }
    }
    return seq;
}

std::vector<LoadedSequence> load_dataset(const DatasetLayout& layout, const Manifest& manifest, int workers) {
    std::vector<LoadedSequence> out(manifest.sequences.size());
    parallel_for(out.size(), workers, [&](std::size_t i) { out[i] = load_sequence(layout, manifest.sequences[i]); });
    return out;
}

KeypointFrame prepare_frame(const KeypointFrame& frame, const SilhouetteMask& sil, const PipelineConfig& cfg) {
    if (!cfg.auto_align) return frame;
    const auto src = joint_bounds(frame, cfg.tau);
    const auto dst = foreground_bounds(sil);
    if (!src || !dst || src->width <= 0.0 || src->height <= 0.0) return frame;
    return align_keypoints(frame, *src, *dst);
}

std::vector<LabelRaster> render_sequence(const LoadedSequence& seq, const PipelineConfig& cfg) {
    const auto mapping = cfg.part_mapping();
    std::vector<LabelRaster> out;
    out.reserve(seq.keypoints.frames.size());
    for (std::size_t i = 0; i < seq.keypoints.frames.size(); ++i) {
        const auto& sil = seq.silhouettes[i];
        out.push_back(render_parsing_skeleton(prepare_frame(seq.keypoints.frames[i], sil, cfg), mapping,
                                              cfg.render_config(sil.size())));
    }
    return out;
}

std::vector<FusedSample> process_sequence(const LoadedSequence& seq, const PipelineConfig& cfg, Strategy strategy) {
    const auto mapping = cfg.part_mapping();
    std::vector<FusedSample> out;
    out.reserve(seq.keypoints.frames.size());
    LabelRaster parsing;
    for (std::size_t i = 0; i < seq.keypoints.frames.size(); ++i) {
        const auto& sil = seq.silhouettes[i];
        if (parsing.size() != sil.size()) parsing = LabelRaster(sil.size());
        render_parsing_skeleton(prepare_frame(seq.keypoints.frames[i], sil, cfg), mapping,
                                cfg.render_config(sil.size()), parsing);
        out.push_back(fuse(parsing, sil, strategy, cfg.target));
    }
    return out;
}

std::vector<FusedSample> silhouette_sequence(const LoadedSequence& seq, const PipelineConfig& cfg) {
    std::vector<FusedSample> out;
    out.reserve(seq.silhouettes.size());
    for (const auto& sil : seq.silhouettes) {
        out.push_back({Strategy::Crf, lift_silhouette(resize_mask(sil, cfg.target))});
    }
    return out;
}

RenderSummary cmd_render(const PipelineConfig& cfg, const WarningSink& warn) {
    cfg.validate();
    const auto start = Clock::now();
    const auto layout = layout_for(cfg);
    const auto manifest = load_manifest(layout);
    const auto mapping = cfg.part_mapping();

    std::vector<std::size_t> frames(manifest.sequences.size());
    std::vector<std::size_t> empty(manifest.sequences.size());
    parallel_for(manifest.sequences.size(), cfg.workers, [&](std::size_t i) {
        const auto seq = load_sequence(layout, manifest.sequences[i]);
        const auto& id = seq.entry.sequence_id;
        fs::create_directories(layout.parsing_dir(id));
        std::string log = "# frames with no valid joint\n";
        for (std::size_t f = 0; f < seq.keypoints.frames.size(); ++f) {
            const auto& sil = seq.silhouettes[f];
            const auto rc = cfg.render_config(sil.size());
            const auto kf = prepare_frame(seq.keypoints.frames[f], sil, cfg);
            if (!has_valid_joint(kf, rc)) {
                log += "frame " + std::to_string(kf.frame_index) + "\n";
                ++empty[i];
            }
            write_label_png(layout.parsing_path(id, kf.frame_index), render_parsing_skeleton(kf, mapping, rc));
        }
        write_text(layout.render_log(id), log);
        frames[i] = seq.keypoints.frames.size();
    });

    RenderSummary s;
    s.sequences = manifest.sequences.size();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        s.frames += frames[i];
        s.empty_frames += empty[i];
    }
    if (s.frames > 0) s.ms_per_frame = 1000.0 * seconds_since(start) / static_cast<double>(s.frames);
    if (warn && s.frames > 0 && s.empty_frames == s.frames) {
        warn("no joint passed the validity filter (tau = " + cfg.get("tau") +
             "); every parsing skeleton is background");
    } else if (warn && s.empty_frames > 0) {
        warn(std::to_string(s.empty_frames) + " of " + std::to_string(s.frames) +
             " frames have no valid joint (see render.log)");
    }
    return s;
}

FuseSummary cmd_fuse(const PipelineConfig& cfg, bool force) {
    cfg.validate();
    const auto layout = layout_for(cfg);
    auto manifest = load_manifest(layout);
    const std::string strategy(to_string(cfg.strategy));
    if (const auto it = manifest.stamps.find("fuse_strategy");
        it != manifest.stamps.end() && it->second != strategy && !force) {
        throw ValidationError("existing outputs were fused with strategy " + it->second + ", not " + strategy +
                              "; pass --force to overwrite");
    }

    std::vector<std::size_t> frames(manifest.sequences.size());
    parallel_for(manifest.sequences.size(), cfg.workers, [&](std::size_t i) {
        const auto seq = load_sequence(layout, manifest.sequences[i]);
        const auto& id = seq.entry.sequence_id;
        fs::create_directories(layout.fused_dir(id, cfg.strategy));
        for (std::size_t f = 0; f < seq.keypoints.frames.size(); ++f) {
            const auto index = seq.keypoints.frames[f].frame_index;
            const auto src = layout.parsing_path(id, index);
            if (!fs::exists(src)) {
                throw ValidationError("sequence " + id + ": no rendered raster for frame " + std::to_string(index) +
                                      " (" + src.string() + "); run render first");
            }
            const auto sample = fuse(read_label_png(src), seq.silhouettes[f], cfg.strategy, cfg.target);
            const auto dst = layout.fused_path(id, cfg.strategy, index);
            if (cfg.strategy == Strategy::Crf) {
                write_label_png(dst, sample.crf());
            } else {
                write_tensor(dst, to_tensor(sample.dcf()));
            }
        }
        frames[i] = seq.keypoints.frames.size();
    });

    manifest.stamps["fuse_strategy"] = strategy;
    manifest.stamps["config_hash"] = cfg.hash();
    manifest.save(layout.root());

    FuseSummary s;
    s.sequences = manifest.sequences.size();
    for (auto n : frames) s.frames += n;
    return s;
}

EntropyReport cmd_entropy(const PipelineConfig& cfg, bool force) {
    cfg.validate();
    const auto layout = layout_for(cfg);
    const auto manifest = load_manifest(layout);
    check_hash(manifest, cfg, force);
    std::string fused(to_string(cfg.strategy));
    if (const auto it = manifest.stamps.find("fuse_strategy"); it != manifest.stamps.end()) fused = it->second;
    const std::vector<std::string> names{"silhouette", fused};
    auto report = entropy_report(layout.root(), names, cfg.target, cfg.hash(), layout.out());
    write_entropy_report(layout.out(), report);
    return report;
}

EvalSummary evaluate_descriptors(const Manifest& manifest, std::span<const DescriptorSet> sets,
                                 const PipelineConfig& cfg, const WarningSink& warn) {
    if (sets.empty()) throw EvaluationError("nothing to evaluate");
    std::vector<std::size_t> gallery;
    for (std::size_t i = 0; i < manifest.sequences.size(); ++i) {
        if (manifest.sequences[i].split == Split::Gallery) gallery.push_back(i);
    }
    if (gallery.empty()) throw EvaluationError("manifest has no gallery sequences");

    const HeadOptions options{cfg.train_epochs, cfg.learning_rate, cfg.margin,
                              cfg.ce_weight,    cfg.triplet_weight, cfg.seed};
    std::vector<std::vector<Embedding>> embedded(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
        if (sets[s].descriptors.size() != manifest.sequences.size()) {
            throw EvaluationError("descriptor set '" + sets[s].representation + "' does not match the manifest");
        }
        std::vector<std::vector<double>> train;
        std::vector<std::string> labels;
        for (auto i : gallery) {
            train.push_back(sets[s].descriptors[i]);
            labels.push_back(manifest.sequences[i].identity);
        }
        const auto head = fit_embedding_head(train, labels, options);
        for (std::size_t i = 0; i < manifest.sequences.size(); ++i) {
            const auto& e = manifest.sequences[i];
            embedded[s].push_back(head.apply(sets[s].descriptors[i], e.identity, e.sequence_id));
        }
    }

    EvalSummary summary;
    summary.config_hash = cfg.hash();
    summary.strategy = std::string(to_string(cfg.strategy));
    summary.radius = cfg.radius;
    summary.line_width = cfg.line_width;
    for (const auto& condition : manifest.conditions()) {
        std::vector<std::size_t> probes;
        for (std::size_t i = 0; i < manifest.sequences.size(); ++i) {
            const auto& e = manifest.sequences[i];
            if (e.split == Split::Probe && e.condition == condition) probes.push_back(i);
        }
        if (probes.empty()) {
            summary.skipped.push_back(condition);
            if (warn) warn("condition " + condition + " has no probe sequences; skipped");
            continue;
        }
        for (std::size_t s = 0; s < sets.size(); ++s) {
            std::vector<Embedding> g;
            std::vector<Embedding> p;
            for (auto i : gallery) g.push_back(embedded[s][i]);
            for (auto i : probes) p.push_back(embedded[s][i]);
            summary.rows.push_back({sets[s].representation, condition, evaluate(g, p)});
        }
    }
    std::vector<Embedding> g;
    for (auto i : gallery) g.push_back(embedded.front()[i]);
    summary.rows.push_back({"sanity", "gallery", evaluate(g, g)});
    return summary;
}

EvalSummary evaluate_sequences(const Manifest& manifest, std::span<const LoadedSequence> sequences,
                               const PipelineConfig& cfg, const WarningSink& warn) {
    cfg.validate();
    std::vector<DescriptorSet> sets{{"silhouette", {}}, {std::string(to_string(cfg.strategy)), {}}};
    for (auto& s : sets) s.descriptors.resize(sequences.size());
    parallel_for(sequences.size(), cfg.workers, [&](std::size_t i) {
        sets[0].descriptors[i] = describe_sequence(silhouette_sequence(sequences[i], cfg), cfg.bands, cfg.stripes);
        sets[1].descriptors[i] =
            describe_sequence(process_sequence(sequences[i], cfg, cfg.strategy), cfg.bands, cfg.stripes);
    });
    return evaluate_descriptors(manifest, sets, cfg, warn);
}

EvalSummary cmd_eval(const PipelineConfig& cfg, bool force, const WarningSink& warn) {
    cfg.validate();
    const auto layout = layout_for(cfg);
    const auto manifest = load_manifest(layout);
    check_hash(manifest, cfg, force);
    Strategy strategy = cfg.strategy;
    if (const auto it = manifest.stamps.find("fuse_strategy"); it != manifest.stamps.end()) {
        strategy = parse_strategy(it->second);
    }

    std::vector<DescriptorSet> sets{{"silhouette", {}}, {std::string(to_string(strategy)), {}}};
    for (auto& s : sets) s.descriptors.resize(manifest.sequences.size());
    parallel_for(manifest.sequences.size(), cfg.workers, [&](std::size_t i) {
        const auto seq = load_sequence(layout, manifest.sequences[i]);
        const auto& id = seq.entry.sequence_id;
        std::vector<FusedSample> fused;
        for (const auto& f : seq.keypoints.frames) {
            const auto p = layout.fused_path(id, strategy, f.frame_index);
            if (!fs::exists(p)) {
                throw ReportError("sequence " + id + ": missing fused output " + p.string() + "; run fuse first");
            }
            if (strategy == Strategy::Crf) {
                fused.push_back({strategy, read_label_png(p)});
            } else {
                fused.push_back({strategy, to_channel_stack(read_tensor(p))});
            }
        }
        sets[0].descriptors[i] = describe_sequence(silhouette_sequence(seq, cfg), cfg.bands, cfg.stripes);
        sets[1].descriptors[i] = describe_sequence(fused, cfg.bands, cfg.stripes);
    });
    auto summary = evaluate_descriptors(manifest, sets, cfg, warn);
    write_eval_report(layout.out(), summary);
    return summary;
}

const std::vector<SweepPoint>& default_sweep() {
    static const std::vector<SweepPoint> points{{3.0, 3.0}, {10.0, 12.0}, {20.0, 24.0}};
    return points;
}

SweepSummary sweep_sequences(const Manifest& manifest, std::span<const LoadedSequence> sequences,
                             const PipelineConfig& cfg, std::span<const SweepPoint> points,
                             const WarningSink& warn) {
    cfg.validate();
    if (points.empty()) throw ValidationError("sweep needs at least one radius/width pair");

    std::vector<ClassHistogram> sil_hist(sequences.size());
    std::vector<std::vector<double>> sil_desc(sequences.size());
    parallel_for(sequences.size(), cfg.workers, [&](std::size_t i) {
        const auto samples = silhouette_sequence(sequences[i], cfg);
        for (const auto& s : samples) sil_hist[i].add(s.crf());
        sil_desc[i] = describe_sequence(samples, cfg.bands, cfg.stripes);
    });
    ClassHistogram sil_total;
    for (const auto& h : sil_hist) sil_total += h;
    const double sil_entropy = entropy_bits(sil_total);

    SweepSummary summary;
    summary.config_hash = cfg.hash();
    for (const auto& point : points) {
        PipelineConfig local = cfg;
        local.radius = point.radius;
        local.line_width = point.line_width;
        local.validate();

        std::vector<ClassHistogram> hist(sequences.size());
        DescriptorSet fused{std::string(to_string(cfg.strategy)), std::vector<std::vector<double>>(sequences.size())};
        parallel_for(sequences.size(), cfg.workers, [&](std::size_t i) {
            const auto samples = process_sequence(sequences[i], local, local.strategy);
            for (const auto& s : samples) hist[i].add(as_labels(s));
            fused.descriptors[i] = describe_sequence(samples, local.bands, local.stripes);
        });
        ClassHistogram total;
        for (const auto& h : hist) total += h;

        SweepRow row;
        row.point = point;
        row.entropy = entropy_bits(total);
        row.entropy_delta = row.entropy - sil_entropy;
        auto eval = evaluate_descriptors(manifest, std::span<const DescriptorSet>(&fused, 1), local, warn);
        for (auto& r : eval.rows) {
            if (r.representation != "sanity") row.eval.push_back(std::move(r));
        }
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

SweepSummary cmd_sweep(const PipelineConfig& cfg, std::span<const SweepPoint> points, const WarningSink& warn) {
    cfg.validate();
    const auto layout = layout_for(cfg);
    const auto manifest = load_manifest(layout);
    const auto sequences = load_dataset(layout, manifest, cfg.workers);
    auto summary = sweep_sequences(manifest, sequences, cfg, points, warn);
    write_sweep_report(layout.out(), summary);
    return summary;
}

BenchResult bench_sequences(std::span<const LoadedSequence> sequences, const PipelineConfig& cfg, int repeats) {
    cfg.validate();
    BenchResult r;
    const auto start = Clock::now();
    for (int rep = 0; rep < std::max(1, repeats); ++rep) {
        std::vector<std::size_t> counts(sequences.size());
        parallel_for(sequences.size(), cfg.workers, [&](std::size_t i) {
            counts[i] = process_sequence(sequences[i], cfg, cfg.strategy).size();
        });
        for (auto n : counts) r.frames += n;
    }
    r.seconds = seconds_since(start);
    return r;
}

BenchResult cmd_bench(const PipelineConfig& cfg, int repeats) {
    cfg.validate();
    const auto layout = layout_for(cfg);
    const auto manifest = load_manifest(layout);
    const auto sequences = load_dataset(layout, manifest, cfg.workers);
    return bench_sequences(sequences, cfg, repeats);
}

}  // namespace partskel
