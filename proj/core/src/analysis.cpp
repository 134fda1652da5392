#include "partskel/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "partskel/dataset.hpp"
#include "partskel/error.hpp"
#include "partskel/fusion.hpp"
#include "partskel/image_io.hpp"
#include "partskel/pose.hpp"
#include "partskel/tensor_io.hpp"

namespace partskel {

void ClassHistogram::add(const LabelRaster& raster) {
    for (ClassId v : raster.labels()) ++counts[v];
    total += raster.labels().size();
}

ClassHistogram& ClassHistogram::operator+=(const ClassHistogram& other) {
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
    total += other.total;
    return *this;
}

double ClassHistogram::share(int k) const {
    if (total == 0 || k < 0 || k >= kNumClasses) return 0.0;
    return static_cast<double>(counts[static_cast<std::size_t>(k)]) / static_cast<double>(total);
}

ClassHistogram class_histogram(std::span<const LabelRaster> rasters) {
    if (rasters.empty()) throw AnalysisError("cannot build a class histogram from an empty dataset");
    ClassHistogram h;
    for (const auto& r : rasters) h.add(r);
    return h;
}

double entropy_bits(const ClassHistogram& hist) {
    if (hist.total == 0) throw AnalysisError("entropy of an empty histogram is undefined");
    double e = 0.0;
    for (std::uint64_t c : hist.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(hist.total);
        e -= p * std::log2(p);
    }
    return e;
}

const StrategyEntropy* EntropyReport::find(const std::string& strategy) const {
    for (const auto& s : strategies) {
        if (s.strategy == strategy) return &s;
    }
    return nullptr;
}

double EntropyReport::delta(const std::string& fused) const {
    const auto* base = find("silhouette");
    const auto* other = find(fused);
    if (base == nullptr || other == nullptr) {
        throw ReportError("entropy delta needs both 'silhouette' and '" + fused + "' in the report");
    }
    return other->entropy - base->entropy;
}

namespace {

std::vector<std::int64_t> frame_indices(const DatasetLayout& layout, const ManifestEntry& e) {
    const auto seq = load_keypoint_sequence(layout.keypoints_path(e));
    std::vector<std::int64_t> out;
    out.reserve(seq.frames.size());
    for (const auto& f : seq.frames) out.push_back(f.frame_index);
    return out;
}

}  // namespace

EntropyReport entropy_report(const std::filesystem::path& dataset, std::span<const std::string> strategies,
                             Size target, const std::string& config_hash, const std::filesystem::path& out_root) {
    namespace fs = std::filesystem;
    const DatasetLayout layout(dataset, out_root);
    if (!fs::exists(layout.manifest_path())) {
        throw ReportError("no manifest in dataset directory " + dataset.string());
    }
    const Manifest manifest = Manifest::load(dataset);
    if (manifest.sequences.empty()) throw ReportError("manifest in " + dataset.string() + " lists no sequences");

    std::vector<std::pair<const ManifestEntry*, std::vector<std::int64_t>>> frames;
    for (const auto& e : manifest.sequences) frames.emplace_back(&e, frame_indices(layout, e));

    EntropyReport report;
    report.config_hash = config_hash;
    report.target = target;
    for (const auto& name : strategies) {
        if (name != "silhouette" && name != "crf" && name != "dcf") {
            throw ReportError("unknown entropy representation '" + name + "' (expected silhouette, crf or dcf)");
        }
        std::vector<fs::path> missing;
        if (name != "silhouette") {
            const Strategy s = parse_strategy(name);
            for (const auto& [e, idx] : frames) {
                for (auto f : idx) {
                    const auto p = layout.fused_path(e->sequence_id, s, f);
                    if (!fs::exists(p)) missing.push_back(p);
                }
            }
        }
        if (!missing.empty()) {
            std::string msg = "missing " + name + " outputs (run fuse first):";
            for (const auto& p : missing) msg += "\n  " + p.string();
            throw ReportError(msg);
        }

        StrategyEntropy se;
        se.strategy = name;
        for (const auto& [e, idx] : frames) {
            for (auto f : idx) {
                LabelRaster r;
                if (name == "silhouette") {
                    r = lift_silhouette(resize_mask(read_mask_png(layout.silhouette_path(*e, f)), target));
                } else if (name == "crf") {
                    r = read_label_png(layout.fused_path(e->sequence_id, Strategy::Crf, f));
                } else {
                    r = collapse_dcf(to_channel_stack(read_tensor(layout.fused_path(e->sequence_id, Strategy::Dcf, f))));
                }
                if (r.size() != target) {
                    throw ReportError("fused output for " + e->sequence_id + " frame " + std::to_string(f) +
                                      " does not match the target size");
                }
                se.histogram.add(r);
                ++se.frames;
            }
        }
        if (se.frames == 0) throw ReportError("dataset " + dataset.string() + " has no frames");
        se.entropy = entropy_bits(se.histogram);
        report.strategies.push_back(std::move(se));
    }
    return report;
}

std::string format_entropy_text(const EntropyReport& report) {
    std::ostringstream out;
    out << "entropy report (bits)\n";
    if (!report.config_hash.empty()) out << "config " << report.config_hash << "\n";
    out << "target " << report.target.height << "x" << report.target.width << "\n";
    char line[128];
    for (const auto& s : report.strategies) {
        std::snprintf(line, sizeof(line), "%-10s frames %6zu  H = %.6f\n", s.strategy.c_str(), s.frames, s.entropy);
        out << line << "  shares";
        for (int k = 0; k < kNumClasses; ++k) {
            std::snprintf(line, sizeof(line), " %s=%.4f", std::string(class_name(static_cast<ClassId>(k))).c_str(),
                          s.histogram.share(k));
            out << line;
        }
        out << "\n";
    }
    if (report.find("silhouette") != nullptr) {
        for (const auto& s : report.strategies) {
            if (s.strategy == "silhouette") continue;
            std::snprintf(line, sizeof(line), "delta %s - silhouette = %+.6f\n", s.strategy.c_str(),
                          report.delta(s.strategy));
            out << line;
        }
    }
    return out.str();
}

std::string format_entropy_json(const EntropyReport& report) {
    nlohmann::ordered_json j;
    j["config_hash"] = report.config_hash;
    j["target"] = {report.target.height, report.target.width};
    auto& arr = j["strategies"] = nlohmann::ordered_json::array();
    for (const auto& s : report.strategies) {
        nlohmann::ordered_json e;
        e["strategy"] = s.strategy;
        e["frames"] = s.frames;
        e["entropy_bits"] = s.entropy;
        e["class_counts"] = s.histogram.counts;
        auto& shares = e["class_shares"] = nlohmann::ordered_json::array();
        for (int k = 0; k < kNumClasses; ++k) shares.push_back(s.histogram.share(k));
        arr.push_back(std::move(e));
    }
    if (report.find("silhouette") != nullptr) {
        auto& d = j["delta"] = nlohmann::ordered_json::object();
        for (const auto& s : report.strategies) {
            if (s.strategy != "silhouette") d[s.strategy] = report.delta(s.strategy);
        }
    }
    return j.dump(2) + "\n";
}

void write_entropy_report(const std::filesystem::path& dir, const EntropyReport& report) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, body] : {std::pair{"entropy_report.txt", format_entropy_text(report)},
                                     std::pair{"entropy_report.json", format_entropy_json(report)}}) {
        std::ofstream out(dir / name, std::ios::binary);
        out << body;
        if (!out) throw IoError("cannot write " + (dir / name).string());
    }
}

}  // namespace partskel
