#pragma once

/// \file analysis.hpp
/// \brief Pixel-class histograms and their Shannon entropy, in bits.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "partskel/labels.hpp"

namespace partskel {

struct ClassHistogram {
    std::array<std::uint64_t, kNumClasses> counts{};
    std::uint64_t total = 0;

    void add(const LabelRaster& raster);
    ClassHistogram& operator+=(const ClassHistogram& other);
    /// counts[k] / total; 0 for an empty histogram.
    [[nodiscard]] double share(int k) const;

    friend bool operator==(const ClassHistogram&, const ClassHistogram&) = default;
};

/// Throws AnalysisError for an empty collection.
ClassHistogram class_histogram(std::span<const LabelRaster> rasters);

/// -sum p_k log2 p_k over classes with non-zero count. Throws AnalysisError when total is 0.
double entropy_bits(const ClassHistogram& hist);

/// Entropy of one representation over a whole dataset.
struct StrategyEntropy {
    std::string strategy;  ///< "silhouette", "crf" or "dcf"
    std::size_t frames = 0;
    ClassHistogram histogram;
    double entropy = 0.0;
};

struct EntropyReport {
    std::string config_hash;
    Size target = kTargetSize;
    std::vector<StrategyEntropy> strategies;

    /// Entropy of `fused` minus entropy of "silhouette"; both must be present.
    [[nodiscard]] double delta(const std::string& fused) const;
    [[nodiscard]] const StrategyEntropy* find(const std::string& strategy) const;
};

/// Builds the entropy report for a dataset root laid out as written by the CLI.
///
/// "silhouette" reads the source masks (resized to `target`), "crf" reads fused
/// label PNGs and "dcf" collapses fused tensors by class precedence. Throws
/// ReportError naming the directory when there is no manifest, and listing every
/// absent output path when a requested strategy has not been produced.
EntropyReport entropy_report(const std::filesystem::path& dataset, std::span<const std::string> strategies,
                             Size target = kTargetSize, const std::string& config_hash = {},
                             const std::filesystem::path& out_root = {});

std::string format_entropy_text(const EntropyReport& report);
std::string format_entropy_json(const EntropyReport& report);

/// Writes entropy_report.txt and entropy_report.json into `dir`.
void write_entropy_report(const std::filesystem::path& dir, const EntropyReport& report);

}  // namespace partskel
