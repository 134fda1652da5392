#pragma once

/// \file config.hpp
/// \brief Pipeline configuration: a plain-text `key = value` file.
///
/// Recognised keys (unknown keys are rejected):
///
///     tau             confidence threshold in [0,1]              (0.3)
///     radius          head circle radius, pixels, >= 1           (10)
///     line_width      limb/torso line width, pixels, >= 1        (12)
///     head_joints     comma-separated joint names                (nose,l_eye,r_eye)
///     strategy        crf | dcf                                  (crf)
///     target_height   fused sample rows                          (64)
///     target_width    fused sample columns                       (44)
///     align           none | auto                                (none)
///     bands           feature bands over the fused rows          (64)
///     stripes         horizontal pooling stripes                 (16)
///     margin          triplet margin                             (0.2)
///     ce_weight       cross-entropy weight in the head objective (1.0)
///     triplet_weight  triplet weight in the head objective       (1.0)
///     train_epochs    embedding-head training epochs, 0 = none   (50)
///     learning_rate   embedding-head SGD step                    (0.05)
///     seed            run seed                                   (0)
///     workers         worker threads per command                 (1)
///     dataset         dataset root
///     output          output root (default <dataset>/out)

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "partskel/fusion.hpp"
#include "partskel/labels.hpp"
#include "partskel/renderer.hpp"

namespace partskel {

struct PipelineConfig {
    double tau = kDefaultTau;
    double radius = kDefaultRadius;
    double line_width = kDefaultLineWidth;
    std::vector<int> head_joints = {index(Joint::Nose), index(Joint::LeftEye), index(Joint::RightEye)};
    Strategy strategy = Strategy::Crf;
    Size target = kTargetSize;
    bool auto_align = false;
    int bands = 64;
    int stripes = 16;
    double margin = 0.2;
    double ce_weight = 1.0;
    double triplet_weight = 1.0;
    int train_epochs = 50;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    int workers = 1;
    std::filesystem::path dataset;
    std::filesystem::path output;

    /// Applies one key. Throws ConfigError for unknown keys or malformed values.
    void set(std::string_view key, std::string_view value);

    /// Cross-field checks (ranges, bands dividing the target height, stripes dividing bands).
    void validate() const;

    [[nodiscard]] std::string get(std::string_view key) const;
    static const std::vector<std::string>& keys();

    /// Every key that affects outputs, one `key = value` per line, in a fixed order.
    [[nodiscard]] std::string canonical() const;
    /// 16 hex digits of a 64-bit FNV-1a digest of canonical().
    [[nodiscard]] std::string hash() const;

    [[nodiscard]] RenderConfig render_config(Size canvas) const;
    [[nodiscard]] PartMapping part_mapping() const;
    [[nodiscard]] std::filesystem::path output_root() const;

    /// Parses a config file on top of the defaults.
    static PipelineConfig load(const std::filesystem::path& path);
    static PipelineConfig parse(std::string_view text, std::string_view source = "<config>");
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data) noexcept;

}  // namespace partskel
