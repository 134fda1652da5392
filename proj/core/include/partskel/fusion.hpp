#pragma once

/// \file fusion.hpp
/// \brief Combines a parsing skeleton with a silhouette into the network input.
///
/// CRF (composite) overlays skeleton classes on the silhouette in a single label
/// image. DCF (disentangled) keeps one binary channel per class: channel 0 is
/// "neither skeleton nor silhouette", channel 1 the silhouette, 2..12 the parts.

#include <optional>
#include <string_view>
#include <variant>

#include "partskel/labels.hpp"
#include "partskel/pose.hpp"

namespace partskel {

enum class Strategy : std::uint8_t { Crf, Dcf };

std::string_view to_string(Strategy s) noexcept;
/// Accepts "crf" / "dcf". Throws ValidationError otherwise.
Strategy parse_strategy(std::string_view name);

/// Skeleton class where the parsing is non-background, else 1 on silhouette, else 0.
LabelRaster fuse_crf(const LabelRaster& parsing, const SilhouetteMask& sil);

/// 13-channel indicator stack. Throws FusionError on a dimension mismatch.
ChannelStack fuse_dcf(const LabelRaster& parsing, const SilhouetteMask& sil);

/// Silhouette as a {0,1} label raster; the CRF of an empty skeleton.
LabelRaster lift_silhouette(const SilhouetteMask& sil);

/// Collapses a DCF stack by precedence: highest skeleton channel, then silhouette, then background.
LabelRaster collapse_dcf(const ChannelStack& stack);

/// Nearest-neighbour resampling with pixel-center mapping:
/// destination column x reads source column floor((x + 0.5) * src_w / dst_w).
LabelRaster resize_labels(const LabelRaster& src, Size target = kTargetSize);
ChannelStack resize_labels(const ChannelStack& src, Size target = kTargetSize);
SilhouetteMask resize_mask(const SilhouetteMask& src, Size target);

struct FusedSample {
    Strategy strategy = Strategy::Crf;
    std::variant<LabelRaster, ChannelStack> data;

    [[nodiscard]] Size size() const;
    [[nodiscard]] const LabelRaster& crf() const { return std::get<LabelRaster>(data); }
    [[nodiscard]] const ChannelStack& dcf() const { return std::get<ChannelStack>(data); }

    friend bool operator==(const FusedSample&, const FusedSample&) = default;
};

/// Fuses at native resolution, then resizes to `target`.
FusedSample fuse(const LabelRaster& parsing, const SilhouetteMask& sil, Strategy strategy,
                 Size target = kTargetSize);

/// Pixel extent of the foreground, [x, x + width) x [y, y + height). Empty for a blank mask.
std::optional<Box> foreground_bounds(const SilhouetteMask& sil);

}  // namespace partskel
