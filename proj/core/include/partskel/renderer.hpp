#pragma once

/// \file renderer.hpp
/// \brief Rasterizes COCO17 keypoints into a part-labeled parsing skeleton.
///
/// Geometry is evaluated at pixel centers: pixel (px, py) covers the point
/// (px + 0.5, py + 0.5). A circle of radius r contains every pixel whose center
/// is within r of the circle center; a segment of width w contains every pixel
/// whose center is within w/2 of the closed segment (a capsule with round caps).

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "partskel/labels.hpp"
#include "partskel/pose.hpp"

namespace partskel {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Pixel {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel& a, const Pixel& b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

namespace detail {

struct Span1D {
    int lo = 0;
    int hi = -1;  // inclusive; empty when hi < lo
};

// Pixel index range whose centers can fall inside [center - extent, center + extent].
inline Span1D candidate_range(double lo_edge, double hi_edge, int limit) noexcept {
    if (!(lo_edge <= hi_edge)) return {};  // also rejects NaN
    const double lo = std::max(0.0, std::floor(lo_edge - 0.5));
    const double hi = std::min(static_cast<double>(limit - 1), std::ceil(hi_edge - 0.5));
    if (lo > hi) return {};
    return {static_cast<int>(lo), static_cast<int>(hi)};
}

/// Calls fn(px, py) for every in-canvas pixel whose center lies within radius of center.
template <typename Fn>
void for_each_circle_pixel(Point center, double radius, Size canvas, Fn&& fn) {
    if (!(radius > 0.0) || !std::isfinite(center.x) || !std::isfinite(center.y)) return;
    const double r2 = radius * radius;
    const auto ys = candidate_range(center.y - radius, center.y + radius, canvas.height);
    const auto xs = candidate_range(center.x - radius, center.x + radius, canvas.width);
    for (int py = ys.lo; py <= ys.hi; ++py) {
        const double dy = (py + 0.5) - center.y;
        for (int px = xs.lo; px <= xs.hi; ++px) {
            const double dx = (px + 0.5) - center.x;
            if (dx * dx + dy * dy <= r2) fn(px, py);
        }
    }
}

/// Squared distance from p to the closed segment ab.
inline double segment_distance2(Point p, Point a, Point b) noexcept {
    const double abx = b.x - a.x;
    const double aby = b.y - a.y;
    const double apx = p.x - a.x;
    const double apy = p.y - a.y;
    const double len2 = abx * abx + aby * aby;
    if (len2 == 0.0) return apx * apx + apy * apy;
    const double t = std::clamp((apx * abx + apy * aby) / len2, 0.0, 1.0);
    const double qx = apx - t * abx;
    const double qy = apy - t * aby;
    return qx * qx + qy * qy;
}

/// Calls fn(px, py) for every in-canvas pixel whose center lies within width/2 of segment ab.
template <typename Fn>
void for_each_capsule_pixel(Point a, Point b, double width, Size canvas, Fn&& fn) {
    if (!(width > 0.0) || !std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(b.x) ||
        !std::isfinite(b.y)) {
        return;
    }
    const double half = width / 2.0;
    const double h2 = half * half;
    const auto ys = candidate_range(std::min(a.y, b.y) - half, std::max(a.y, b.y) + half, canvas.height);
    const auto xs = candidate_range(std::min(a.x, b.x) - half, std::max(a.x, b.x) + half, canvas.width);
    for (int py = ys.lo; py <= ys.hi; ++py) {
        for (int px = xs.lo; px <= xs.hi; ++px) {
            if (segment_distance2({px + 0.5, py + 0.5}, a, b) <= h2) fn(px, py);
        }
    }
}

}  // namespace detail

/// In-canvas pixels of a filled circle, in row-major order. Non-positive radius yields nothing.
std::vector<Pixel> rasterize_circle(Point center, double radius, Size canvas);

/// In-canvas pixels of a capsule of the given width around segment ab, row-major.
/// When a == b this is exactly rasterize_circle(a, width / 2).
std::vector<Pixel> rasterize_segment(Point a, Point b, double width, Size canvas);

enum class PartKind : std::uint8_t { CircleSet, Segment };

/// A joint, or the midpoint of two joints when `second` is set.
struct Anchor {
    std::int8_t first = 0;
    std::int8_t second = -1;

    static constexpr Anchor at(Joint j) noexcept { return {static_cast<std::int8_t>(index(j)), -1}; }
    static constexpr Anchor midpoint(Joint a, Joint b) noexcept {
        return {static_cast<std::int8_t>(index(a)), static_cast<std::int8_t>(index(b))};
    }
    friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// One primitive: a circle at `from` (CircleSet parts) or a segment from -> to.
struct Stroke {
    Anchor from;
    Anchor to;
    friend bool operator==(const Stroke&, const Stroke&) = default;
};

struct Part {
    ClassId id = cls::kBackground;
    PartKind kind = PartKind::Segment;
    std::vector<Stroke> strokes;

    /// Every joint the part's geometry touches. All must be valid for the part to be drawn.
    [[nodiscard]] std::bitset<kNumJoints> required_joints() const;
    friend bool operator==(const Part&, const Part&) = default;
};

/// Joint -> body-part mapping.
struct PartMapping {
    std::vector<Part> parts;

    /// Default COCO17 decomposition into the 11 skeleton classes. `head_joints`
    /// selects the head circle centers (nose and both eyes unless overridden).
    static PartMapping coco17(std::span<const int> head_joints = {});

    /// Throws ValidationError unless each skeleton class 2..12 appears exactly once
    /// and every referenced joint exists.
    void validate() const;
};

/// Drawing precedence: torso < neck < thighs < shins < upper arms < forearms < head.
/// Parts sharing a rank resolve overlaps in favor of the larger class id.
int z_rank(ClassId id);

inline constexpr double kDefaultRadius = 10.0;
inline constexpr double kDefaultLineWidth = 12.0;

struct RenderConfig {
    double radius = kDefaultRadius;
    double line_width = kDefaultLineWidth;
    double tau = kDefaultTau;
    Size canvas{128, 88};

    void validate() const;
};

/// Renders one frame. Parts are skipped entirely unless all their joints pass
/// filter_valid on the canvas; output does not depend on the order of `mapping.parts`.
LabelRaster render_parsing_skeleton(const KeypointFrame& frame, const PartMapping& mapping,
                                    const RenderConfig& cfg);

/// Same as above, drawing into an existing raster which is reset to background first.
void render_parsing_skeleton(const KeypointFrame& frame, const PartMapping& mapping, const RenderConfig& cfg,
                             LabelRaster& out);

using Palette = std::array<Rgb, kNumClasses>;

/// Fixed preview palette. Entry k colors class k; entry 0 is black.
const Palette& default_palette();

/// Requires exactly 13 entries, entry 0 black and all entries distinct.
void validate_palette(std::span<const Rgb> palette);

RgbImage colorize(const LabelRaster& raster, std::span<const Rgb> palette);

/// Inverts a palette lookup. Throws ValidationError on a color not in the palette.
LabelRaster decolorize(const RgbImage& image, std::span<const Rgb> palette);

}  // namespace partskel
