#pragma once

/// \file labels.hpp
/// \brief Part-class ids and the raster containers shared by rendering, fusion and analysis.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace partskel {

using ClassId = std::uint8_t;

/// Canonical class ids. 0 and 1 are background and silhouette; 2..12 are skeleton parts.
namespace cls {
inline constexpr ClassId kBackground = 0;
inline constexpr ClassId kSilhouette = 1;
inline constexpr ClassId kHead = 2;
inline constexpr ClassId kTorso = 3;
inline constexpr ClassId kNeck = 4;
inline constexpr ClassId kLeftUpperArm = 5;
inline constexpr ClassId kRightUpperArm = 6;
inline constexpr ClassId kLeftForearm = 7;
inline constexpr ClassId kRightForearm = 8;
inline constexpr ClassId kLeftThigh = 9;
inline constexpr ClassId kRightThigh = 10;
inline constexpr ClassId kLeftShin = 11;
inline constexpr ClassId kRightShin = 12;
}  // namespace cls

inline constexpr int kNumClasses = 13;

std::string_view class_name(ClassId id);

struct Size {
    int height = 0;
    int width = 0;

    [[nodiscard]] std::size_t area() const noexcept {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    friend bool operator==(const Size&, const Size&) = default;
};

/// Network input size (rows x cols).
inline constexpr Size kTargetSize{64, 44};

/// H x W grid of class ids, row-major.
class LabelRaster {
public:
    LabelRaster() = default;
    /// Throws ValidationError unless both dimensions are positive.
    explicit LabelRaster(Size size, ClassId fill = cls::kBackground);
    LabelRaster(Size size, std::vector<ClassId> labels);

    [[nodiscard]] int width() const noexcept { return size_.width; }
    [[nodiscard]] int height() const noexcept { return size_.height; }
    [[nodiscard]] Size size() const noexcept { return size_; }

    ClassId& at(int x, int y) noexcept { return labels_[index(x, y)]; }
    [[nodiscard]] ClassId at(int x, int y) const noexcept { return labels_[index(x, y)]; }

    [[nodiscard]] std::span<const ClassId> labels() const noexcept { return labels_; }
    [[nodiscard]] std::span<ClassId> labels() noexcept { return labels_; }
    [[nodiscard]] std::span<const ClassId> row(int y) const noexcept {
        return std::span<const ClassId>(labels_).subspan(index(0, y), static_cast<std::size_t>(size_.width));
    }

    friend bool operator==(const LabelRaster&, const LabelRaster&) = default;

private:
    [[nodiscard]] std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(size_.width) +
               static_cast<std::size_t>(x);
    }

    Size size_{};
    std::vector<ClassId> labels_;
};

/// Binary foreground mask (0 background, 1 foreground).
class SilhouetteMask {
public:
    SilhouetteMask() = default;
    explicit SilhouetteMask(Size size);
    /// Values must be 0 or 1.
    SilhouetteMask(Size size, std::vector<std::uint8_t> mask);

    [[nodiscard]] int width() const noexcept { return size_.width; }
    [[nodiscard]] int height() const noexcept { return size_.height; }
    [[nodiscard]] Size size() const noexcept { return size_; }

    [[nodiscard]] bool at(int x, int y) const noexcept { return mask_[index(x, y)] != 0; }
    void set(int x, int y, bool on) noexcept { mask_[index(x, y)] = on ? 1 : 0; }

    [[nodiscard]] std::span<const std::uint8_t> values() const noexcept { return mask_; }

    friend bool operator==(const SilhouetteMask&, const SilhouetteMask&) = default;

private:
    [[nodiscard]] std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(size_.width) +
               static_cast<std::size_t>(x);
    }

    Size size_{};
    std::vector<std::uint8_t> mask_;
};

/// C x H x W stack of binary planes, channel-major.
class ChannelStack {
public:
    ChannelStack() = default;
    ChannelStack(int channels, Size size);
    ChannelStack(int channels, Size size, std::vector<std::uint8_t> data);

    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] int width() const noexcept { return size_.width; }
    [[nodiscard]] int height() const noexcept { return size_.height; }
    [[nodiscard]] Size size() const noexcept { return size_; }

    std::uint8_t& at(int c, int x, int y) noexcept { return data_[index(c, x, y)]; }
    [[nodiscard]] std::uint8_t at(int c, int x, int y) const noexcept { return data_[index(c, x, y)]; }

    [[nodiscard]] std::span<const std::uint8_t> data() const noexcept { return data_; }
    [[nodiscard]] std::span<const std::uint8_t> plane(int c) const noexcept {
        return std::span<const std::uint8_t>(data_).subspan(
            static_cast<std::size_t>(c) * size_.area(), size_.area());
    }

    friend bool operator==(const ChannelStack&, const ChannelStack&) = default;

private:
    [[nodiscard]] std::size_t index(int c, int x, int y) const noexcept {
        return (static_cast<std::size_t>(c) * static_cast<std::size_t>(size_.height) +
                static_cast<std::size_t>(y)) *
                   static_cast<std::size_t>(size_.width) +
               static_cast<std::size_t>(x);
    }

    int channels_ = 0;
    Size size_{};
    std::vector<std::uint8_t> data_;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
    friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

struct RgbImage {
    Size size{};
    std::vector<Rgb> pixels;  // row-major

    [[nodiscard]] Rgb at(int x, int y) const noexcept {
        return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(size.width) +
                      static_cast<std::size_t>(x)];
    }
    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

}  // namespace partskel
