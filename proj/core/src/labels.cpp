#include "partskel/labels.hpp"

#include <algorithm>
#include <string>

#include "partskel/error.hpp"

namespace partskel {

namespace {

constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "background", "silhouette", "head",     "torso",   "neck",    "l_upper_arm", "r_upper_arm",
    "l_forearm",  "r_forearm",  "l_thigh", "r_thigh", "l_shin",  "r_shin",
};

void require_positive(Size size, const char* what) {
    if (size.height < 1 || size.width < 1) {
        throw ValidationError(std::string(what) + " dimensions must be positive, got " +
                              std::to_string(size.height) + "x" + std::to_string(size.width));
    }
}

}  // namespace

std::string_view class_name(ClassId id) {
    if (id >= kNumClasses) throw ValidationError("class id out of range: " + std::to_string(id));
    return kClassNames[id];
}

LabelRaster::LabelRaster(Size size, ClassId fill) : size_(size) {
    require_positive(size, "label raster");
    if (fill >= kNumClasses) throw ValidationError("class id out of range: " + std::to_string(fill));
    labels_.assign(size.area(), fill);
}

LabelRaster::LabelRaster(Size size, std::vector<ClassId> labels) : size_(size), labels_(std::move(labels)) {
    require_positive(size, "label raster");
    if (labels_.size() != size.area()) throw ValidationError("label count does not match raster dimensions");
    if (std::any_of(labels_.begin(), labels_.end(), [](ClassId c) { return c >= kNumClasses; })) {
        throw ValidationError("label raster contains a class id outside 0..12");
    }
}

SilhouetteMask::SilhouetteMask(Size size) : size_(size) {
    require_positive(size, "silhouette");
    mask_.assign(size.area(), 0);
}

SilhouetteMask::SilhouetteMask(Size size, std::vector<std::uint8_t> mask) : size_(size), mask_(std::move(mask)) {
    require_positive(size, "silhouette");
    if (mask_.size() != size.area()) throw ValidationError("mask size does not match silhouette dimensions");
    if (std::any_of(mask_.begin(), mask_.end(), [](std::uint8_t v) { return v > 1; })) {
        throw ValidationError("silhouette mask values must be 0 or 1");
    }
}

ChannelStack::ChannelStack(int channels, Size size) : channels_(channels), size_(size) {
    require_positive(size, "channel stack");
    if (channels < 1) throw ValidationError("channel stack needs at least one channel");
    data_.assign(static_cast<std::size_t>(channels) * size.area(), 0);
}

ChannelStack::ChannelStack(int channels, Size size, std::vector<std::uint8_t> data)
    : channels_(channels), size_(size), data_(std::move(data)) {
    require_positive(size, "channel stack");
    if (channels < 1) throw ValidationError("channel stack needs at least one channel");
    if (data_.size() != static_cast<std::size_t>(channels) * size.area()) {
        throw ValidationError("channel stack payload does not match its dimensions");
    }
    if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; })) {
        throw ValidationError("channel stack values must be binary");
    }
}

}  // namespace partskel
