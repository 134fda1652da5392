#pragma once

/// \file image_io.hpp
/// \brief PNG persistence for label rasters, silhouettes and colorized previews.

#include <filesystem>

#include "partskel/labels.hpp"

namespace partskel {

/// 8-bit single-channel PNG, pixel value = class id.
void write_label_png(const std::filesystem::path& path, const LabelRaster& raster);
/// Requires an 8-bit grayscale PNG with values 0..12.
LabelRaster read_label_png(const std::filesystem::path& path);

/// 8-bit grayscale PNG, foreground 255.
void write_mask_png(const std::filesystem::path& path, const SilhouetteMask& mask);
/// Any PNG; converted to 8-bit gray and thresholded at 128.
SilhouetteMask read_mask_png(const std::filesystem::path& path);

/// 24-bit RGB PNG.
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_rgb_png(const std::filesystem::path& path);

}  // namespace partskel
