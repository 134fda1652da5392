#include "partskel/image_io.hpp"

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

#include "partskel/error.hpp"

namespace partskel {

namespace {

// RAII over the libpng simplified-API control structure.
class PngImage {
public:
    PngImage() {
        std::memset(&image_, 0, sizeof(image_));
        image_.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image_); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;

    png_image* get() noexcept { return &image_; }
    png_image* operator->() noexcept { return &image_; }

private:
    png_image image_;
};

void write_png(const std::filesystem::path& path, Size size, png_uint_32 format, const void* pixels) {
    PngImage img;
    img->width = static_cast<png_uint_32>(size.width);
    img->height = static_cast<png_uint_32>(size.height);
    img->format = format;
    if (!png_image_write_to_file(img.get(), path.c_str(), 0, pixels, 0, nullptr)) {
        throw IoError("cannot write PNG " + path.string() + ": " + img->message);
    }
}

struct Decoded {
    Size size;
    png_uint_32 source_format = 0;
    std::vector<std::uint8_t> pixels;
};

Decoded read_png(const std::filesystem::path& path, png_uint_32 format) {
    PngImage img;
    if (!png_image_begin_read_from_file(img.get(), path.c_str())) {
        throw IoError("cannot read PNG " + path.string() + ": " + img->message);
    }
    Decoded out;
    out.source_format = img->format;
    out.size = {static_cast<int>(img->height), static_cast<int>(img->width)};
    img->format = format;
    out.pixels.resize(PNG_IMAGE_SIZE(*img.get()));
    if (!png_image_finish_read(img.get(), nullptr, out.pixels.data(), 0, nullptr)) {
        throw IoError("cannot decode PNG " + path.string() + ": " + img->message);
    }
    return out;
}

}  // namespace

void write_label_png(const std::filesystem::path& path, const LabelRaster& raster) {
    write_png(path, raster.size(), PNG_FORMAT_GRAY, raster.labels().data());
}

LabelRaster read_label_png(const std::filesystem::path& path) {
    auto decoded = read_png(path, PNG_FORMAT_GRAY);
    if (decoded.source_format != PNG_FORMAT_GRAY) {
        throw ValidationError("label PNG must be 8-bit single channel: " + path.string());
    }
    for (auto v : decoded.pixels) {
        if (v >= kNumClasses) {
            throw ValidationError("label PNG " + path.string() + " holds value " + std::to_string(v) +
                                  " outside 0..12");
        }
    }
    return LabelRaster(decoded.size, std::move(decoded.pixels));
}

void write_mask_png(const std::filesystem::path& path, const SilhouetteMask& mask) {
    std::vector<std::uint8_t> px(mask.values().begin(), mask.values().end());
    for (auto& v : px) v = v ? 255 : 0;
    write_png(path, mask.size(), PNG_FORMAT_GRAY, px.data());
}

SilhouetteMask read_mask_png(const std::filesystem::path& path) {
    auto decoded = read_png(path, PNG_FORMAT_GRAY);
    for (auto& v : decoded.pixels) v = v >= 128 ? 1 : 0;
    return SilhouetteMask(decoded.size, std::move(decoded.pixels));
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
    static_assert(sizeof(Rgb) == 3);
    write_png(path, image.size, PNG_FORMAT_RGB, image.pixels.data());
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
    auto decoded = read_png(path, PNG_FORMAT_RGB);
    RgbImage img{decoded.size, std::vector<Rgb>(decoded.size.area())};
    std::memcpy(img.pixels.data(), decoded.pixels.data(), decoded.pixels.size());
    return img;
}

}  // namespace partskel
