#include "partskel/gaitlab.hpp"

#include <cmath>
#include <string>

#include "partskel/error.hpp"

namespace partskel {

namespace {

void check_values(const std::vector<double>& values, std::size_t expected) {
    if (values.size() != expected) throw ValidationError("tensor value count does not match its dims");
    for (double v : values) {
        if (!std::isfinite(v)) throw ValidationError("tensor values must be finite");
    }
}

}  // namespace

FeatureTensor::FeatureTensor(Dims dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
    if (dims.n < 1 || dims.c < 1 || dims.s < 1 || dims.h < 1 || dims.w < 1) {
        throw ValidationError("feature tensor dims must all be >= 1");
    }
    const std::size_t count = static_cast<std::size_t>(dims.n) * dims.c * dims.s * dims.h * dims.w;
    if (values_.empty()) values_.assign(count, 0.0);
    check_values(values_, count);
}

PooledTensor::PooledTensor(Dims dims, std::vector<double> values) : dims_(dims), values_(std::move(values)) {
    if (dims.n < 1 || dims.c < 1 || dims.h < 1 || dims.w < 1) {
        throw ValidationError("pooled tensor dims must all be >= 1");
    }
    const std::size_t count = static_cast<std::size_t>(dims.n) * dims.c * dims.h * dims.w;
    if (values_.empty()) values_.assign(count, 0.0);
    check_values(values_, count);
}

FeatureTensor extract_frame_features(std::span<const FusedSample> frames, int bands) {
    if (frames.empty()) throw FeatureError("cannot extract features from an empty sequence");
    const Strategy strategy = frames.front().strategy;
    const Size size = frames.front().size();
    if (bands < 1 || size.height % bands != 0) {
        throw FeatureError("bands (" + std::to_string(bands) + ") must divide the frame height (" +
                           std::to_string(size.height) + ")");
    }
    const int band_rows = size.height / bands;
    const double band_area = static_cast<double>(band_rows) * size.width;

    FeatureTensor f({1, kNumClasses, static_cast<int>(frames.size()), bands, 1});
    std::array<std::uint32_t, kNumClasses> counts{};
    for (std::size_t s = 0; s < frames.size(); ++s) {
        const auto& frame = frames[s];
        if (frame.strategy != strategy) throw FeatureError("sequence mixes fusion strategies");
        if (frame.size() != size) throw FeatureError("sequence mixes frame sizes");
        if (strategy == Strategy::Dcf && frame.dcf().channels() != kNumClasses) {
            throw FeatureError("DCF frames must have 13 channels");
        }
        for (int b = 0; b < bands; ++b) {
            counts.fill(0);
            for (int y = b * band_rows; y < (b + 1) * band_rows; ++y) {
                if (strategy == Strategy::Crf) {
                    for (ClassId c : frame.crf().row(y)) ++counts[c];
                } else {
                    const auto& stack = frame.dcf();
                    for (int c = 0; c < kNumClasses; ++c) {
                        for (int x = 0; x < size.width; ++x) counts[static_cast<std::size_t>(c)] += stack.at(c, x, y);
                    }
                }
            }
            for (int c = 0; c < kNumClasses; ++c) {
                f.at(0, c, static_cast<int>(s), b, 0) = counts[static_cast<std::size_t>(c)] / band_area;
            }
        }
    }
    return f;
}

std::vector<double> describe_sequence(std::span<const FusedSample> frames, int bands, int stripes) {
    const auto pooled = horizontal_pool(temporal_pool(extract_frame_features(frames, bands)), stripes);
    return flatten(pooled.front());
}

}  // namespace partskel
