#include "partskel/fusion.hpp"

#include <algorithm>
#include <string>

#include "partskel/error.hpp"

namespace partskel {

namespace {

void require_same_size(const LabelRaster& parsing, const SilhouetteMask& sil) {
    if (parsing.size() != sil.size()) {
        throw FusionError("parsing raster is " + std::to_string(parsing.height()) + "x" +
                          std::to_string(parsing.width()) + " but silhouette is " + std::to_string(sil.height()) +
                          "x" + std::to_string(sil.width()));
    }
}

// Source index for each destination index along one axis.
std::vector<int> nearest_indices(int src, int dst) {
    std::vector<int> idx(static_cast<std::size_t>(dst));
    for (int i = 0; i < dst; ++i) {
        idx[static_cast<std::size_t>(i)] =
            static_cast<int>((2 * static_cast<std::int64_t>(i) + 1) * src / (2 * static_cast<std::int64_t>(dst)));
    }
    return idx;
}

void require_target(Size target) {
    if (target.height < 1 || target.width < 1) throw ValidationError("resize target must be positive");
}

}  // namespace

std::string_view to_string(Strategy s) noexcept { return s == Strategy::Crf ? "crf" : "dcf"; }

Strategy parse_strategy(std::string_view name) {
    if (name == "crf") return Strategy::Crf;
    if (name == "dcf") return Strategy::Dcf;
    throw ValidationError("unknown fusion strategy '" + std::string(name) + "' (expected crf or dcf)");
}

LabelRaster fuse_crf(const LabelRaster& parsing, const SilhouetteMask& sil) {
    require_same_size(parsing, sil);
    LabelRaster out(parsing.size());
    const auto p = parsing.labels();
    const auto s = sil.values();
    auto o = out.labels();
    for (std::size_t i = 0; i < p.size(); ++i) {
        o[i] = p[i] != cls::kBackground ? p[i] : (s[i] != 0 ? cls::kSilhouette : cls::kBackground);
    }
    return out;
}

ChannelStack fuse_dcf(const LabelRaster& parsing, const SilhouetteMask& sil) {
    require_same_size(parsing, sil);
    ChannelStack out(kNumClasses, parsing.size());
    for (int y = 0; y < parsing.height(); ++y) {
        for (int x = 0; x < parsing.width(); ++x) {
            const ClassId c = parsing.at(x, y);
            const bool fg = sil.at(x, y);
            if (fg) out.at(cls::kSilhouette, x, y) = 1;
            if (c != cls::kBackground) {
                out.at(c, x, y) = 1;
            } else if (!fg) {
                out.at(cls::kBackground, x, y) = 1;
            }
        }
    }
    return out;
}

LabelRaster lift_silhouette(const SilhouetteMask& sil) {
    std::vector<ClassId> labels(sil.values().begin(), sil.values().end());
    return LabelRaster(sil.size(), std::move(labels));
}

LabelRaster collapse_dcf(const ChannelStack& stack) {
    if (stack.channels() != kNumClasses) {
        throw FusionError("DCF stack must have 13 channels, got " + std::to_string(stack.channels()));
    }
    LabelRaster out(stack.size());
    for (int y = 0; y < stack.height(); ++y) {
        for (int x = 0; x < stack.width(); ++x) {
            ClassId label = stack.at(cls::kSilhouette, x, y) ? cls::kSilhouette : cls::kBackground;
            for (int c = kNumClasses - 1; c >= cls::kHead; --c) {
                if (stack.at(c, x, y)) {
                    label = static_cast<ClassId>(c);
                    break;
                }
            }
            out.at(x, y) = label;
        }
    }
    return out;
}

LabelRaster resize_labels(const LabelRaster& src, Size target) {
    require_target(target);
    if (src.size() == target) return src;
    const auto xs = nearest_indices(src.width(), target.width);
    const auto ys = nearest_indices(src.height(), target.height);
    LabelRaster out(target);
    for (int y = 0; y < target.height; ++y) {
        const auto row = src.row(ys[static_cast<std::size_t>(y)]);
        for (int x = 0; x < target.width; ++x) out.at(x, y) = row[static_cast<std::size_t>(xs[static_cast<std::size_t>(x)])];
    }
    return out;
}

ChannelStack resize_labels(const ChannelStack& src, Size target) {
    require_target(target);
    if (src.size() == target) return src;
    const auto xs = nearest_indices(src.width(), target.width);
    const auto ys = nearest_indices(src.height(), target.height);
    ChannelStack out(src.channels(), target);
    for (int c = 0; c < src.channels(); ++c) {
        for (int y = 0; y < target.height; ++y) {
            for (int x = 0; x < target.width; ++x) {
                out.at(c, x, y) = src.at(c, xs[static_cast<std::size_t>(x)], ys[static_cast<std::size_t>(y)]);
            }
        }
    }
    return out;
}

SilhouetteMask resize_mask(const SilhouetteMask& src, Size target) {
    require_target(target);
    if (src.size() == target) return src;
    const auto xs = nearest_indices(src.width(), target.width);
    const auto ys = nearest_indices(src.height(), target.height);
    SilhouetteMask out(target);
    for (int y = 0; y < target.height; ++y) {
        for (int x = 0; x < target.width; ++x) {
            out.set(x, y, src.at(xs[static_cast<std::size_t>(x)], ys[static_cast<std::size_t>(y)]));
        }
    }
    return out;
}

Size FusedSample::size() const {
    return std::visit([](const auto& d) { return d.size(); }, data);
}

FusedSample fuse(const LabelRaster& parsing, const SilhouetteMask& sil, Strategy strategy, Size target) {
    require_same_size(parsing, sil);
    // Both fusions are per-pixel, so they commute with nearest-neighbour sampling;
    // sampling the inputs first gives the same result with less work.
    const LabelRaster p = resize_labels(parsing, target);
    const SilhouetteMask m = resize_mask(sil, target);
    if (strategy == Strategy::Crf) return {strategy, fuse_crf(p, m)};
    return {strategy, fuse_dcf(p, m)};
}

std::optional<Box> foreground_bounds(const SilhouetteMask& sil) {
    int x0 = sil.width();
    int y0 = sil.height();
    int x1 = -1;
    int y1 = -1;
    for (int y = 0; y < sil.height(); ++y) {
        for (int x = 0; x < sil.width(); ++x) {
            if (!sil.at(x, y)) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) return std::nullopt;
    return Box{static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1 - x0 + 1),
               static_cast<double>(y1 - y0 + 1)};
}

}  // namespace partskel
