#include "partskel/renderer.hpp"

#include <set>
#include <string>

#include "partskel/error.hpp"

namespace partskel {

std::vector<Pixel> rasterize_circle(Point center, double radius, Size canvas) {
    std::vector<Pixel> out;
    detail::for_each_circle_pixel(center, radius, canvas, [&](int x, int y) { out.push_back({x, y}); });
    return out;
}

std::vector<Pixel> rasterize_segment(Point a, Point b, double width, Size canvas) {
    std::vector<Pixel> out;
    detail::for_each_capsule_pixel(a, b, width, canvas, [&](int x, int y) { out.push_back({x, y}); });
    return out;
}

std::bitset<kNumJoints> Part::required_joints() const {
    std::bitset<kNumJoints> req;
    auto mark = [&](const Anchor& a) {
        req.set(static_cast<std::size_t>(a.first));
        if (a.second >= 0) req.set(static_cast<std::size_t>(a.second));
    };
    for (const auto& s : strokes) {
        mark(s.from);
        if (kind == PartKind::Segment) mark(s.to);
    }
    return req;
}

PartMapping PartMapping::coco17(std::span<const int> head_joints) {
    using J = Joint;
    auto seg = [](Anchor a, Anchor b) { return Stroke{a, b}; };
    auto at = [](J j) { return Anchor::at(j); };

    PartMapping m;
    Part head{cls::kHead, PartKind::CircleSet, {}};
    if (head_joints.empty()) {
        for (J j : {J::Nose, J::LeftEye, J::RightEye}) head.strokes.push_back({at(j), at(j)});
    } else {
        for (int j : head_joints) {
            if (j < 0 || j >= kNumJoints) throw ValidationError("head joint id out of range: " + std::to_string(j));
            const Anchor a{static_cast<std::int8_t>(j), -1};
            head.strokes.push_back({a, a});
        }
    }

    m.parts.push_back({cls::kTorso, PartKind::Segment,
                       {seg(at(J::LeftShoulder), at(J::RightShoulder)), seg(at(J::LeftHip), at(J::RightHip)),
                        seg(at(J::LeftShoulder), at(J::LeftHip)), seg(at(J::RightShoulder), at(J::RightHip))}});
    m.parts.push_back(
        {cls::kNeck, PartKind::Segment, {seg(Anchor::midpoint(J::LeftShoulder, J::RightShoulder), at(J::Nose))}});
    m.parts.push_back({cls::kLeftThigh, PartKind::Segment, {seg(at(J::LeftHip), at(J::LeftKnee))}});
    m.parts.push_back({cls::kRightThigh, PartKind::Segment, {seg(at(J::RightHip), at(J::RightKnee))}});
    m.parts.push_back({cls::kLeftShin, PartKind::Segment, {seg(at(J::LeftKnee), at(J::LeftAnkle))}});
    m.parts.push_back({cls::kRightShin, PartKind::Segment, {seg(at(J::RightKnee), at(J::RightAnkle))}});
    m.parts.push_back({cls::kLeftUpperArm, PartKind::Segment, {seg(at(J::LeftShoulder), at(J::LeftElbow))}});
    m.parts.push_back({cls::kRightUpperArm, PartKind::Segment, {seg(at(J::RightShoulder), at(J::RightElbow))}});
    m.parts.push_back({cls::kLeftForearm, PartKind::Segment, {seg(at(J::LeftElbow), at(J::LeftWrist))}});
    m.parts.push_back({cls::kRightForearm, PartKind::Segment, {seg(at(J::RightElbow), at(J::RightWrist))}});
    m.parts.push_back(std::move(head));
    return m;
}

void PartMapping::validate() const {
    std::set<ClassId> seen;
    for (const auto& part : parts) {
        if (part.id < cls::kHead || part.id >= kNumClasses) {
            throw ValidationError("part class id must be in 2..12, got " + std::to_string(part.id));
        }
        if (!seen.insert(part.id).second) {
            throw ValidationError("part class " + std::string(class_name(part.id)) + " mapped twice");
        }
        if (part.strokes.empty()) throw ValidationError("part " + std::string(class_name(part.id)) + " has no strokes");
        for (const auto& s : part.strokes) {
            for (const Anchor& a : {s.from, s.to}) {
                if (a.first < 0 || a.first >= kNumJoints || a.second >= kNumJoints) {
                    throw ValidationError("part " + std::string(class_name(part.id)) + " references a bad joint id");
                }
            }
        }
    }
    if (seen.size() != kNumClasses - 2) throw ValidationError("mapping must cover all 11 skeleton classes");
}

int z_rank(ClassId id) {
    switch (id) {
        case cls::kTorso: return 0;
        case cls::kNeck: return 1;
        case cls::kLeftThigh:
        case cls::kRightThigh: return 2;
        case cls::kLeftShin:
        case cls::kRightShin: return 3;
        case cls::kLeftUpperArm:
        case cls::kRightUpperArm: return 4;
        case cls::kLeftForearm:
        case cls::kRightForearm: return 5;
        case cls::kHead: return 6;
        default: throw ValidationError("class " + std::to_string(id) + " is not a skeleton part");
    }
}

void RenderConfig::validate() const {
    if (!(radius >= 1.0) || !std::isfinite(radius)) throw ValidationError("radius must be >= 1");
    if (!(line_width >= 1.0) || !std::isfinite(line_width)) throw ValidationError("line_width must be >= 1");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in [0,1]");
    if (canvas.height < 1 || canvas.width < 1) throw ValidationError("canvas must be positive");
}

namespace {

Point anchor_point(const KeypointFrame& frame, const Anchor& a) {
    const auto& p = frame.joints[static_cast<std::size_t>(a.first)];
    if (a.second < 0) return {p.x, p.y};
    const auto& q = frame.joints[static_cast<std::size_t>(a.second)];
    return {(p.x + q.x) / 2.0, (p.y + q.y) / 2.0};
}

}  // namespace

void render_parsing_skeleton(const KeypointFrame& frame, const PartMapping& mapping, const RenderConfig& cfg,
                             LabelRaster& out) {
    if (out.size() != cfg.canvas) out = LabelRaster(cfg.canvas);
    std::fill(out.labels().begin(), out.labels().end(), cls::kBackground);

    const auto valid = validity_mask(frame, ValidityConfig{cfg.tau, cfg.canvas.width, cfg.canvas.height});
    if (valid.none()) return;

    std::vector<const Part*> order;
    order.reserve(mapping.parts.size());
    for (const auto& part : mapping.parts) {
        if ((part.required_joints() & ~valid).none()) order.push_back(&part);
    }
    std::sort(order.begin(), order.end(), [](const Part* a, const Part* b) {
        const int ra = z_rank(a->id);
        const int rb = z_rank(b->id);
        return ra != rb ? ra < rb : a->id < b->id;
    });

    for (const Part* part : order) {
        const ClassId id = part->id;
        auto paint = [&out, id](int x, int y) { out.at(x, y) = id; };
        for (const auto& s : part->strokes) {
            const Point a = anchor_point(frame, s.from);
            if (part->kind == PartKind::CircleSet) {
                detail::for_each_circle_pixel(a, cfg.radius, cfg.canvas, paint);
            } else {
                detail::for_each_capsule_pixel(a, anchor_point(frame, s.to), cfg.line_width, cfg.canvas, paint);
            }
        }
    }
}

LabelRaster render_parsing_skeleton(const KeypointFrame& frame, const PartMapping& mapping,
                                    const RenderConfig& cfg) {
    cfg.validate();
    LabelRaster out(cfg.canvas);
    render_parsing_skeleton(frame, mapping, cfg, out);
    return out;
}

const Palette& default_palette() {
    static const Palette palette = {{
        {0, 0, 0},        // background
        {128, 128, 128},  // silhouette
        {255, 0, 0},      // head
        {255, 170, 0},    // torso
        {255, 255, 0},    // neck
        {0, 255, 0},      // l_upper_arm
        {0, 255, 170},    // r_upper_arm
        {0, 170, 255},    // l_forearm
        {0, 0, 255},      // r_forearm
        {170, 0, 255},    // l_thigh
        {255, 0, 255},    // r_thigh
        {128, 64, 0},     // l_shin
        {0, 128, 128},    // r_shin
    }};
    return palette;
}

void validate_palette(std::span<const Rgb> palette) {
    if (palette.size() != static_cast<std::size_t>(kNumClasses)) {
        throw ValidationError("palette must have exactly 13 entries, got " + std::to_string(palette.size()));
    }
    if (palette[0] != Rgb{0, 0, 0}) throw ValidationError("palette entry 0 (background) must be black");
    std::set<Rgb> distinct(palette.begin(), palette.end());
    if (distinct.size() != palette.size()) throw ValidationError("palette entries must be distinct");
}

RgbImage colorize(const LabelRaster& raster, std::span<const Rgb> palette) {
    validate_palette(palette);
    RgbImage img{raster.size(), {}};
    img.pixels.reserve(raster.size().area());
    for (ClassId c : raster.labels()) img.pixels.push_back(palette[c]);
    return img;
}

LabelRaster decolorize(const RgbImage& image, std::span<const Rgb> palette) {
    validate_palette(palette);
    std::vector<ClassId> labels;
    labels.reserve(image.pixels.size());
    for (const Rgb& px : image.pixels) {
        const auto it = std::find(palette.begin(), palette.end(), px);
        if (it == palette.end()) throw ValidationError("color not in palette");
        labels.push_back(static_cast<ClassId>(it - palette.begin()));
    }
    return LabelRaster(image.size, std::move(labels));
}

}  // namespace partskel
