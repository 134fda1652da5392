#include "partskel/pose.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "partskel/error.hpp"

namespace partskel {

namespace {

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "nose",       "l_eye",      "r_eye",   "l_ear",   "r_ear",   "l_shoulder",
    "r_shoulder", "l_elbow",    "r_elbow", "l_wrist", "r_wrist", "l_hip",
    "r_hip",      "l_knee",     "r_knee",  "l_ankle", "r_ankle",
};

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc{} && ptr == last;
}

std::string where(const std::string& source, std::size_t line_no) {
    return source + ":" + std::to_string(line_no);
}

void append_double(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, ptr);
}

}  // namespace

std::string_view joint_name(int joint_id) {
    if (joint_id < 0 || joint_id >= kNumJoints) {
        throw SchemaError("joint id out of range: " + std::to_string(joint_id));
    }
    return kJointNames[static_cast<std::size_t>(joint_id)];
}

int joint_from_name(std::string_view name) {
    const auto it = std::find(kJointNames.begin(), kJointNames.end(), name);
    if (it == kJointNames.end()) {
        throw SchemaError("unknown joint name '" + std::string(name) + "'");
    }
    return static_cast<int>(it - kJointNames.begin());
}

void ValidityConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in [0,1]");
    if (width < 1 || height < 1) throw ValidationError("valid region must be at least 1x1");
}

bool is_valid(const Keypoint& kp, const ValidityConfig& cfg) noexcept {
    return kp.x >= 0.0 && kp.x < static_cast<double>(cfg.width) && kp.y >= 0.0 &&
           kp.y < static_cast<double>(cfg.height) && kp.confidence >= cfg.tau;
}

ValidPoints filter_valid(const KeypointFrame& frame, const ValidityConfig& cfg) {
    ValidPoints out;
    out.reserve(kNumJoints);
    for (int j = 0; j < kNumJoints; ++j) {
        const auto& kp = frame.joints[static_cast<std::size_t>(j)];
        if (is_valid(kp, cfg)) out.emplace_back(j, kp);
    }
    return out;
}

ValidPoints filter_valid(const ValidPoints& points, const ValidityConfig& cfg) {
    ValidPoints out;
    out.reserve(points.size());
    std::copy_if(points.begin(), points.end(), std::back_inserter(out),
                 [&](const ValidPoint& p) { return is_valid(p.second, cfg); });
    return out;
}

std::bitset<kNumJoints> validity_mask(const KeypointFrame& frame, const ValidityConfig& cfg) {
    std::bitset<kNumJoints> mask;
    for (int j = 0; j < kNumJoints; ++j) {
        mask.set(static_cast<std::size_t>(j), is_valid(frame.joints[static_cast<std::size_t>(j)], cfg));
    }
    return mask;
}

KeypointFrame align_keypoints(const KeypointFrame& frame, const Box& source, const Box& target) {
    if (!(source.width > 0.0 && source.height > 0.0)) {
        throw AlignmentError("degenerate source box (zero width or height)");
    }
    if (!(target.width > 0.0 && target.height > 0.0)) {
        throw AlignmentError("degenerate target box (zero width or height)");
    }
    const double sx = target.width / source.width;
    const double sy = target.height / source.height;
    KeypointFrame out = frame;
    for (auto& kp : out.joints) {
        kp.x = target.x + (kp.x - source.x) * sx;
        kp.y = target.y + (kp.y - source.y) * sy;
    }
    return out;
}

std::optional<Box> joint_bounds(const KeypointFrame& frame, double tau) {
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    double x1 = -x0;
    double y1 = -x0;
    bool any = false;
    for (const auto& kp : frame.joints) {
        if (kp.confidence < tau) continue;
        any = true;
        x0 = std::min(x0, kp.x);
        y0 = std::min(y0, kp.y);
        x1 = std::max(x1, kp.x);
        y1 = std::max(y1, kp.y);
    }
    if (!any) return std::nullopt;
    return Box{x0, y0, x1 - x0, y1 - y0};
}

KeypointSequence parse_keypoint_sequence(std::istream& in, std::string sequence_id,
                                         std::string_view source_name) {
    const std::string source = !source_name.empty() ? std::string(source_name)
                               : sequence_id.empty() ? std::string("<keypoints>")
                                                     : sequence_id;
    KeypointSequence seq;
    seq.sequence_id = std::move(sequence_id);

    std::string line;
    std::size_t line_no = 0;
    // header
    while (std::getline(in, line)) {
        ++line_no;
        if (!split_ws(line).empty()) break;
    }
    const auto header = split_ws(line);
    std::size_t expected = 0;
    if (header.size() != 3 || header[0] != "coco17" || header[1] != "v1" ||
        !parse_number(header[2], expected)) {
        throw ParseError(where(source, line_no) + ": expected header 'coco17 v1 <N>'");
    }
    if (expected < 1) throw SchemaError(where(source, line_no) + ": sequence must contain at least one frame");
    seq.frames.reserve(expected);

    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = split_ws(line);
        if (tokens.empty()) continue;
        const std::size_t record = seq.frames.size();
        if (record == expected) {
            throw ParseError(where(source, line_no) + ": more frame records than the header's " +
                             std::to_string(expected));
        }
        const std::size_t values = tokens.size() - 1;
        if (values % 3 != 0) {
            throw ParseError(where(source, line_no) + ": record " + std::to_string(record) +
                             " has " + std::to_string(values) + " values, not a multiple of 3");
        }
        if (values / 3 != static_cast<std::size_t>(kNumJoints)) {
            throw SchemaError(where(source, line_no) + ": record " + std::to_string(record) + " has " +
                              std::to_string(values / 3) + " joints, expected 17");
        }
        KeypointFrame frame;
        if (!parse_number(tokens[0], frame.frame_index) || frame.frame_index < 0) {
            throw ParseError(where(source, line_no) + ": bad frame index '" + std::string(tokens[0]) + "'");
        }
        if (!seq.frames.empty() && frame.frame_index <= seq.frames.back().frame_index) {
            throw SchemaError(where(source, line_no) + ": frame indices must be strictly increasing");
        }
        for (int j = 0; j < kNumJoints; ++j) {
            auto& kp = frame.joints[static_cast<std::size_t>(j)];
            const std::size_t base = 1 + 3 * static_cast<std::size_t>(j);
            if (!parse_number(tokens[base], kp.x) || !parse_number(tokens[base + 1], kp.y) ||
                !parse_number(tokens[base + 2], kp.confidence)) {
                throw ParseError(where(source, line_no) + ": record " + std::to_string(record) +
                                 ", joint " + std::string(joint_name(j)) + ": malformed number");
            }
            if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
                throw SchemaError(where(source, line_no) + ": joint " + std::string(joint_name(j)) +
                                  " has non-finite coordinates");
            }
            if (!(kp.confidence >= 0.0 && kp.confidence <= 1.0)) {
                throw SchemaError(where(source, line_no) + ": joint " + std::string(joint_name(j)) +
                                  " confidence outside [0,1]");
            }
        }
        seq.frames.push_back(frame);
    }
    if (seq.frames.size() != expected) {
        throw ParseError(source + ": header declares " + std::to_string(expected) + " frames, found " +
                         std::to_string(seq.frames.size()));
    }
    return seq;
}

KeypointSequence load_keypoint_sequence(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open keypoint file " + path.string());
    auto id = path.stem().string();
    if (id == "keypoints" && path.has_parent_path()) id = path.parent_path().filename().string();
    return parse_keypoint_sequence(in, std::move(id), path.string());
}

void write_keypoint_sequence(std::ostream& out, const KeypointSequence& seq) {
    if (seq.frames.empty()) throw SchemaError("cannot write an empty keypoint sequence");
    std::string buf = "coco17 v1 " + std::to_string(seq.frames.size()) + "\n";
    for (const auto& frame : seq.frames) {
        buf += std::to_string(frame.frame_index);
        for (const auto& kp : frame.joints) {
            buf += ' ';
            append_double(buf, kp.x);
            buf += ' ';
            append_double(buf, kp.y);
            buf += ' ';
            append_double(buf, kp.confidence);
        }
        buf += '\n';
    }
    out << buf;
}

void save_keypoint_sequence(const std::filesystem::path& path, const KeypointSequence& seq) {
    std::ostringstream ss;
    write_keypoint_sequence(ss, seq);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write keypoint file " + path.string());
    out << ss.str();
    if (!out) throw IoError("short write on " + path.string());
}

}  // namespace partskel
