#pragma once

/// \file pose.hpp
/// \brief COCO17 keypoint sequences: loading, validity filtering and alignment.

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace partskel {

inline constexpr int kNumJoints = 17;

/// COCO17 joint order.
enum class Joint : std::uint8_t {
    Nose = 0,
    LeftEye,
    RightEye,
    LeftEar,
    RightEar,
    LeftShoulder,
    RightShoulder,
    LeftElbow,
    RightElbow,
    LeftWrist,
    RightWrist,
    LeftHip,
    RightHip,
    LeftKnee,
    RightKnee,
    LeftAnkle,
    RightAnkle,
};

constexpr int index(Joint j) noexcept { return static_cast<int>(j); }

/// Short snake_case name (`nose`, `l_eye`, ...). Throws SchemaError on a bad id.
std::string_view joint_name(int joint_id);
/// Inverse of joint_name. Throws SchemaError for unknown names.
int joint_from_name(std::string_view name);

struct Keypoint {
    double x = 0.0;  ///< pixels
    double y = 0.0;  ///< pixels
    double confidence = 0.0;

    friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct KeypointFrame {
    std::array<Keypoint, kNumJoints> joints{};
    std::int64_t frame_index = 0;

    friend bool operator==(const KeypointFrame&, const KeypointFrame&) = default;
};

struct KeypointSequence {
    std::string sequence_id;
    std::vector<KeypointFrame> frames;

    friend bool operator==(const KeypointSequence&, const KeypointSequence&) = default;
};

inline constexpr double kDefaultTau = 0.3;

/// Confidence threshold plus the W x H region a point must fall in.
struct ValidityConfig {
    double tau = kDefaultTau;
    int width = 1;
    int height = 1;

    void validate() const;
};

using ValidPoint = std::pair<int, Keypoint>;
using ValidPoints = std::vector<ValidPoint>;

/// True iff 0 <= x < W, 0 <= y < H and confidence >= tau.
bool is_valid(const Keypoint& kp, const ValidityConfig& cfg) noexcept;

/// Joints passing `is_valid`, ordered by joint id.
ValidPoints filter_valid(const KeypointFrame& frame, const ValidityConfig& cfg);
ValidPoints filter_valid(const ValidPoints& points, const ValidityConfig& cfg);

std::bitset<kNumJoints> validity_mask(const KeypointFrame& frame, const ValidityConfig& cfg);

/// Axis-aligned rectangle in continuous pixel coordinates.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;

    friend bool operator==(const Box&, const Box&) = default;
};

/// Maps every joint by the affine transform sending `source` onto `target`.
/// Throws AlignmentError when either box has non-positive extent.
KeypointFrame align_keypoints(const KeypointFrame& frame, const Box& source, const Box& target);

/// Tight bounding box of the joints with confidence >= tau (no region test).
/// Empty when no joint qualifies.
std::optional<Box> joint_bounds(const KeypointFrame& frame, double tau);

// Keypoint file I/O. Layout:
//   coco17 v1 <N>
//   <frame_index> x0 y0 c0 ... x16 y16 c16      (N lines)
/// `source_name` only labels error messages (defaults to the sequence id).
KeypointSequence parse_keypoint_sequence(std::istream& in, std::string sequence_id = {},
                                         std::string_view source_name = {});
KeypointSequence load_keypoint_sequence(const std::filesystem::path& path);
void write_keypoint_sequence(std::ostream& out, const KeypointSequence& seq);
void save_keypoint_sequence(const std::filesystem::path& path, const KeypointSequence& seq);

}  // namespace partskel
