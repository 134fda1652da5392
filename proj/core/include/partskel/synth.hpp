#pragma once

/// \file synth.hpp
/// \brief Procedural side-view walkers: paired COCO17 keypoints and silhouettes.
///
/// The gait model is planar and sinusoidal. The pelvis and shoulders form a rigid
/// upright torso; thighs and upper arms swing with the identity's cadence and
/// stride amplitude (arms in anti-phase with the same-side leg), knees flex during
/// the forward swing and the stance foot stays on the ground line. Silhouettes are
/// unions of body-proportional capsules around the limbs.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "partskel/dataset.hpp"
#include "partskel/labels.hpp"
#include "partskel/pose.hpp"

namespace partskel {

enum class Condition : std::uint8_t { Normal, Bag, ClothesChange };

std::string_view to_string(Condition c) noexcept;
/// "normal", "bag" or "clothes". Throws ValidationError otherwise.
Condition parse_condition(std::string_view name);

struct WalkerParams {
    int identity = 0;
    double torso = 36.0;      ///< shoulder line to hip line, pixels
    double upper_arm = 20.0;
    double forearm = 18.0;
    double thigh = 25.0;
    double shin = 25.0;
    double cadence = 0.28;           ///< radians per frame
    double stride_amplitude = 0.45;  ///< peak thigh swing, radians
    double phase = 0.0;              ///< radians
    double height = 104.0;           ///< standing height; scales head and neck
    double view_offset = 0.0;        ///< horizontal shift of the body axis, pixels

    /// Lengths > 0, cadence > 0, amplitude >= 0, all finite.
    void validate() const;
    friend bool operator==(const WalkerParams&, const WalkerParams&) = default;
};

/// Clean by default: exact joints at confidence 0.9. With noise enabled,
/// confidences are drawn from [0.6, 0.99); dropped joints get [0, 0.25).
struct SynthOptions {
    Size canvas{128, 88};
    double joint_noise = 0.0;  ///< std-dev of keypoint jitter, pixels (clipped at 3 sigma)
    double dropout = 0.0;      ///< probability a joint gets a low confidence
};

/// Detector-like corruption used for generated benchmarks.
inline constexpr SynthOptions kNoisyOptions{{128, 88}, 0.5, 0.03};

struct SynthClip {
    WalkerParams params;
    Condition condition = Condition::Normal;
    std::vector<KeypointFrame> frames;
    std::vector<SilhouetteMask> silhouettes;

    [[nodiscard]] KeypointSequence sequence(std::string sequence_id) const;
    friend bool operator==(const SynthClip&, const SynthClip&) = default;
};

/// Deterministic in (params, frames, seed, condition, options). Throws ValidationError when frames < 1.
SynthClip generate_clip(const WalkerParams& params, int frames, std::uint64_t seed,
                        Condition condition = Condition::Normal, const SynthOptions& options = {});

/// `count` identities whose limb lengths pairwise differ by >= 5% in at least one limb.
std::vector<WalkerParams> sample_identities(int count, std::uint64_t seed);

struct BenchmarkSpec {
    int identities = 10;
    int clips_per_identity = 4;
    std::vector<Condition> conditions{Condition::Normal, Condition::Bag};
    int frames = 30;
    std::uint64_t seed = 0;
    bool force = false;
    int workers = 1;
    SynthOptions options = kNoisyOptions;
};

/// Writes a dataset (keypoint files, silhouette PNGs and a manifest) under `root`.
///
/// Every identity gets `clips_per_identity` clips per condition. The first
/// ceil(clips / 2) clips of the first condition form the gallery; everything else
/// is a probe. Refuses a non-empty `root` unless `force` is set, in which case the
/// directory is cleared first.
Manifest generate_benchmark(const std::filesystem::path& root, const BenchmarkSpec& spec);

/// Splitmix64 finalizer; derives independent per-clip seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace partskel
