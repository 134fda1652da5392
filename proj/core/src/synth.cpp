#include "partskel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "partskel/error.hpp"
#include "partskel/image_io.hpp"
#include "partskel/parallel.hpp"
#include "partskel/renderer.hpp"

namespace partskel {

namespace {

constexpr double kPi = std::numbers::pi;

// Portable draws from mt19937_64; the standard distributions are not
// reproducible across library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 engine_;
};

struct Vec {
    double x = 0.0;
    double y = 0.0;
};

Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec along(double length, double angle) { return {length * std::sin(angle), length * std::cos(angle)}; }
Vec mid(Vec a, Vec b) { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }

struct Pose {
    std::array<Vec, kNumJoints> joints;
    Vec head_center;
    double head_radius = 0.0;
};

Pose pose_at(const WalkerParams& p, int t, Size canvas) {
    const double ang = p.cadence * t + p.phase;
    const double amp = p.stride_amplitude;

    const double thigh_l = amp * std::sin(ang);
    const double thigh_r = amp * std::sin(ang + kPi);
    // knee flexes while the leg swings forward
    const double knee_l = 1.4 * amp * std::max(0.0, std::cos(ang));
    const double knee_r = 1.4 * amp * std::max(0.0, std::cos(ang + kPi));
    const double reach_l = p.thigh * std::cos(thigh_l) + p.shin * std::cos(thigh_l - knee_l);
    const double reach_r = p.thigh * std::cos(thigh_r) + p.shin * std::cos(thigh_r - knee_r);

    const double ground = canvas.height - 4.0;
    const double hip_y = ground - std::max(reach_l, reach_r);
    const double cx = canvas.width / 2.0 + p.view_offset;
    const double hip_dx = 0.08 * p.torso;
    const double shoulder_dx = 0.12 * p.torso;

    Pose pose;
    auto& j = pose.joints;
    auto set = [&j](Joint which, Vec v) { j[static_cast<std::size_t>(index(which))] = v; };

    const Vec l_hip{cx - hip_dx, hip_y};
    const Vec r_hip{cx + hip_dx, hip_y};
    const Vec l_sh{cx - shoulder_dx, hip_y - p.torso};
    const Vec r_sh{cx + shoulder_dx, hip_y - p.torso};
    const Vec l_knee = l_hip + along(p.thigh, thigh_l);
    const Vec r_knee = r_hip + along(p.thigh, thigh_r);
    set(Joint::LeftHip, l_hip);
    set(Joint::RightHip, r_hip);
    set(Joint::LeftShoulder, l_sh);
    set(Joint::RightShoulder, r_sh);
    set(Joint::LeftKnee, l_knee);
    set(Joint::RightKnee, r_knee);
    set(Joint::LeftAnkle, l_knee + along(p.shin, thigh_l - knee_l));
    set(Joint::RightAnkle, r_knee + along(p.shin, thigh_r - knee_r));

    // arms swing against the same-side leg, elbows bend forward
    const double arm_l = -0.8 * amp * std::sin(ang);
    const double arm_r = -arm_l;
    const double fore_l = arm_l + 0.6 * amp + 0.4 * amp * std::max(0.0, std::sin(ang + kPi));
    const double fore_r = arm_r + 0.6 * amp + 0.4 * amp * std::max(0.0, std::sin(ang));
    const Vec l_elbow = l_sh + along(p.upper_arm, arm_l);
    const Vec r_elbow = r_sh + along(p.upper_arm, arm_r);
    set(Joint::LeftElbow, l_elbow);
    set(Joint::RightElbow, r_elbow);
    set(Joint::LeftWrist, l_elbow + along(p.forearm, fore_l));
    set(Joint::RightWrist, r_elbow + along(p.forearm, fore_r));

    const double hr = 0.07 * p.height;
    const double neck = 0.06 * p.height;
    const Vec shoulders = mid(l_sh, r_sh);
    const Vec hc{shoulders.x + 0.1 * hr, shoulders.y - neck - hr};
    pose.head_center = hc;
    pose.head_radius = hr;
    set(Joint::Nose, hc + Vec{0.85 * hr, 0.15 * hr});
    set(Joint::LeftEye, hc + Vec{0.5 * hr, -0.3 * hr});
    set(Joint::RightEye, hc + Vec{0.6 * hr, -0.22 * hr});
    set(Joint::LeftEar, hc + Vec{-0.25 * hr, -0.05 * hr});
    set(Joint::RightEar, hc + Vec{-0.15 * hr, 0.02 * hr});
    return pose;
}

SilhouetteMask body_mask(const WalkerParams& p, const Pose& pose, Condition condition, Size canvas) {
    SilhouetteMask mask(canvas);
    auto paint = [&mask](int x, int y) { mask.set(x, y, true); };
    auto jp = [&pose](Joint j) {
        const Vec v = pose.joints[static_cast<std::size_t>(index(j))];
        return Point{v.x, v.y};
    };
    auto capsule = [&](Point a, Point b, double width) { detail::for_each_capsule_pixel(a, b, width, canvas, paint); };
    auto midpoint = [](Point a, Point b) { return Point{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; };

    const Point shoulders = midpoint(jp(Joint::LeftShoulder), jp(Joint::RightShoulder));
    const Point hips = midpoint(jp(Joint::LeftHip), jp(Joint::RightHip));
    const double torso_width = 0.42 * p.torso * (condition == Condition::ClothesChange ? 1.6 : 1.0);

    capsule(shoulders, hips, torso_width);
    capsule(jp(Joint::LeftShoulder), jp(Joint::RightShoulder), 0.3 * p.torso);
    capsule(jp(Joint::LeftHip), jp(Joint::RightHip), 0.35 * p.torso);
    const Point head{pose.head_center.x, pose.head_center.y};
    capsule(shoulders, head, 0.9 * pose.head_radius);
    detail::for_each_circle_pixel(head, 1.1 * pose.head_radius, canvas, paint);

    for (auto [sh, el, wr] : {std::array{Joint::LeftShoulder, Joint::LeftElbow, Joint::LeftWrist},
                              std::array{Joint::RightShoulder, Joint::RightElbow, Joint::RightWrist}}) {
        capsule(jp(sh), jp(el), 0.32 * p.upper_arm);
        capsule(jp(el), jp(wr), 0.3 * p.forearm);
        detail::for_each_circle_pixel(jp(wr), 0.14 * p.forearm, canvas, paint);
    }
    for (auto [hip, knee, ankle] : {std::array{Joint::LeftHip, Joint::LeftKnee, Joint::LeftAnkle},
                                    std::array{Joint::RightHip, Joint::RightKnee, Joint::RightAnkle}}) {
        capsule(jp(hip), jp(knee), 0.42 * p.thigh);
        capsule(jp(knee), jp(ankle), 0.32 * p.shin);
        const Point a = jp(ankle);
        capsule(a, {a.x + 0.3 * p.shin, a.y + 0.04 * p.shin}, 0.18 * p.shin);
    }
    if (condition == Condition::Bag) {
        const Point w = jp(Joint::LeftWrist);
        detail::for_each_circle_pixel({w.x, w.y + 0.12 * p.torso}, 0.25 * p.torso, canvas, paint);
    }
    return mask;
}

}  // namespace

std::string_view to_string(Condition c) noexcept {
    switch (c) {
        case Condition::Normal: return "normal";
        case Condition::Bag: return "bag";
        case Condition::ClothesChange: return "clothes";
    }
    return "normal";
}

Condition parse_condition(std::string_view name) {
    if (name == "normal") return Condition::Normal;
    if (name == "bag") return Condition::Bag;
    if (name == "clothes") return Condition::ClothesChange;
    throw ValidationError("unknown condition '" + std::string(name) + "' (expected normal, bag or clothes)");
}

void WalkerParams::validate() const {
    for (double v : {torso, upper_arm, forearm, thigh, shin, height}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("walker lengths must be positive and finite");
    }
    if (!(cadence > 0.0) || !std::isfinite(cadence)) throw ValidationError("walker cadence must be positive");
    if (!(stride_amplitude >= 0.0) || !std::isfinite(stride_amplitude)) {
        throw ValidationError("walker stride amplitude must be non-negative");
    }
    if (!std::isfinite(phase) || !std::isfinite(view_offset)) throw ValidationError("walker phase/offset must be finite");
}

KeypointSequence SynthClip::sequence(std::string sequence_id) const { return {std::move(sequence_id), frames}; }

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

SynthClip generate_clip(const WalkerParams& params, int frames, std::uint64_t seed, Condition condition,
                        const SynthOptions& options) {
    if (frames < 1) throw ValidationError("a clip needs at least one frame");
    params.validate();
    Rng rng(seed);
    SynthClip clip{params, condition, {}, {}};
    clip.frames.reserve(static_cast<std::size_t>(frames));
    clip.silhouettes.reserve(static_cast<std::size_t>(frames));
    const double sigma = std::max(0.0, options.joint_noise);
    for (int t = 0; t < frames; ++t) {
        const Pose pose = pose_at(params, t, options.canvas);
        KeypointFrame kf;
        kf.frame_index = t;
        for (std::size_t j = 0; j < static_cast<std::size_t>(kNumJoints); ++j) {
            // fixed draw order keeps the stream aligned regardless of options
            const double nx = std::clamp(rng.gaussian(), -3.0, 3.0) * sigma;
            const double ny = std::clamp(rng.gaussian(), -3.0, 3.0) * sigma;
            const double uc = rng.uniform();
            const double ud = rng.uniform();
            double conf = sigma > 0.0 ? 0.6 + 0.39 * uc : 0.9;
            if (ud < options.dropout) conf = 0.25 * uc;
            kf.joints[j] = {pose.joints[j].x + nx, pose.joints[j].y + ny, conf};
        }
        clip.frames.push_back(kf);
        clip.silhouettes.push_back(body_mask(params, pose, condition, options.canvas));
    }
    return clip;
}

std::vector<WalkerParams> sample_identities(int count, std::uint64_t seed) {
    if (count < 1) throw ValidationError("identity count must be >= 1");
    Rng rng(mix_seed(seed, 0x1d));
    std::vector<WalkerParams> out;
    auto limbs = [](const WalkerParams& w) { return std::array{w.torso, w.upper_arm, w.forearm, w.thigh, w.shin}; };
    auto distinct = [&](const WalkerParams& a, const WalkerParams& b) {
        const auto la = limbs(a);
        const auto lb = limbs(b);
        for (std::size_t k = 0; k < la.size(); ++k) {
            if (std::abs(la[k] - lb[k]) >= 0.05 * std::max(la[k], lb[k])) return true;
        }
        return false;
    };
    for (int id = 0; id < count; ++id) {
        for (int attempt = 0;; ++attempt) {
            if (attempt == 10000) throw ValidationError("cannot sample enough distinct identities");
            WalkerParams w;
            w.identity = id;
            w.torso = rng.uniform(32.0, 40.0);
            w.upper_arm = rng.uniform(17.0, 23.0);
            w.forearm = rng.uniform(15.0, 21.0);
            w.thigh = rng.uniform(22.0, 28.0);
            w.shin = rng.uniform(22.0, 28.0);
            w.height = rng.uniform(96.0, 112.0);
            w.cadence = rng.uniform(0.24, 0.34);
            w.stride_amplitude = rng.uniform(0.35, 0.55);
            w.view_offset = rng.uniform(-3.0, 3.0);
            if (std::all_of(out.begin(), out.end(), [&](const WalkerParams& o) { return distinct(w, o); })) {
                out.push_back(w);
                break;
            }
        }
    }
    return out;
}

Manifest generate_benchmark(const std::filesystem::path& root, const BenchmarkSpec& spec) {
    namespace fs = std::filesystem;
    if (spec.identities < 2) throw ValidationError("a benchmark needs at least 2 identities");
    if (spec.clips_per_identity < 1) throw ValidationError("clips per identity must be >= 1");
    if (spec.conditions.empty()) throw ValidationError("at least one condition is required");
    if (spec.frames < 1) throw ValidationError("clips need at least one frame");

    if (fs::exists(root) && !fs::is_empty(root)) {
        if (!spec.force) throw ValidationError("output directory " + root.string() + " is not empty (use --force)");
        for (const auto& entry : fs::directory_iterator(root)) fs::remove_all(entry.path());
    }
    fs::create_directories(root);

    const auto people = sample_identities(spec.identities, spec.seed);
    const int gallery_clips = (spec.clips_per_identity + 1) / 2;

    struct Job {
        ManifestEntry entry;
        WalkerParams params;
        Condition condition;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int id = 0; id < spec.identities; ++id) {
        for (std::size_t c = 0; c < spec.conditions.size(); ++c) {
            for (int clip = 0; clip < spec.clips_per_identity; ++clip) {
                char name[64];
                std::snprintf(name, sizeof(name), "id%03d_%s_%02d", id, std::string(to_string(spec.conditions[c])).c_str(),
                              clip);
                char identity[16];
                std::snprintf(identity, sizeof(identity), "id%03d", id);
                const std::string seq = name;
                const Split split = (c == 0 && clip < gallery_clips) ? Split::Gallery : Split::Probe;
                const std::uint64_t seed =
                    mix_seed(mix_seed(spec.seed, static_cast<std::uint64_t>(id)), c * 1000 + static_cast<std::uint64_t>(clip));
                jobs.push_back({{seq, identity, std::string(to_string(spec.conditions[c])), split,
                                 fs::path(seq) / "keypoints.txt", fs::path(seq) / "sil"},
                                people[static_cast<std::size_t>(id)], spec.conditions[c], seed});
            }
        }
    }

    parallel_for(jobs.size(), spec.workers, [&](std::size_t i) {
        const auto& job = jobs[i];
        Rng clip_rng(job.seed);
        WalkerParams params = job.params;
        params.phase = clip_rng.uniform(0.0, 2.0 * kPi);
        params.cadence *= 1.0 + 0.04 * (clip_rng.uniform() - 0.5);
        const auto clip = generate_clip(params, spec.frames, mix_seed(job.seed, 1), job.condition, spec.options);

        const fs::path dir = root / job.entry.sequence_id;
        fs::create_directories(dir / "sil");
        save_keypoint_sequence(root / job.entry.keypoints, clip.sequence(job.entry.sequence_id));
        for (std::size_t f = 0; f < clip.silhouettes.size(); ++f) {
            write_mask_png(root / job.entry.silhouettes / frame_file_name(clip.frames[f].frame_index, "png"),
                           clip.silhouettes[f]);
        }
    });

    Manifest manifest;
    for (const auto& job : jobs) manifest.sequences.push_back(job.entry);
    manifest.save(root);
    return manifest;
}

}  // namespace partskel
