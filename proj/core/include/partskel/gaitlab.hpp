#pragma once

/// \file gaitlab.hpp
/// \brief Desk-scale recognition lab: handcrafted per-frame features standing in
/// for a CNN backbone, temporal and horizontal pooling, a linear embedding head
/// with a standardization neck, cross-entropy and triplet losses with analytic
/// gradients, and Rank-k / mAP / mINP evaluation.
///
/// Feature tensors use the n x c x s x h x w layout (samples, channels, frames,
/// height, width). Per-frame features are per-band class fractions, so c = 13,
/// h = bands and w = 1.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "partskel/fusion.hpp"

namespace partskel {

class FeatureTensor {
public:
    struct Dims {
        int n = 1;
        int c = 1;
        int s = 1;
        int h = 1;
        int w = 1;
        friend bool operator==(const Dims&, const Dims&) = default;
    };

    FeatureTensor() = default;
    /// Zero-filled when `values` is empty. Throws ValidationError on a bad dim,
    /// a size mismatch or a non-finite value.
    explicit FeatureTensor(Dims dims, std::vector<double> values = {});

    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    double& at(int n, int c, int s, int h, int w) noexcept { return values_[index(n, c, s, h, w)]; }
    [[nodiscard]] double at(int n, int c, int s, int h, int w) const noexcept { return values_[index(n, c, s, h, w)]; }

    friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

private:
    [[nodiscard]] std::size_t index(int n, int c, int s, int h, int w) const noexcept {
        return ((((static_cast<std::size_t>(n) * dims_.c + c) * dims_.s + s) * dims_.h + h) * dims_.w) +
               static_cast<std::size_t>(w);
    }

    Dims dims_{};
    std::vector<double> values_;
};

/// n x c x h x w, the frame axis reduced.
class PooledTensor {
public:
    struct Dims {
        int n = 1;
        int c = 1;
        int h = 1;
        int w = 1;
        friend bool operator==(const Dims&, const Dims&) = default;
    };

    PooledTensor() = default;
    explicit PooledTensor(Dims dims, std::vector<double> values = {});

    [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    double& at(int n, int c, int h, int w) noexcept { return values_[index(n, c, h, w)]; }
    [[nodiscard]] double at(int n, int c, int h, int w) const noexcept { return values_[index(n, c, h, w)]; }

    friend bool operator==(const PooledTensor&, const PooledTensor&) = default;

private:
    [[nodiscard]] std::size_t index(int n, int c, int h, int w) const noexcept {
        return (((static_cast<std::size_t>(n) * dims_.c + c) * dims_.h + h) * dims_.w) + static_cast<std::size_t>(w);
    }

    Dims dims_{};
    std::vector<double> values_;
};

/// stripes x channels, stripe-major.
struct StripeFeature {
    int stripes = 0;
    int channels = 0;
    std::vector<double> values;

    [[nodiscard]] double at(int stripe, int channel) const noexcept {
        return values[static_cast<std::size_t>(stripe) * static_cast<std::size_t>(channels) +
                      static_cast<std::size_t>(channel)];
    }
    friend bool operator==(const StripeFeature&, const StripeFeature&) = default;
};

struct Embedding {
    std::vector<double> values;
    std::string identity;
    std::string sample_id;

    friend bool operator==(const Embedding&, const Embedding&) = default;
};

// --- features and pooling -------------------------------------------------

/// Per-frame, per-band class fractions for one sequence (n = 1).
/// CRF frames are one-hot expanded; DCF channels are used as they are.
/// Throws FeatureError on an empty sequence, mixed strategies or sizes, or
/// `bands` not dividing the frame height.
FeatureTensor extract_frame_features(std::span<const FusedSample> frames, int bands);

/// Element-wise maximum over the frame axis.
PooledTensor temporal_pool(const FeatureTensor& f);

/// Splits the h axis into `stripes` equal bands and reduces each band (over h and w)
/// to max + mean, per channel. Throws PoolingError unless stripes divides h.
std::vector<StripeFeature> horizontal_pool(const PooledTensor& z, int stripes);

std::vector<double> flatten(const StripeFeature& f);

/// extract -> temporal pool -> horizontal pool -> flatten, for one sequence.
std::vector<double> describe_sequence(std::span<const FusedSample> frames, int bands, int stripes);

// --- embedding head -------------------------------------------------------

/// rows x cols dense matrix, row-major.
struct LinearMap {
    int rows = 0;
    int cols = 0;
    std::vector<double> weights;

    static LinearMap identity(int n);
    static LinearMap zeros(int rows, int cols);
    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
};

/// Per-dimension (y - mean) / sqrt(variance) * gamma + beta.
struct Standardization {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> gamma;
    std::vector<double> beta;

    static Standardization identity(int d);
    /// Running statistics from a sample set; dimensions with variance below
    /// `min_variance` get variance 1 so they map to a constant.
    static Standardization fit(std::span<const std::vector<double>> samples, double min_variance = 1e-12);
    [[nodiscard]] std::vector<double> apply(std::span<const double> y) const;
    void validate() const;
};

/// flatten -> linear map -> standardization. Throws EmbedError on a shape mismatch.
Embedding embed(const StripeFeature& f, const LinearMap& weights, const Standardization& norm,
                std::string identity = {}, std::string sample_id = {});

struct HeadOptions {
    int epochs = 0;
    double learning_rate = 0.05;
    double margin = 0.2;
    double ce_weight = 1.0;
    double triplet_weight = 1.0;
    std::uint64_t seed = 0;
};

struct EmbeddingHead {
    LinearMap linear;
    Standardization norm;

    [[nodiscard]] Embedding apply(std::span<const double> features, std::string identity = {},
                                  std::string sample_id = {}) const;
};

/// Fits the head on labelled descriptors. With zero epochs the linear map only
/// rescales inputs to unit variance; otherwise full-batch SGD on
/// ce_weight * cross-entropy + triplet_weight * batch-hard triplet loss.
EmbeddingHead fit_embedding_head(std::span<const std::vector<double>> features,
                                 std::span<const std::string> identities, const HeadOptions& options);

// --- losses ---------------------------------------------------------------

std::vector<double> softmax(std::span<const double> logits);

/// -log(predicted[label]). Throws LossError unless `predicted` is non-negative
/// and sums to 1 within 1e-6.
double cross_entropy(std::span<const double> predicted, int label);
double cross_entropy_logits(std::span<const double> logits, int label);
/// d/dlogits of cross_entropy_logits: softmax(logits) - onehot(label).
std::vector<double> cross_entropy_gradient(std::span<const double> logits, int label);

struct Triplet {
    Embedding anchor;
    Embedding positive;
    Embedding negative;
};

struct TripletBatch {
    std::vector<Triplet> triplets;
    double margin = 0.2;

    /// margin > 0, equal dimensions, finite values, identities consistent when labelled.
    void validate() const;
};

/// sum over triplets of max(0, |a-p|^2 - |a-n|^2 + margin).
double triplet_loss(const TripletBatch& batch);

struct TripletGradient {
    std::vector<std::vector<double>> anchor;
    std::vector<std::vector<double>> positive;
    std::vector<std::vector<double>> negative;
};

/// Analytic gradient of triplet_loss. Throws NonDifferentiableError when a
/// triplet's hinge argument lies within `kink_tolerance` of zero.
TripletGradient triplet_gradient(const TripletBatch& batch, double kink_tolerance = 1e-6);

// --- evaluation -----------------------------------------------------------

struct EvalReport {
    std::size_t probes = 0;
    std::size_t gallery = 0;
    double rank1 = 0.0;
    double rank5 = 0.0;
    double mean_ap = 0.0;
    double mean_inp = 0.0;
    std::vector<double> cmc;  ///< cmc[k-1] = Rank-k

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

enum class SelfMatch : std::uint8_t {
    Include,            ///< every gallery item competes
    ExcludeSameSample,  ///< gallery items sharing the probe's sample_id are dropped
};

/// Euclidean ranking per probe, ties broken by gallery order.
/// Throws EvaluationError for an empty gallery, mismatched dimensions or a probe
/// with no same-identity candidate.
EvalReport evaluate(std::span<const Embedding> gallery, std::span<const Embedding> probe,
                    SelfMatch self_match = SelfMatch::Include, int max_rank = 20);

}  // namespace partskel
