#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "partskel/error.hpp"
#include "partskel/gaitlab.hpp"
#include "partskel/renderer.hpp"
#include "partskel/synth.hpp"

using namespace partskel;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

FeatureTensor random_tensor(std::mt19937_64& rng, FeatureTensor::Dims d) {
    return FeatureTensor(d, random_values(rng, static_cast<std::size_t>(d.n * d.c * d.s * d.h * d.w)));
}

Embedding emb(std::vector<double> v, std::string id, std::string sample = {}) {
    return {std::move(v), std::move(id), std::move(sample)};
}

}  // namespace

// --- features ---

TEST(Features, AllBackgroundSequence) {
    const std::vector<FusedSample> frames(3, FusedSample{Strategy::Crf, LabelRaster(kTargetSize)});
    const auto f = extract_frame_features(frames, 16);
    EXPECT_EQ(f.dims(), (FeatureTensor::Dims{1, 13, 3, 16, 1}));
    for (int s = 0; s < 3; ++s) {
        for (int b = 0; b < 16; ++b) {
            for (int c = 0; c < 13; ++c) EXPECT_EQ(f.at(0, c, s, b, 0), c == 0 ? 1.0 : 0.0);
        }
    }
}

TEST(Features, ConstantClassRaster) {
    const std::vector<FusedSample> frames{{Strategy::Crf, LabelRaster(kTargetSize, cls::kLeftUpperArm)}};
    const auto f = extract_frame_features(frames, 64);
    for (int b = 0; b < 64; ++b) EXPECT_EQ(f.at(0, 5, 0, b, 0), 1.0);
}

TEST(Features, MatchPixelCountingOnWalkerFrames) {
    const auto clip = generate_clip(sample_identities(2, 4)[0], 6, 4, Condition::Bag, kNoisyOptions);
    std::vector<FusedSample> crf, dcf;
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
        const auto parsing = render_parsing_skeleton(clip.frames[i], PartMapping::coco17(), {});
        crf.push_back(fuse(parsing, clip.silhouettes[i], Strategy::Crf));
        dcf.push_back(fuse(parsing, clip.silhouettes[i], Strategy::Dcf));
    }
    const int bands = 16;
    const auto f = extract_frame_features(crf, bands);
    for (std::size_t s = 0; s < crf.size(); ++s) {
        for (int b = 0; b < bands; ++b) {
            std::vector<int> count(13, 0);
            for (int y = b * 4; y < b * 4 + 4; ++y) {
                for (int x = 0; x < 44; ++x) ++count[crf[s].crf().at(x, y)];
            }
            for (int c = 0; c < 13; ++c) {
                EXPECT_DOUBLE_EQ(f.at(0, c, static_cast<int>(s), b, 0), count[static_cast<std::size_t>(c)] / (4.0 * 44.0));
            }
        }
    }
    // DCF channels are disjoint apart from channel 1, so only skeleton channels must agree with CRF
    const auto g = extract_frame_features(dcf, bands);
    for (int c = 2; c < 13; ++c) EXPECT_EQ(g.at(0, c, 2, 7, 0), f.at(0, c, 2, 7, 0));
}

TEST(Features, RejectsMixedInputs) {
    std::vector<FusedSample> frames{{Strategy::Crf, LabelRaster(kTargetSize)},
                                    {Strategy::Dcf, ChannelStack(13, kTargetSize)}};
    EXPECT_THROW(extract_frame_features(frames, 16), FeatureError);
    frames[1] = {Strategy::Crf, LabelRaster({32, 44})};
    EXPECT_THROW(extract_frame_features(frames, 16), FeatureError);
    EXPECT_THROW(extract_frame_features({}, 16), FeatureError);
    const std::vector<FusedSample> one{{Strategy::Crf, LabelRaster(kTargetSize)}};
    EXPECT_THROW(extract_frame_features(one, 7), FeatureError);
}

TEST(Features, TensorValidation) {
    EXPECT_THROW(FeatureTensor({1, 0, 1, 1, 1}), ValidationError);
    EXPECT_THROW(FeatureTensor({1, 1, 1, 1, 2}, {1.0}), ValidationError);
    EXPECT_THROW(FeatureTensor({1, 1, 1, 1, 1}, {std::nan("")}), ValidationError);
}

// --- pooling ---

TEST(TemporalPool, SingleFrameIsIdentity) {
    std::mt19937_64 rng(1);
    const auto f = random_tensor(rng, {2, 3, 1, 4, 5});
    const auto z = temporal_pool(f);
    for (int n = 0; n < 2; ++n)
        for (int c = 0; c < 3; ++c)
            for (int h = 0; h < 4; ++h)
                for (int w = 0; w < 5; ++w) EXPECT_EQ(z.at(n, c, h, w), f.at(n, c, 0, h, w));
}

TEST(TemporalPool, MatchesElementwiseMax) {
    std::mt19937_64 rng(2);
    const auto f = random_tensor(rng, {2, 3, 4, 5, 6});
    const auto z = temporal_pool(f);
    for (int n = 0; n < 2; ++n)
        for (int c = 0; c < 3; ++c)
            for (int h = 0; h < 5; ++h)
                for (int w = 0; w < 6; ++w) {
                    double m = -1e300;
                    for (int s = 0; s < 4; ++s) m = std::max(m, f.at(n, c, s, h, w));
                    EXPECT_EQ(z.at(n, c, h, w), m);
                }
}

TEST(TemporalPool, FramePermutationInvariant) {
    std::mt19937_64 rng(3);
    const FeatureTensor::Dims d{1, 3, 7, 4, 2};
    const auto f = random_tensor(rng, d);
    std::vector<int> perm(7);
    for (int i = 0; i < 7; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        FeatureTensor g(d);
        for (int c = 0; c < 3; ++c)
            for (int s = 0; s < 7; ++s)
                for (int h = 0; h < 4; ++h)
                    for (int w = 0; w < 2; ++w) g.at(0, c, s, h, w) = f.at(0, c, perm[static_cast<std::size_t>(s)], h, w);
        EXPECT_EQ(temporal_pool(g), temporal_pool(f));
    }
}

TEST(HorizontalPool, ConstantInputGivesTwiceTheValue) {
    PooledTensor z({1, 3, 8, 2}, std::vector<double>(48, 0.7));
    const auto out = horizontal_pool(z, 4);
    for (const auto& v : out.front().values) EXPECT_DOUBLE_EQ(v, 1.4);
}

TEST(HorizontalPool, SingleStripeIsGlobalMaxPlusMean) {
    std::mt19937_64 rng(4);
    PooledTensor z({1, 2, 6, 3}, random_values(rng, 36));
    const auto out = horizontal_pool(z, 1).front();
    for (int c = 0; c < 2; ++c) {
        double mx = -1e300, sum = 0.0;
        for (int h = 0; h < 6; ++h)
            for (int w = 0; w < 3; ++w) {
                mx = std::max(mx, z.at(0, c, h, w));
                sum += z.at(0, c, h, w);
            }
        EXPECT_NEAR(out.at(0, c), mx + sum / 18.0, 1e-15);
    }
}

TEST(HorizontalPool, MatchesBandReduction) {
    std::mt19937_64 rng(5);
    PooledTensor z({2, 3, 16, 2}, random_values(rng, 192));
    const auto out = horizontal_pool(z, 4);
    ASSERT_EQ(out.size(), 2u);
    for (int n = 0; n < 2; ++n)
        for (int s = 0; s < 4; ++s)
            for (int c = 0; c < 3; ++c) {
                double mx = -1e300, sum = 0.0;
                for (int h = s * 4; h < s * 4 + 4; ++h)
                    for (int w = 0; w < 2; ++w) {
                        mx = std::max(mx, z.at(n, c, h, w));
                        sum += z.at(n, c, h, w);
                    }
                EXPECT_NEAR(out[static_cast<std::size_t>(n)].at(s, c), mx + sum / 8.0, 1e-15);
            }
}

TEST(HorizontalPool, PositivelyHomogeneous) {
    std::mt19937_64 rng(6);
    const auto base = random_values(rng, 96, 0.0, 1.0);
    PooledTensor z({1, 3, 16, 2}, base);
    for (double lambda : {0.0, 0.5, 2.0, 4.0}) {
        std::vector<double> scaled(base);
        for (auto& v : scaled) v *= lambda;
        const auto a = horizontal_pool(z, 8).front();
        const auto b = horizontal_pool(PooledTensor({1, 3, 16, 2}, scaled), 8).front();
        for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(b.values[i], lambda * a.values[i], 1e-12);
    }
}

TEST(HorizontalPool, IndivisibleHeightThrows) {
    PooledTensor z({1, 1, 10, 1});
    EXPECT_THROW(horizontal_pool(z, 3), PoolingError);
}

// --- embedding head ---

TEST(Embed, PassthroughAndZero) {
    StripeFeature f{2, 3, {1, 2, 3, 4, 5, 6}};
    const auto e = embed(f, LinearMap::identity(6), Standardization::identity(6));
    EXPECT_EQ(e.values, f.values);
    const auto z = embed(f, LinearMap::zeros(4, 6), Standardization::identity(4));
    EXPECT_EQ(z.values, std::vector<double>(4, 0.0));
}

TEST(Embed, MatchesDenseMatVec) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        StripeFeature f{4, 5, random_values(rng, 20)};
        LinearMap w{7, 20, random_values(rng, 140)};
        const auto e = embed(f, w, Standardization::identity(7));
        for (int r = 0; r < 7; ++r) {
            double acc = 0.0;
            for (int c = 0; c < 20; ++c) acc += w.weights[static_cast<std::size_t>(r * 20 + c)] * f.values[static_cast<std::size_t>(c)];
            EXPECT_NEAR(e.values[static_cast<std::size_t>(r)], acc, 1e-12);
        }
    }
}

TEST(Embed, StandardizationAffine) {
    Standardization s{{1.0, -2.0}, {4.0, 0.25}, {2.0, 1.0}, {0.5, -1.0}};
    const std::vector<double> y{3.0, -1.0};
    const auto out = s.apply(y);
    EXPECT_DOUBLE_EQ(out[0], (3.0 - 1.0) / 2.0 * 2.0 + 0.5);
    EXPECT_DOUBLE_EQ(out[1], (-1.0 + 2.0) / 0.5 * 1.0 - 1.0);
}

TEST(Embed, ShapeMismatchThrows) {
    StripeFeature f{2, 3, std::vector<double>(6, 1.0)};
    EXPECT_THROW(embed(f, LinearMap::identity(5), Standardization::identity(5)), EmbedError);
    EXPECT_THROW(embed(f, LinearMap::identity(6), Standardization::identity(4)), EmbedError);
}

TEST(Head, TrainingIsDeterministicAndSeparatesIdentities) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<std::vector<double>> x;
    std::vector<std::string> ids;
    for (int id = 0; id < 4; ++id) {
        const auto center = random_values(rng, 12, -2.0, 2.0);
        for (int k = 0; k < 3; ++k) {
            auto v = center;
            for (auto& t : v) t += noise(rng);
            x.push_back(v);
            ids.push_back("p" + std::to_string(id));
        }
    }
    HeadOptions opt;
    opt.epochs = 30;
    const auto a = fit_embedding_head(x, ids, opt);
    const auto b = fit_embedding_head(x, ids, opt);
    EXPECT_EQ(a.linear.weights, b.linear.weights);
    std::vector<Embedding> e;
    for (std::size_t i = 0; i < x.size(); ++i) e.push_back(a.apply(x[i], ids[i], std::to_string(i)));
    const auto report = evaluate(e, e, SelfMatch::ExcludeSameSample);
    EXPECT_EQ(report.rank1, 1.0);
}

// --- losses ---

TEST(CrossEntropy, AnalyticValues) {
    EXPECT_EQ(cross_entropy(std::vector<double>{0.0, 1.0, 0.0}, 1), 0.0);
    EXPECT_NEAR(cross_entropy(std::vector<double>(5, 0.2), 3), std::log(5.0), 1e-12);
    EXPECT_THROW(cross_entropy(std::vector<double>{0.5, 0.6}, 0), LossError);
    EXPECT_THROW(cross_entropy(std::vector<double>{-0.1, 1.1}, 0), LossError);
}

TEST(CrossEntropy, MatchesFormulaOnRandomSimplex) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_values(rng, 6, 0.01, 1.0);
        double sum = 0.0;
        for (double v : p) sum += v;
        for (auto& v : p) v /= sum;
        const int label = trial % 6;
        EXPECT_NEAR(cross_entropy(p, label), -std::log(p[static_cast<std::size_t>(label)]), 1e-12);
        EXPECT_GE(cross_entropy(p, label), 0.0);
    }
}

TEST(CrossEntropy, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const auto logits = random_values(rng, 7, -3.0, 3.0);
        const int label = trial % 7;
        const auto analytic = cross_entropy_gradient(logits, label);
        const auto numeric = oracle::numeric_gradient(
            [label](const std::vector<double>& z) { return cross_entropy_logits(z, label); }, logits);
        EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-4);
    }
}

TEST(CrossEntropy, GradientVanishesOnTrueLogitWhenConfident) {
    std::vector<double> logits{0.0, 60.0, 0.0};
    const auto g = cross_entropy_gradient(logits, 1);
    EXPECT_NEAR(g[1], 0.0, 1e-12);
}

TEST(Triplet, DocumentedTerms) {
    TripletBatch b;
    b.margin = 0.2;
    b.triplets.push_back({emb({0.0}, "a"), emb({0.0}, "a"), emb({1.0}, "b")});
    EXPECT_EQ(triplet_loss(b), 0.0);
    b.triplets[0].negative = emb({0.0}, "b");
    EXPECT_DOUBLE_EQ(triplet_loss(b), 0.2);
}

TEST(Triplet, MatchesBruteForceDistances) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        TripletBatch b;
        double expected = 0.0;
        for (int i = 0; i < 5; ++i) {
            Triplet t{emb(random_values(rng, 4), "x"), emb(random_values(rng, 4), "x"), emb(random_values(rng, 4), "y")};
            double ap = 0.0, an = 0.0;
            for (int k = 0; k < 4; ++k) {
                ap += std::pow(t.anchor.values[static_cast<std::size_t>(k)] - t.positive.values[static_cast<std::size_t>(k)], 2);
                an += std::pow(t.anchor.values[static_cast<std::size_t>(k)] - t.negative.values[static_cast<std::size_t>(k)], 2);
            }
            expected += std::max(0.0, ap - an + b.margin);
            b.triplets.push_back(std::move(t));
        }
        EXPECT_NEAR(triplet_loss(b), expected, 1e-12);
    }
}

TEST(Triplet, ValidationAndKink) {
    TripletBatch b;
    b.margin = 0.2;
    b.triplets.push_back({emb({0.0}, "a"), emb({0.0}, "b"), emb({1.0}, "c")});
    EXPECT_THROW(triplet_loss(b), LossError);
    b.triplets[0] = {emb({0.0}, "a"), emb({0.0}, "a"), emb({std::sqrt(0.2)}, "c")};
    EXPECT_THROW(triplet_gradient(b), NonDifferentiableError);
    b.margin = 0.0;
    EXPECT_THROW(triplet_loss(b), LossError);
}

TEST(Triplet, InactiveGradientIsZero) {
    TripletBatch b;
    b.triplets.push_back({emb({0.0, 0.0}, "a"), emb({0.1, 0.0}, "a"), emb({3.0, 0.0}, "b")});
    const auto g = triplet_gradient(b);
    for (const auto* v : {&g.anchor[0], &g.positive[0], &g.negative[0]}) {
        for (double x : *v) EXPECT_EQ(x, 0.0);
    }
}

TEST(Triplet, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(12);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        TripletBatch b;
        b.triplets.push_back({emb(random_values(rng, 5), "a"), emb(random_values(rng, 5), "a"), emb(random_values(rng, 5), "b")});
        const auto& t = b.triplets[0];
        const std::vector<double> a = t.anchor.values, p = t.positive.values, n = t.negative.values;
        TripletGradient g;
        try {
            g = triplet_gradient(b, 1e-3);
        } catch (const NonDifferentiableError&) {
            continue;
        }
        auto loss_at = [&](int which) {
            return [&, which](const std::vector<double>& x) {
                TripletBatch c = b;
                (which == 0 ? c.triplets[0].anchor : which == 1 ? c.triplets[0].positive : c.triplets[0].negative).values = x;
                return triplet_loss(c);
            };
        };
        EXPECT_LT(oracle::relative_error(g.anchor[0], oracle::numeric_gradient(loss_at(0), a)), 1e-4);
        EXPECT_LT(oracle::relative_error(g.positive[0], oracle::numeric_gradient(loss_at(1), p)), 1e-4);
        EXPECT_LT(oracle::relative_error(g.negative[0], oracle::numeric_gradient(loss_at(2), n)), 1e-4);
        ++checked;
    }
    EXPECT_GT(checked, 40);
}

// --- evaluation ---

TEST(Evaluate, TwoGalleryHandCase) {
    const std::vector<Embedding> gallery{emb({1.0}, "wrong"), emb({2.0}, "right")};
    const std::vector<Embedding> probe{emb({0.0}, "right")};
    const auto r = evaluate(gallery, probe);
    EXPECT_EQ(r.rank1, 0.0);
    EXPECT_EQ(r.rank5, 1.0);
    EXPECT_EQ(r.mean_ap, 0.5);
    EXPECT_EQ(r.mean_inp, 0.5);
}

TEST(Evaluate, GalleryAgainstItselfIncludingSelfMatches) {
    std::mt19937_64 rng(13);
    std::vector<Embedding> g;
    for (int i = 0; i < 10; ++i) g.push_back(emb(random_values(rng, 3), "id" + std::to_string(i % 5), std::to_string(i)));
    const auto r = evaluate(g, g);
    EXPECT_EQ(r.rank1, 1.0);
    EXPECT_EQ(r.cmc.front(), 1.0);
}

TEST(Evaluate, TiesFollowGalleryOrder) {
    const std::vector<Embedding> gallery{emb({1.0}, "b"), emb({1.0}, "a")};
    const std::vector<Embedding> probe{emb({0.0}, "a")};
    EXPECT_EQ(evaluate(gallery, probe).rank1, 0.0);
    const std::vector<Embedding> swapped{emb({1.0}, "a"), emb({1.0}, "b")};
    EXPECT_EQ(evaluate(swapped, probe).rank1, 1.0);
}

TEST(Evaluate, MonotoneAndBounded) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Embedding> g, p;
        for (int i = 0; i < 20; ++i) g.push_back(emb(random_values(rng, 4), "id" + std::to_string(i % 6)));
        for (int i = 0; i < 8; ++i) p.push_back(emb(random_values(rng, 4), "id" + std::to_string(i % 6)));
        const auto r = evaluate(g, p);
        for (std::size_t k = 1; k < r.cmc.size(); ++k) EXPECT_LE(r.cmc[k - 1], r.cmc[k]);
        EXPECT_LE(r.rank1, r.rank5);
        EXPECT_GT(r.mean_inp, 0.0);
        EXPECT_LE(r.mean_inp, 1.0);
        EXPECT_GT(r.mean_ap, 0.0);
        EXPECT_LE(r.mean_ap, 1.0);
    }
}

// Positives at ranks 2 and 3: AP = (1/2 + 2/3) / 2 while INP = 2/3, so INP can exceed AP.
TEST(Evaluate, InpCanExceedAp) {
    const std::vector<Embedding> gallery{emb({1.0}, "b"), emb({2.0}, "a"), emb({3.0}, "a")};
    const std::vector<Embedding> probe{emb({0.0}, "a")};
    const auto r = evaluate(gallery, probe);
    EXPECT_DOUBLE_EQ(r.mean_ap, (0.5 + 2.0 / 3.0) / 2.0);
    EXPECT_DOUBLE_EQ(r.mean_inp, 2.0 / 3.0);
    EXPECT_GT(r.mean_inp, r.mean_ap);
}

TEST(Evaluate, InpEqualsApWithOnePositive) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Embedding> g, p;
        for (int i = 0; i < 8; ++i) g.push_back(emb(random_values(rng, 3), "id" + std::to_string(i)));
        for (int i = 0; i < 8; ++i) p.push_back(emb(random_values(rng, 3), "id" + std::to_string(i)));
        const auto r = evaluate(g, p);
        EXPECT_NEAR(r.mean_inp, r.mean_ap, 1e-15);
    }
}

TEST(Evaluate, InvariantUnderRotation) {
    std::mt19937_64 rng(15);
    const double th = 0.7;
    auto rotate = [th](Embedding e) {
        const double x = e.values[0], y = e.values[1];
        e.values[0] = std::cos(th) * x - std::sin(th) * y;
        e.values[1] = std::sin(th) * x + std::cos(th) * y;
        return e;
    };
    std::vector<Embedding> g, p, gr, pr;
    for (int i = 0; i < 15; ++i) g.push_back(emb(random_values(rng, 3), "id" + std::to_string(i % 5)));
    for (int i = 0; i < 10; ++i) p.push_back(emb(random_values(rng, 3), "id" + std::to_string(i % 5)));
    for (const auto& e : g) gr.push_back(rotate(e));
    for (const auto& e : p) pr.push_back(rotate(e));
    const auto a = evaluate(g, p), b = evaluate(gr, pr);
    EXPECT_EQ(a.cmc, b.cmc);
    EXPECT_NEAR(a.mean_ap, b.mean_ap, 1e-12);
    EXPECT_NEAR(a.mean_inp, b.mean_inp, 1e-12);
}

TEST(Evaluate, Errors) {
    const std::vector<Embedding> g{emb({0.0}, "a")};
    EXPECT_THROW(evaluate({}, g), EvaluationError);
    const std::vector<Embedding> stranger{emb({0.0}, "z")};
    EXPECT_THROW(evaluate(g, stranger), EvaluationError);
    const std::vector<Embedding> wide{emb({0.0, 1.0}, "a")};
    EXPECT_THROW(evaluate(g, wide), EvaluationError);
}
