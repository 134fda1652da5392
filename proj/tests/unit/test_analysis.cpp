#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "partskel/analysis.hpp"
#include "partskel/error.hpp"
#include "partskel/fusion.hpp"
#include "partskel/renderer.hpp"
#include "partskel/synth.hpp"

using namespace partskel;

namespace {

ClassHistogram from_counts(const std::vector<std::uint64_t>& counts) {
    ClassHistogram h;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        h.counts[k] = counts[k];
        h.total += counts[k];
    }
    return h;
}

}  // namespace

TEST(Histogram, CountsAndAdditivity) {
    const LabelRaster r({2, 2});
    const std::vector<LabelRaster> one{r};
    const auto h = class_histogram(one);
    EXPECT_EQ(h.counts[0], 4u);
    EXPECT_EQ(h.total, 4u);
    const std::vector<LabelRaster> two{r, r};
    EXPECT_EQ(class_histogram(two).counts[0], 8u);
    EXPECT_THROW(class_histogram({}), AnalysisError);
}

TEST(Histogram, MatchesPixelTally) {
    const auto clip = generate_clip(sample_identities(2, 3)[0], 10, 3, Condition::Normal, kNoisyOptions);
    std::vector<LabelRaster> rasters;
    for (const auto& f : clip.frames) rasters.push_back(render_parsing_skeleton(f, PartMapping::coco17(), {}));
    const auto h = class_histogram(rasters);
    std::vector<std::uint64_t> tally(kNumClasses, 0);
    for (const auto& r : rasters) {
        for (int y = 0; y < r.height(); ++y) {
            for (int x = 0; x < r.width(); ++x) ++tally[r.at(x, y)];
        }
    }
    for (int k = 0; k < kNumClasses; ++k) EXPECT_EQ(h.counts[static_cast<std::size_t>(k)], tally[static_cast<std::size_t>(k)]);
}

TEST(Entropy, AnalyticCases) {
    EXPECT_NEAR(entropy_bits(from_counts({5, 5})), 1.0, 1e-9);
    EXPECT_EQ(entropy_bits(from_counts({0, 0, 7})), 0.0);
    EXPECT_NEAR(entropy_bits(from_counts(std::vector<std::uint64_t>(13, 3))), std::log2(13.0), 1e-9);
    EXPECT_THROW(entropy_bits(ClassHistogram{}), AnalysisError);
}

TEST(Entropy, BoundsPermutationAndCoarsening) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> count(0, 50);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint64_t> c(13);
        for (auto& v : c) v = static_cast<std::uint64_t>(count(rng));
        c[static_cast<std::size_t>(trial % 13)] += 1;
        const double h = entropy_bits(from_counts(c));
        EXPECT_GE(h, 0.0);
        EXPECT_LE(h, std::log2(13.0) + 1e-12);
        EXPECT_NEAR(h, oracle::entropy(std::vector<double>(c.begin(), c.end())), 1e-12);

        auto shuffled = c;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_NEAR(entropy_bits(from_counts(shuffled)), h, 1e-12);

        std::vector<std::uint64_t> merged{c[0], c[1], std::accumulate(c.begin() + 2, c.end(), std::uint64_t{0})};
        EXPECT_LE(entropy_bits(from_counts(merged)), h + 1e-12);
    }
}

TEST(Entropy, ZeroOnlyForSingleClass) {
    EXPECT_GT(entropy_bits(from_counts({1, 1000})), 0.0);
}

TEST(Entropy, FusedAtLeastSilhouetteWhenSkeletonInsideSilhouette) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto sil = oracle::random_mask(rng, {32, 22}, 0.5);
        auto parsing = oracle::random_parsing(rng, {32, 22}, 0.5);
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 22; ++x) {
                if (!sil.at(x, y)) parsing.at(x, y) = 0;
            }
        }
        ClassHistogram fused, base;
        fused.add(fuse_crf(parsing, sil));
        base.add(lift_silhouette(sil));
        EXPECT_GE(entropy_bits(fused), entropy_bits(base) - 1e-12);
    }
}

TEST(EntropyReportTest, ErrorsNameTheProblem) {
    const auto dir = std::filesystem::temp_directory_path() / "partskel_empty_report";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::vector<std::string> names{"silhouette"};
    try {
        entropy_report(dir, names);
        FAIL() << "expected ReportError";
    } catch (const ReportError& e) {
        EXPECT_NE(std::string(e.what()).find(dir.string()), std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST(EntropyReportTest, SilhouetteOnlyAndMissingFusedOutputs) {
    const auto dir = std::filesystem::temp_directory_path() / "partskel_entropy_report";
    BenchmarkSpec spec;
    spec.identities = 2;
    spec.clips_per_identity = 1;
    spec.frames = 4;
    spec.force = true;
    generate_benchmark(dir, spec);

    const std::vector<std::string> sil_only{"silhouette"};
    const auto report = entropy_report(dir, sil_only);
    ASSERT_EQ(report.strategies.size(), 1u);
    EXPECT_GE(report.strategies[0].entropy, 0.0);
    EXPECT_LE(report.strategies[0].entropy, 1.0);

    const std::vector<std::string> with_crf{"silhouette", "crf"};
    try {
        entropy_report(dir, with_crf);
        FAIL() << "expected ReportError";
    } catch (const ReportError& e) {
        EXPECT_NE(std::string(e.what()).find("crf"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("0.png"), std::string::npos);
    }
    std::filesystem::remove_all(dir);
}
