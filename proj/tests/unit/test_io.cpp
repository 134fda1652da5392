#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "partskel/error.hpp"
#include "partskel/image_io.hpp"
#include "partskel/renderer.hpp"
#include "partskel/tensor_io.hpp"

using namespace partskel;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    const auto p = fs::temp_directory_path() / "partskel_io";
    fs::create_directories(p);
    return p;
}

std::vector<std::byte> bytes_of(std::initializer_list<int> v) {
    std::vector<std::byte> out;
    for (int x : v) out.push_back(static_cast<std::byte>(x));
    return out;
}

}  // namespace

TEST(Png, LabelRoundTrip) {
    std::mt19937_64 rng(1);
    const auto r = oracle::random_parsing(rng, {128, 88});
    write_label_png(scratch() / "labels.png", r);
    EXPECT_EQ(read_label_png(scratch() / "labels.png"), r);
}

TEST(Png, MaskRoundTripAndThreshold) {
    std::mt19937_64 rng(2);
    const auto m = oracle::random_mask(rng, {40, 30});
    write_mask_png(scratch() / "mask.png", m);
    EXPECT_EQ(read_mask_png(scratch() / "mask.png"), m);
}

TEST(Png, LabelReaderRejectsOutOfRangeValues) {
    SilhouetteMask m({4, 4});
    m.set(0, 0, true);
    write_mask_png(scratch() / "bright.png", m);
    EXPECT_THROW(read_label_png(scratch() / "bright.png"), ValidationError);
}

TEST(Png, RgbRoundTrip) {
    std::mt19937_64 rng(3);
    const auto img = colorize(oracle::random_parsing(rng, {16, 12}), default_palette());
    write_rgb_png(scratch() / "rgb.png", img);
    EXPECT_EQ(read_rgb_png(scratch() / "rgb.png"), img);
}

TEST(Png, MissingOrCorruptFileIsIoError) {
    EXPECT_THROW(read_label_png(scratch() / "absent.png"), IoError);
    std::ofstream(scratch() / "junk.png") << "not a png";
    EXPECT_THROW(read_mask_png(scratch() / "junk.png"), IoError);
}

TEST(Tensor, StackRoundTripsBitIdentically) {
    std::mt19937_64 rng(4);
    ChannelStack s(13, kTargetSize);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int c = 0; c < 13; ++c)
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 44; ++x) s.at(c, x, y) = static_cast<std::uint8_t>(bit(rng));
    write_tensor(scratch() / "stack.tns", to_tensor(s));
    EXPECT_EQ(to_channel_stack(read_tensor(scratch() / "stack.tns")), s);
}

TEST(Tensor, LayoutIsLittleEndian) {
    const std::vector<std::int32_t> v{1, -2};
    const auto t = Tensor::from_values<std::int32_t>(DType::I32, {2}, v);
    const auto bytes = encode_tensor(t);
    const auto expected = bytes_of({'P', 'S', 'T', 'N', '1', 1, 0, 0, 0, 2, 0, 0, 0, 2, 1, 0, 0, 0, 0xfe, 0xff, 0xff, 0xff});
    EXPECT_EQ(bytes, expected);
}

TEST(Tensor, RandomTensorsRoundTrip) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> rank(1, 4), dim(1, 6), tag(1, 4);
        std::vector<std::uint32_t> dims(static_cast<std::size_t>(rank(rng)));
        std::size_t n = 1;
        for (auto& d : dims) n *= (d = static_cast<std::uint32_t>(dim(rng)));
        Tensor t;
        switch (tag(rng)) {
            case 1: {
                std::vector<std::uint8_t> v(n);
                for (auto& x : v) x = static_cast<std::uint8_t>(rng());
                t = Tensor::from_values<std::uint8_t>(DType::U8, dims, v);
                break;
            }
            case 2: {
                std::vector<std::int32_t> v(n);
                for (auto& x : v) x = static_cast<std::int32_t>(rng());
                t = Tensor::from_values<std::int32_t>(DType::I32, dims, v);
                break;
            }
            case 3: {
                std::vector<float> v(n);
                for (auto& x : v) x = std::uniform_real_distribution<float>(-1e6f, 1e6f)(rng);
                t = Tensor::from_values<float>(DType::F32, dims, v);
                break;
            }
            default: {
                std::vector<double> v(n);
                for (auto& x : v) x = std::uniform_real_distribution<double>(-1e9, 1e9)(rng);
                t = Tensor::from_values<double>(DType::F64, dims, v);
            }
        }
        write_tensor(scratch() / "r.tns", t);
        EXPECT_EQ(read_tensor(scratch() / "r.tns"), t) << "seed " << seed;
    }
}

TEST(Tensor, ZeroDimRejectedAtWrite) {
    Tensor t{DType::U8, {13, 0, 44}, {}};
    EXPECT_THROW(write_tensor(scratch() / "zero.tns", t), ContainerError);
}

TEST(Tensor, DecodeErrorsCarryOffsets) {
    const auto good = encode_tensor(Tensor::from_values<std::uint8_t>(DType::U8, {3}, std::vector<std::uint8_t>{1, 2, 3}));
    auto bad_magic = good;
    bad_magic[2] = std::byte{'X'};
    try {
        decode_tensor(bad_magic);
        FAIL();
    } catch (const ContainerError& e) {
        EXPECT_EQ(e.offset(), 2u);
    }
    const std::vector<std::byte> truncated(good.begin(), good.end() - 1);
    try {
        decode_tensor(truncated);
        FAIL();
    } catch (const ContainerError& e) {
        EXPECT_EQ(e.offset(), truncated.size());
    }
    auto trailing = good;
    trailing.push_back(std::byte{0});
    try {
        decode_tensor(trailing);
        FAIL();
    } catch (const ContainerError& e) {
        EXPECT_EQ(e.offset(), good.size());
    }
    EXPECT_THROW(decode_tensor(std::vector<std::byte>(3)), ContainerError);
}
