#pragma once

/// \file tensor_io.hpp
/// \brief The portable `PSTN1` tensor container.
///
/// Layout (all integers little-endian):
///
///     offset 0   5 bytes   magic "PSTN1"
///     offset 5   u32       rank
///     offset 9   u32[rank] dims, outermost first
///     ...        u8        dtype tag (1 = u8, 2 = i32, 3 = f32, 4 = f64)
///     ...        payload   row-major elements, little-endian

#include <cstddef>
#include <cstring>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "partskel/labels.hpp"

namespace partskel {

enum class DType : std::uint8_t { U8 = 1, I32 = 2, F32 = 3, F64 = 4 };

std::size_t dtype_size(DType t);

struct Tensor {
    DType dtype = DType::U8;
    std::vector<std::uint32_t> dims;
    std::vector<std::byte> payload;  ///< native-endian element bytes

    [[nodiscard]] std::size_t element_count() const;

    template <typename T>
    static Tensor from_values(DType dtype, std::vector<std::uint32_t> dims, std::span<const T> values);

    template <typename T>
    [[nodiscard]] std::vector<T> values() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Throws ContainerError (offset 0) when a dim is zero or the payload size is inconsistent.
std::vector<std::byte> encode_tensor(const Tensor& tensor);
/// Throws ContainerError with the failing byte offset on bad magic, truncation or trailing bytes.
Tensor decode_tensor(std::span<const std::byte> bytes);

void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

Tensor to_tensor(const ChannelStack& stack);
/// Requires a rank-3 u8 tensor with binary values.
ChannelStack to_channel_stack(const Tensor& tensor);

template <typename T>
Tensor Tensor::from_values(DType dtype, std::vector<std::uint32_t> dims, std::span<const T> values) {
    Tensor t{dtype, std::move(dims), {}};
    const auto bytes = std::as_bytes(values);
    t.payload.assign(bytes.begin(), bytes.end());
    return t;
}

template <typename T>
std::vector<T> Tensor::values() const {
    std::vector<T> out(payload.size() / sizeof(T));
    std::memcpy(out.data(), payload.data(), out.size() * sizeof(T));
    return out;
}

}  // namespace partskel
