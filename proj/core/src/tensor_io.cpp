#include "partskel/tensor_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <iterator>
#include <string>

#include "partskel/error.hpp"

namespace partskel {

namespace {

constexpr std::array<std::byte, 5> kMagic = {std::byte{'P'}, std::byte{'S'}, std::byte{'T'}, std::byte{'N'},
                                             std::byte{'1'}};

std::byte* put_u32(std::byte* out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) *out++ = static_cast<std::byte>((v >> (8 * i)) & 0xffu);
    return out;
}

std::uint32_t get_u32(std::span<const std::byte> in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(in[offset + static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

// Payload bytes are stored little-endian; swap element bytes on big-endian hosts.
void to_little_endian(std::span<std::byte> payload, std::size_t elem) {
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i + elem <= payload.size(); i += elem) {
            std::reverse(payload.begin() + static_cast<std::ptrdiff_t>(i),
                         payload.begin() + static_cast<std::ptrdiff_t>(i + elem));
        }
    } else {
        (void)payload;
        (void)elem;
    }
}

bool known_dtype(std::uint8_t tag) { return tag >= 1 && tag <= 4; }

}  // namespace

std::size_t dtype_size(DType t) {
    switch (t) {
        case DType::U8: return 1;
        case DType::I32: return 4;
        case DType::F32: return 4;
        case DType::F64: return 8;
    }
    throw ValidationError("unknown dtype tag");
}

std::size_t Tensor::element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

std::vector<std::byte> encode_tensor(const Tensor& tensor) {
    if (tensor.dims.empty()) throw ContainerError("tensor rank must be at least 1", 0);
    if (std::find(tensor.dims.begin(), tensor.dims.end(), 0u) != tensor.dims.end()) {
        throw ContainerError("tensor dims must each be >= 1", 0);
    }
    if (!known_dtype(static_cast<std::uint8_t>(tensor.dtype))) throw ContainerError("unknown dtype tag", 0);
    const std::size_t elem = dtype_size(tensor.dtype);
    if (tensor.payload.size() != tensor.element_count() * elem) {
        throw ContainerError("payload size does not match dims", 0);
    }
    const std::size_t start = kMagic.size() + 4 * (1 + tensor.dims.size()) + 1;
    std::vector<std::byte> out(start + tensor.payload.size());
    std::byte* p = std::copy(kMagic.begin(), kMagic.end(), out.data());
    p = put_u32(p, static_cast<std::uint32_t>(tensor.dims.size()));
    for (auto d : tensor.dims) p = put_u32(p, d);
    *p = static_cast<std::byte>(tensor.dtype);
    std::copy(tensor.payload.begin(), tensor.payload.end(), out.begin() + static_cast<std::ptrdiff_t>(start));
    to_little_endian(std::span<std::byte>(out).subspan(start), elem);
    return out;
}

Tensor decode_tensor(std::span<const std::byte> bytes) {
    if (bytes.size() < kMagic.size()) throw ContainerError("truncated magic", bytes.size());
    for (std::size_t i = 0; i < kMagic.size(); ++i) {
        if (bytes[i] != kMagic[i]) throw ContainerError("bad magic, expected PSTN1", i);
    }
    std::size_t off = kMagic.size();
    if (bytes.size() < off + 4) throw ContainerError("truncated rank", bytes.size());
    const std::uint32_t rank = get_u32(bytes, off);
    if (rank == 0) throw ContainerError("rank must be at least 1", off);
    off += 4;

    Tensor t;
    t.dims.reserve(std::min<std::uint32_t>(rank, 16));
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        if (bytes.size() < off + 4) throw ContainerError("truncated dims", bytes.size());
        const std::uint32_t d = get_u32(bytes, off);
        if (d == 0) throw ContainerError("zero-size dim", off);
        if (count > bytes.size() / d) throw ContainerError("dims exceed container size", off);
        count *= d;
        t.dims.push_back(d);
        off += 4;
    }
    if (bytes.size() < off + 1) throw ContainerError("truncated dtype tag", bytes.size());
    const auto tag = std::to_integer<std::uint8_t>(bytes[off]);
    if (!known_dtype(tag)) throw ContainerError("unknown dtype tag " + std::to_string(tag), off);
    t.dtype = static_cast<DType>(tag);
    off += 1;

    const std::size_t elem = dtype_size(t.dtype);
    const std::size_t need = count * elem;
    const std::size_t have = bytes.size() - off;
    if (have < need) throw ContainerError("truncated payload", bytes.size());
    if (have > need) throw ContainerError("trailing bytes after payload", off + need);
    t.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off), bytes.end());
    to_little_endian(t.payload, elem);
    return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
    const auto bytes = encode_tensor(tensor);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write tensor " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write on " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tensor " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto bytes = std::as_bytes(std::span<const char>(raw));
    try {
        return decode_tensor(bytes);
    } catch (const ContainerError& e) {
        throw ContainerError(path.string() + ": " + e.reason(), e.offset());
    }
}

Tensor to_tensor(const ChannelStack& stack) {
    return Tensor::from_values<std::uint8_t>(
        DType::U8,
        {static_cast<std::uint32_t>(stack.channels()), static_cast<std::uint32_t>(stack.height()),
         static_cast<std::uint32_t>(stack.width())},
        stack.data());
}

ChannelStack to_channel_stack(const Tensor& tensor) {
    if (tensor.dtype != DType::U8 || tensor.dims.size() != 3) {
        throw ValidationError("channel stack tensor must be rank-3 u8");
    }
    auto values = tensor.values<std::uint8_t>();
    return ChannelStack(static_cast<int>(tensor.dims[0]),
                        Size{static_cast<int>(tensor.dims[1]), static_cast<int>(tensor.dims[2])}, std::move(values));
}

}  // namespace partskel
