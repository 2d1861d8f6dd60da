#pragma once

// LZ4 block format (no frame, no checksum) for page/block-granular storage.
// Output is interoperable with the reference liblz4 block API.

#include <cstdint>
#include <span>
#include <vector>

namespace cxltier {

struct CompressedBlock {
  std::uint32_t logical_len = 0;
  std::vector<std::uint8_t> payload;

  std::size_t compressed_len() const noexcept { return payload.size(); }
};

/// Worst-case LZ4 output size for `n` input bytes.
constexpr std::size_t lz4_bound(std::size_t n) noexcept { return n + n / 255 + 16; }

/// True for the supported block sizes (1 KiB and 4 KiB).
constexpr bool valid_block_size(std::size_t n) noexcept { return n == 1024 || n == 4096; }

/// Greedy single-pass LZ4 compressor. Throws ArgumentError unless
/// data.size() == logical_len and logical_len is 1024 or 4096.
CompressedBlock compress_block(std::span<const std::uint8_t> data, std::uint32_t logical_len);

/// Decodes any LZ4 block payload into exactly `logical_len` bytes. Throws
/// FormatError (with the payload offset) on truncation, bad match offsets,
/// output overrun or underrun; nothing is returned on error.
std::vector<std::uint8_t> lz4_decompress(std::span<const std::uint8_t> payload, std::size_t logical_len);

/// Decompresses `b` to exactly b.logical_len bytes.
inline std::vector<std::uint8_t> decompress_block(const CompressedBlock& b) {
  return lz4_decompress(b.payload, b.logical_len);
}

} // namespace cxltier
