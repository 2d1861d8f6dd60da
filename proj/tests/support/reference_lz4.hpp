#pragma once

// Thin wrapper over the system LZ4 library, the reference implementation for
// interop checks. All calls return nothing when the library was not found at
// configure time.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace reference_lz4 {

bool available();
/// Version number as reported by the library, 0 if unavailable.
int version();
std::optional<std::vector<std::uint8_t>> compress(std::span<const std::uint8_t> in);
/// Decoded bytes, or nothing if unavailable or the payload is rejected.
std::optional<std::vector<std::uint8_t>> decompress(std::span<const std::uint8_t> payload, std::size_t logical_len);

} // namespace reference_lz4
