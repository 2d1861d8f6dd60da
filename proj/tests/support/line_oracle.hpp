#pragma once

// Exhaustive line-scheme evaluator used as the test oracle for the line
// codec. Written against the scheme definitions only: it tries every scheme
// with wide (128-bit) arithmetic and keeps the smallest payload.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace oracle {

using Line = std::array<std::uint8_t, 64>;

/// Scheme indices in tie-break order: Z R B8D1 B4D1 B8D2 B8D4 RAW.
inline constexpr int kSchemes = 7;
inline constexpr std::array<int, kSchemes> kPayloadBytes = {0, 8, 16, 24, 24, 40, 64};
inline constexpr std::array<const char*, kSchemes> kNames = {"Z", "R", "B8D1", "B4D1", "B8D2", "B8D4", "RAW"};

struct Encoding {
  int scheme = 6;
  std::vector<std::uint8_t> payload;
};

/// Payload for `scheme`, or nothing if the scheme cannot represent `line`.
std::optional<std::vector<std::uint8_t>> encode_with(int scheme, const Line& line);

/// Minimum-payload scheme with the fixed tie-break.
Encoding best(const Line& line);

/// Inverse of encode_with for a known-good payload.
Line decode(int scheme, const std::vector<std::uint8_t>& payload);

} // namespace oracle
