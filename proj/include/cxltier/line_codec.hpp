#pragma once

// Cache-line codec: compresses each 64-byte line independently with a small
// fixed set of zero / repeat / base+delta schemes so a single line can be
// decoded without touching the rest of its page.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string_view>

namespace cxltier {

inline constexpr std::size_t kLineBytes = 64;
inline constexpr std::size_t kPageBytes = 4096;
inline constexpr std::size_t kLinesPerPage = kPageBytes / kLineBytes;

/// Per-line translation metadata (scheme tag + size class) charged to capacity.
inline constexpr std::uint64_t kLineMetadataBytes = 2;

using CacheLine = std::array<std::uint8_t, kLineBytes>;

/// Scheme tags, listed in tie-break order.
enum class Scheme : std::uint8_t {
  Z,     ///< all 64 bytes zero
  R,     ///< one 8-byte word repeated 8 times
  B8D1,  ///< 8-byte base, eight signed 1-byte deltas
  B4D1,  ///< 4-byte base, sixteen signed 1-byte deltas, 4 bytes zero padding
  B8D2,  ///< 8-byte base, eight signed 2-byte deltas
  B8D4,  ///< 8-byte base, eight signed 4-byte deltas
  RAW,   ///< stored verbatim
};

inline constexpr std::array<Scheme, 7> kAllSchemes = {
    Scheme::Z, Scheme::R, Scheme::B8D1, Scheme::B4D1, Scheme::B8D2, Scheme::B8D4, Scheme::RAW};

/// Payload length fixed by each scheme.
constexpr std::size_t payload_size(Scheme s) noexcept {
  switch (s) {
    case Scheme::Z: return 0;
    case Scheme::R: return 8;
    case Scheme::B8D1: return 16;
    case Scheme::B4D1: return 24;
    case Scheme::B8D2: return 24;
    case Scheme::B8D4: return 40;
    case Scheme::RAW: return 64;
  }
  return 64;
}

/// Smallest 8-byte size class holding `n` bytes.
constexpr std::uint8_t size_class_for(std::size_t n) noexcept {
  return static_cast<std::uint8_t>((n + 7) / 8 * 8);
}

std::string_view scheme_name(Scheme s) noexcept;
/// Throws ArgumentError for an unknown name.
Scheme scheme_from_name(std::string_view name);

/// Encoded form of one cache line. Payload bytes live inline; no allocation.
class CompressedLine {
public:
  CompressedLine() = default;

  /// Builds a line from raw parts without checking them against the scheme;
  /// decompress_line() validates. Throws ArgumentError if payload > 64 bytes.
  static CompressedLine from_parts(Scheme scheme, std::uint8_t size_class,
                                   std::span<const std::uint8_t> payload);

  Scheme scheme() const noexcept { return scheme_; }
  std::uint8_t size_class() const noexcept { return size_class_; }
  std::span<const std::uint8_t> payload() const noexcept { return {bytes_.data(), length_}; }

  friend bool operator==(const CompressedLine& a, const CompressedLine& b) noexcept {
    return a.scheme_ == b.scheme_ && a.size_class_ == b.size_class_ &&
           std::ranges::equal(a.payload(), b.payload());
  }

private:
  friend CompressedLine compress_line(const CacheLine& line) noexcept;

  Scheme scheme_ = Scheme::Z;
  std::uint8_t size_class_ = 0;
  std::uint8_t length_ = 0;
  std::array<std::uint8_t, kLineBytes> bytes_{};
};

/// Picks the applicable scheme with the smallest payload (ties broken by the
/// order of Scheme). Deltas are exact signed differences from the first word
/// of the line; a base+delta scheme applies only if every delta fits.
CompressedLine compress_line(const CacheLine& line) noexcept;

/// Inverse of compress_line(). Throws FormatError on a payload that does not
/// match its scheme (length, size class, padding, first delta, base overflow).
CacheLine decompress_line(const CompressedLine& c);

/// Whether `scheme` can encode `line` at all.
bool scheme_applies(Scheme scheme, const CacheLine& line) noexcept;

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num * b.den == b.num * a.den;
  }
};

/// 64 / (size_class + kLineMetadataBytes), reduced.
inline Rational line_ratio(const CompressedLine& c) noexcept {
  const std::uint64_t den = c.size_class() + kLineMetadataBytes;
  const std::uint64_t g = std::gcd(kLineBytes, den);
  return {kLineBytes / g, den / g};
}

} // namespace cxltier
