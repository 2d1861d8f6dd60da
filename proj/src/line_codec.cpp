#include "cxltier/line_codec.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "cxltier/errors.hpp"

namespace cxltier {
namespace {

// Little-endian loads/stores independent of host byte order.
template <std::size_t Width>
std::uint64_t load_le(const std::uint8_t* p) noexcept {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < Width; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

template <std::size_t Width>
void store_le(std::uint8_t* p, std::uint64_t v) noexcept {
  for (std::size_t i = 0; i < Width; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

template <std::size_t Width>
std::int64_t sign_extend(std::uint64_t v) noexcept {
  if constexpr (Width == 8) {
    return static_cast<std::int64_t>(v);
  } else {
    constexpr unsigned shift = 64 - 8 * Width;
    return static_cast<std::int64_t>(v << shift) >> shift;
  }
}

template <std::size_t Width>
constexpr std::int64_t min_signed() noexcept {
  if constexpr (Width == 8) return INT64_MIN;
  else return -(std::int64_t{1} << (8 * Width - 1));
}

template <std::size_t Width>
constexpr std::int64_t max_signed() noexcept {
  if constexpr (Width == 8) return INT64_MAX;
  else return (std::int64_t{1} << (8 * Width - 1)) - 1;
}

// Tries base+delta encoding; writes the payload into `out` on success.
template <std::size_t BaseW, std::size_t DeltaW>
bool encode_base_delta(const CacheLine& line, std::uint8_t* out) noexcept {
  constexpr std::size_t words = kLineBytes / BaseW;
  const std::int64_t base = sign_extend<BaseW>(load_le<BaseW>(line.data()));
  std::array<std::int64_t, words> deltas{};
  for (std::size_t i = 0; i < words; ++i) {
    const std::int64_t w = sign_extend<BaseW>(load_le<BaseW>(line.data() + i * BaseW));
    std::int64_t d;
    if (__builtin_sub_overflow(w, base, &d)) return false;
    if (d < min_signed<DeltaW>() || d > max_signed<DeltaW>()) return false;
    deltas[i] = d;
  }
  if (out != nullptr) {
    std::memcpy(out, line.data(), BaseW);
    for (std::size_t i = 0; i < words; ++i) {
      store_le<DeltaW>(out + BaseW + i * DeltaW, static_cast<std::uint64_t>(deltas[i]));
    }
  }
  return true;
}

bool try_encode(Scheme s, const CacheLine& line, std::uint8_t* out) noexcept {
  switch (s) {
    case Scheme::Z:
      return std::ranges::all_of(line, [](std::uint8_t b) { return b == 0; });
    case Scheme::R:
      for (std::size_t i = 8; i < kLineBytes; i += 8) {
        if (std::memcmp(line.data(), line.data() + i, 8) != 0) return false;
      }
      if (out != nullptr) std::memcpy(out, line.data(), 8);
      return true;
    case Scheme::B8D1: return encode_base_delta<8, 1>(line, out);
    case Scheme::B4D1: return encode_base_delta<4, 1>(line, out);
    case Scheme::B8D2: return encode_base_delta<8, 2>(line, out);
    case Scheme::B8D4: return encode_base_delta<8, 4>(line, out);
    case Scheme::RAW:
      if (out != nullptr) std::memcpy(out, line.data(), kLineBytes);
      return true;
  }
  return false;
}

template <std::size_t BaseW, std::size_t DeltaW>
void decode_base_delta(std::span<const std::uint8_t> payload, CacheLine& line) {
  constexpr std::size_t words = kLineBytes / BaseW;
  const std::int64_t base = sign_extend<BaseW>(load_le<BaseW>(payload.data()));
  for (std::size_t i = 0; i < words; ++i) {
    const std::size_t at = BaseW + i * DeltaW;
    const std::int64_t d = sign_extend<DeltaW>(load_le<DeltaW>(payload.data() + at));
    if (i == 0 && d != 0) throw FormatError("first delta must be zero", at);
    std::int64_t w;
    if (__builtin_add_overflow(base, d, &w) || w < min_signed<BaseW>() || w > max_signed<BaseW>()) {
      throw FormatError("delta overflows base width", at);
    }
    store_le<BaseW>(line.data() + i * BaseW, static_cast<std::uint64_t>(w));
  }
  const std::size_t used = BaseW + words * DeltaW;
  for (std::size_t i = used; i < payload.size(); ++i) {
    if (payload[i] != 0) throw FormatError("nonzero padding", i);
  }
}

} // namespace

std::string_view scheme_name(Scheme s) noexcept {
  switch (s) {
    case Scheme::Z: return "Z";
    case Scheme::R: return "R";
    case Scheme::B8D1: return "B8D1";
    case Scheme::B4D1: return "B4D1";
    case Scheme::B8D2: return "B8D2";
    case Scheme::B8D4: return "B8D4";
    case Scheme::RAW: return "RAW";
  }
  return "?";
}

Scheme scheme_from_name(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (scheme_name(s) == name) return s;
  }
  throw ArgumentError("unknown scheme '" + std::string(name) + "'");
}

CompressedLine CompressedLine::from_parts(Scheme scheme, std::uint8_t size_class,
                                          std::span<const std::uint8_t> payload) {
  if (payload.size() > kLineBytes) throw ArgumentError("payload longer than a cache line");
  CompressedLine c;
  c.scheme_ = scheme;
  c.size_class_ = size_class;
  c.length_ = static_cast<std::uint8_t>(payload.size());
  std::ranges::copy(payload, c.bytes_.begin());
  return c;
}

bool scheme_applies(Scheme scheme, const CacheLine& line) noexcept {
  return try_encode(scheme, line, nullptr);
}

CompressedLine compress_line(const CacheLine& line) noexcept {
  // kAllSchemes is in tie-break order and payload sizes are nondecreasing
  // along it, so the first applicable scheme is the minimum. Only a successful
  // encode writes bytes, so the B4D1 padding stays zero.
  CompressedLine c;
  for (Scheme s : kAllSchemes) {
    if (try_encode(s, line, c.bytes_.data())) {
      c.scheme_ = s;
      c.length_ = static_cast<std::uint8_t>(payload_size(s));
      c.size_class_ = size_class_for(c.length_);
      return c;
    }
  }
  return c; // unreachable: RAW always applies
}

CacheLine decompress_line(const CompressedLine& c) {
  const auto payload = c.payload();
  const std::size_t expected = payload_size(c.scheme());
  if (payload.size() != expected) {
    throw FormatError("payload length " + std::to_string(payload.size()) + " does not match scheme " +
                          std::string(scheme_name(c.scheme())),
                      payload.size());
  }
  if (c.size_class() != size_class_for(expected)) {
    throw FormatError("size class " + std::to_string(c.size_class()) + " does not match scheme " +
                          std::string(scheme_name(c.scheme())),
                      0);
  }

  CacheLine line{};
  switch (c.scheme()) {
    case Scheme::Z: break;
    case Scheme::R:
      for (std::size_t i = 0; i < kLineBytes; i += 8) std::memcpy(line.data() + i, payload.data(), 8);
      break;
    case Scheme::B8D1: decode_base_delta<8, 1>(payload, line); break;
    case Scheme::B4D1: decode_base_delta<4, 1>(payload, line); break;
    case Scheme::B8D2: decode_base_delta<8, 2>(payload, line); break;
    case Scheme::B8D4: decode_base_delta<8, 4>(payload, line); break;
    case Scheme::RAW: std::memcpy(line.data(), payload.data(), kLineBytes); break;
  }
  return line;
}

} // namespace cxltier
