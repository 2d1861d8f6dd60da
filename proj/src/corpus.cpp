#include "cxltier/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <string>

#include "cxltier/errors.hpp"

namespace cxltier {

std::string_view profile_name(ContentProfile p) noexcept {
  switch (p) {
    case ContentProfile::ZeroHeavy: return "ZERO_HEAVY";
    case ContentProfile::Integer: return "INTEGER";
    case ContentProfile::Textlike: return "TEXTLIKE";
    case ContentProfile::Random: return "RANDOM";
  }
  return "?";
}

ContentProfile profile_from_name(std::string_view name) {
  std::string upper(name);
  std::ranges::transform(upper, upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (ContentProfile p : kAllProfiles) {
    if (profile_name(p) == upper) return p;
  }
  throw ArgumentError("unknown content profile '" + std::string(name) + "'");
}

namespace {

enum class LineKind { Zero, Repeated, Int8Small, Int4Small, Int8Wide, Random, RepeatedChar, Text };

struct Weighted {
  LineKind kind;
  unsigned percent;
};

constexpr Weighted kZeroHeavy[] = {{LineKind::Zero, 60},
                                   {LineKind::Repeated, 10},
                                   {LineKind::Int8Small, 15},
                                   {LineKind::Random, 15}};
constexpr Weighted kInteger[] = {{LineKind::Zero, 20},      {LineKind::Repeated, 10}, {LineKind::Int8Small, 30},
                                 {LineKind::Int4Small, 20}, {LineKind::Int8Wide, 10}, {LineKind::Random, 10}};
constexpr Weighted kTextlike[] = {{LineKind::Zero, 45}, {LineKind::RepeatedChar, 15}, {LineKind::Text, 40}};
constexpr Weighted kRandom[] = {{LineKind::Random, 100}};

std::span<const Weighted> mixture(ContentProfile p) {
  switch (p) {
    case ContentProfile::ZeroHeavy: return kZeroHeavy;
    case ContentProfile::Integer: return kInteger;
    case ContentProfile::Textlike: return kTextlike;
    case ContentProfile::Random: return kRandom;
  }
  return kRandom;
}

template <typename T>
void store_words(CacheLine& line, std::span<const T> words) {
  std::size_t at = 0;
  for (T w : words) {
    for (std::size_t b = 0; b < sizeof(T); ++b) line[at++] = static_cast<std::uint8_t>(w >> (8 * b));
  }
}

void int8_deltas(CacheLine& line, Xoshiro256& rng, std::int64_t max_delta) {
  const std::int64_t base = rng.between(1, std::int64_t{1} << 40);
  std::array<std::uint64_t, 8> words;
  words[0] = static_cast<std::uint64_t>(base);
  for (std::size_t i = 1; i < words.size(); ++i) {
    words[i] = static_cast<std::uint64_t>(base + rng.between(-max_delta, max_delta));
  }
  store_words<std::uint64_t>(line, words);
}

void int4_deltas(CacheLine& line, Xoshiro256& rng) {
  const std::int64_t base = rng.between(1 << 20, 1 << 30);
  std::array<std::uint32_t, 16> words;
  words[0] = static_cast<std::uint32_t>(base);
  for (std::size_t i = 1; i < words.size(); ++i) words[i] = static_cast<std::uint32_t>(base + rng.between(-100, 100));
  store_words<std::uint32_t>(line, words);
}

std::uint8_t printable(Xoshiro256& rng) { return static_cast<std::uint8_t>(rng.between(0x20, 0x7e)); }

} // namespace

CacheLine generate_line(ContentProfile profile, Xoshiro256& rng) {
  const auto pick = rng.below(100);
  LineKind kind = LineKind::Random;
  std::uint64_t acc = 0;
  for (const Weighted& w : mixture(profile)) {
    acc += w.percent;
    if (pick < acc) {
      kind = w.kind;
      break;
    }
  }

  CacheLine line{};
  switch (kind) {
    case LineKind::Zero: break;
    case LineKind::Repeated: {
      const std::uint64_t word = rng();
      std::array<std::uint64_t, 8> words;
      words.fill(word);
      store_words<std::uint64_t>(line, words);
      break;
    }
    case LineKind::Int8Small: int8_deltas(line, rng, 100); break;
    case LineKind::Int4Small: int4_deltas(line, rng); break;
    case LineKind::Int8Wide: int8_deltas(line, rng, 30000); break;
    case LineKind::Random: rng.fill(line); break;
    case LineKind::RepeatedChar: line.fill(printable(rng)); break;
    case LineKind::Text:
      for (auto& b : line) b = printable(rng);
      break;
  }
  return line;
}

Page generate_page(ContentProfile profile, Xoshiro256& rng) {
  Page page;
  for (std::size_t i = 0; i < kLinesPerPage; ++i) {
    const CacheLine line = generate_line(profile, rng);
    std::memcpy(page.data() + i * kLineBytes, line.data(), kLineBytes);
  }
  return page;
}

std::vector<std::uint8_t> generate_corpus(ContentProfile profile, std::size_t pages, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<std::uint8_t> out;
  out.reserve(pages * kPageBytes);
  for (std::size_t i = 0; i < pages; ++i) {
    const Page page = generate_page(profile, rng);
    out.insert(out.end(), page.begin(), page.end());
  }
  return out;
}

} // namespace cxltier
