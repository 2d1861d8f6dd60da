#pragma once

// Synthetic page contents standing in for application memory dumps.
//
// Each profile is a per-line mixture; lines are drawn independently:
//
//   ZERO_HEAVY  60% zero, 10% repeated word, 15% 8-byte ints with small deltas,
//               15% random bytes
//   INTEGER     20% zero, 10% repeated word, 30% 8-byte ints (|delta| <= 100),
//               20% 4-byte ints (|delta| <= 100), 10% 8-byte ints
//               (|delta| <= 30000), 10% random bytes
//   TEXTLIKE    45% zero, 15% one repeated printable character, 40% printable
//               ASCII
//   RANDOM      100% random bytes

#include <cstdint>
#include <string_view>
#include <vector>

#include "cxltier/line_codec.hpp"
#include "cxltier/rng.hpp"
#include "cxltier/tier_store.hpp"

namespace cxltier {

enum class ContentProfile : std::uint8_t { ZeroHeavy, Integer, Textlike, Random };

inline constexpr std::array<ContentProfile, 4> kAllProfiles = {
    ContentProfile::ZeroHeavy, ContentProfile::Integer, ContentProfile::Textlike, ContentProfile::Random};

std::string_view profile_name(ContentProfile p) noexcept;
/// Accepts the upper-case names ("ZERO_HEAVY", ...), case-insensitive. Throws ArgumentError.
ContentProfile profile_from_name(std::string_view name);

CacheLine generate_line(ContentProfile profile, Xoshiro256& rng);
Page generate_page(ContentProfile profile, Xoshiro256& rng);

/// `pages` pages of `profile` content from a stream seeded with `seed`.
std::vector<std::uint8_t> generate_corpus(ContentProfile profile, std::size_t pages, std::uint64_t seed);

} // namespace cxltier
