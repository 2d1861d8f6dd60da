#pragma once

// Randomized differential run of TierStore against a plain map of pages.

#include <cstdint>
#include <string>

namespace testing {

struct StoreFuzzConfig {
  std::uint64_t seed = 1;
  std::uint64_t ops = 10000;
  std::uint64_t capacity_bytes = 256 * 1024;
  std::uint64_t page_ids = 96;
  bool audit_every_op = true;
};

struct StoreFuzzResult {
  std::uint64_t ops = 0;
  std::uint64_t data_checks = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t audit_failures = 0;
  std::uint64_t compactions = 0;
  std::uint64_t capacity_rejections = 0;
  std::uint64_t relocations = 0;
  double max_fragmentation_after_compact = 0.0;
  std::string first_failure;

  bool ok() const { return mismatches == 0 && audit_failures == 0; }
};

StoreFuzzResult fuzz_tier_store(const StoreFuzzConfig& cfg);

} // namespace testing
