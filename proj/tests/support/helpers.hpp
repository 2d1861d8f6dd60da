#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cxltier/line_codec.hpp"
#include "cxltier/rng.hpp"
#include "cxltier/tier_store.hpp"

namespace testing {

cxltier::Page seeded_page(std::uint64_t seed);
cxltier::CacheLine seeded_line(std::uint64_t seed);

/// Lines biased toward every scheme and toward delta-width boundaries.
cxltier::CacheLine structured_line(cxltier::Xoshiro256& rng);
/// A page of structured lines, or with probability 1/4 a page of random bytes.
cxltier::Page structured_page(cxltier::Xoshiro256& rng);

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path);

struct GoldenLine {
  std::size_t index = 0;
  std::string scheme;
  unsigned size_class = 0;
  std::vector<std::uint8_t> payload;
  cxltier::CacheLine line{};
};
std::vector<GoldenLine> load_golden_lines();

struct GoldenBlock {
  std::string name;
  std::uint32_t logical_len = 0;
  std::vector<std::uint8_t> raw;
  std::vector<std::uint8_t> payload;
};
std::vector<GoldenBlock> load_golden_blocks();

std::vector<std::uint8_t> from_hex(const std::string& hex);

/// Runs the CLI with `args` (shell-quoted by the caller), capturing stdout.
/// Returns the exit status.
int run_cli(const std::string& args, std::string* out = nullptr);

/// Fresh empty directory under the system temp dir.
std::filesystem::path fresh_dir(const std::string& name);

std::string slurp(const std::filesystem::path& path);

} // namespace testing
