#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cxltier/tier_store.hpp"

namespace cxltier {

struct FileRatio {
  std::string name;
  std::uint64_t logical_bytes = 0;
  std::uint64_t physical_bytes = 0;
  double ratio = 0.0;
};

struct CorpusReport {
  StorageMode mode = StorageMode::Cacheline;
  std::uint32_t page_size = 4096;
  std::vector<FileRatio> files; ///< sorted by name
  double geomean_ratio = 0.0;
};

/// Bytes the tier would charge for `data`, split into 4 KiB pages with the
/// last one zero-padded. Cacheline mode: size class + 2 per line. Block mode:
/// LZ4 output per `block_size` unit plus the per-page record.
std::uint64_t physical_footprint(std::span<const std::uint8_t> data, StorageMode mode, std::uint32_t block_size);

/// Ratio logical/physical for one in-memory dump. Throws ArgumentError if empty.
FileRatio measure(std::string name, std::span<const std::uint8_t> data, StorageMode mode, std::uint32_t block_size);

/// Measures every regular file directly inside `dir`. Throws ArgumentError for
/// a missing or empty corpus or an empty file, std::runtime_error naming a
/// file that cannot be read.
CorpusReport bench_compress(const std::filesystem::path& dir, std::uint32_t page_size, StorageMode mode);

/// Geometric mean; order independent. Throws ArgumentError if empty.
double geomean(std::span<const double> values);

} // namespace cxltier
