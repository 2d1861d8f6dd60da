#include "cxltier/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "cxltier/errors.hpp"
#include "cxltier/lz4_block.hpp"

namespace cxltier {

std::uint64_t physical_footprint(std::span<const std::uint8_t> data, StorageMode mode, std::uint32_t block_size) {
  if (!valid_block_size(block_size)) throw ArgumentError("page size must be 1024 or 4096");
  std::uint64_t physical = 0;
  Page page;
  for (std::size_t at = 0; at < data.size(); at += kPageBytes) {
    const std::size_t n = std::min(kPageBytes, data.size() - at);
    page.fill(0);
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(at), n, page.begin());

    if (mode == StorageMode::Cacheline) {
      for (std::size_t l = 0; l < kLinesPerPage; ++l) {
        CacheLine line;
        std::copy_n(page.begin() + static_cast<std::ptrdiff_t>(l * kLineBytes), kLineBytes, line.begin());
        physical += compress_line(line).size_class() + kLineMetadataBytes;
      }
    } else {
      for (std::size_t b = 0; b < kPageBytes; b += block_size) {
        physical += compress_block(std::span(page).subspan(b, block_size), block_size).compressed_len();
      }
      physical += kBlockRecordBytes;
    }
  }
  return physical;
}

FileRatio measure(std::string name, std::span<const std::uint8_t> data, StorageMode mode, std::uint32_t block_size) {
  if (data.empty()) throw ArgumentError("corpus file '" + name + "' is empty");
  FileRatio r;
  r.name = std::move(name);
  r.logical_bytes = data.size();
  r.physical_bytes = physical_footprint(data, mode, block_size);
  r.ratio = static_cast<double>(r.logical_bytes) / static_cast<double>(r.physical_bytes);
  return r;
}

double geomean(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("geometric mean of nothing");
  // Sorting makes the floating-point sum independent of input order.
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) logs.push_back(std::log(v));
  std::ranges::sort(logs);
  double sum = 0.0;
  for (double l : logs) sum += l;
  return std::exp(sum / static_cast<double>(logs.size()));
}

CorpusReport bench_compress(const std::filesystem::path& dir, std::uint32_t page_size, StorageMode mode) {
  namespace fs = std::filesystem;
  if (!valid_block_size(page_size)) throw ArgumentError("page size must be 1024 or 4096");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ArgumentError("corpus '" + dir.string() + "' is not a directory");

  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  if (files.empty()) throw ArgumentError("corpus '" + dir.string() + "' has no files");
  std::ranges::sort(files);

  CorpusReport report;
  report.mode = mode;
  report.page_size = page_size;
  std::vector<double> ratios;
  for (const fs::path& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read corpus file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw std::runtime_error("error reading corpus file " + path.string());
    report.files.push_back(measure(path.filename().string(), bytes, mode, page_size));
    ratios.push_back(report.files.back().ratio);
  }
  report.geomean_ratio = geomean(ratios);
  return report;
}

} // namespace cxltier
