#include "support/helpers.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace testing {

using namespace cxltier;

Page seeded_page(std::uint64_t seed) {
  Page p;
  Xoshiro256 rng(seed);
  rng.fill(p);
  return p;
}

CacheLine seeded_line(std::uint64_t seed) {
  CacheLine l;
  Xoshiro256 rng(seed);
  rng.fill(l);
  return l;
}

namespace {

template <typename T>
void put_words(CacheLine& line, const std::vector<T>& words) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t b = 0; b < sizeof(T); ++b) line[i * sizeof(T) + b] = static_cast<std::uint8_t>(words[i] >> (8 * b));
  }
}

std::int64_t delta_near(Xoshiro256& rng, int bytes) {
  // Mostly in range, sometimes exactly at or one past a signed limit.
  const std::int64_t hi = (std::int64_t{1} << (8 * bytes - 1)) - 1;
  switch (rng.below(6)) {
    case 0: return hi;
    case 1: return -hi - 1;
    case 2: return hi + 1;
    case 3: return -hi - 2;
    default: return rng.between(-hi - 1, hi);
  }
}

} // namespace

CacheLine structured_line(Xoshiro256& rng) {
  CacheLine line{};
  switch (rng.below(8)) {
    case 0: break;
    case 1: {
      std::vector<std::uint64_t> w(8, rng());
      put_words(line, w);
      break;
    }
    case 2:
    case 3:
    case 4: {
      static constexpr int kWidths[] = {1, 2, 4};
      const int width = kWidths[rng.below(3)];
      std::uint64_t base = rng();
      if (rng.chance(0.3)) base = rng.chance(0.5) ? 0x7fffffffffffff00ull + rng.below(256) : 0x8000000000000000ull + rng.below(256);
      std::vector<std::uint64_t> w(8);
      w[0] = base;
      for (int i = 1; i < 8; ++i) w[i] = base + static_cast<std::uint64_t>(delta_near(rng, width));
      put_words(line, w);
      break;
    }
    case 5: {
      std::uint32_t base = static_cast<std::uint32_t>(rng());
      if (rng.chance(0.3)) base = 0x7fffff00u + static_cast<std::uint32_t>(rng.below(256));
      std::vector<std::uint32_t> w(16);
      w[0] = base;
      for (int i = 1; i < 16; ++i) w[i] = base + static_cast<std::uint32_t>(delta_near(rng, 1));
      put_words(line, w);
      break;
    }
    case 6: {
      for (int i = 0; i < 4; ++i) line[rng.below(64)] = static_cast<std::uint8_t>(rng());
      break;
    }
    default: rng.fill(line); break;
  }
  return line;
}

Page structured_page(Xoshiro256& rng) {
  Page p{};
  if (rng.below(4) == 0) {
    rng.fill(p);
    return p;
  }
  for (std::size_t i = 0; i < kLinesPerPage; ++i) {
    const CacheLine l = structured_line(rng);
    std::memcpy(p.data() + i * kLineBytes, l.data(), kLineBytes);
  }
  return p;
}

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string slurp(const std::filesystem::path& path) {
  const auto bytes = read_binary(path);
  return {bytes.begin(), bytes.end()};
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

} // namespace

std::vector<GoldenLine> load_golden_lines() {
  const std::filesystem::path dir = std::filesystem::path(CXLTIER_GOLDEN_DIR) / "lines";
  const auto bytes = read_binary(dir / "lines.bin");
  std::vector<GoldenLine> out;
  for (const auto& row : read_csv(dir / "index.csv")) {
    GoldenLine g;
    g.index = std::stoul(row.at(0));
    g.scheme = row.at(1);
    g.size_class = static_cast<unsigned>(std::stoul(row.at(2)));
    g.payload = from_hex(row.size() > 3 ? row[3] : "");
    std::memcpy(g.line.data(), bytes.data() + g.index * kLineBytes, kLineBytes);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GoldenBlock> load_golden_blocks() {
  const std::filesystem::path dir = std::filesystem::path(CXLTIER_GOLDEN_DIR) / "lz4";
  std::vector<GoldenBlock> out;
  for (const auto& row : read_csv(dir / "index.csv")) {
    GoldenBlock g;
    g.name = row.at(0);
    g.logical_len = static_cast<std::uint32_t>(std::stoul(row.at(1)));
    g.raw = read_binary(dir / (g.name + ".raw"));
    g.payload = read_binary(dir / (g.name + ".lz4"));
    if (g.payload.size() != std::stoul(row.at(2))) throw std::runtime_error("golden index mismatch for " + g.name);
    out.push_back(std::move(g));
  }
  return out;
}

int run_cli(const std::string& args, std::string* out) {
  const std::string cmd = std::string("'") + CXLTIER_CLI + "' " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed");
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, n);
  const int status = ::pclose(pipe);
  if (out != nullptr) *out = std::move(text);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("cxltier_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace testing
