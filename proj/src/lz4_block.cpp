#include "cxltier/lz4_block.hpp"

#include <array>
#include <cstring>
#include <string>

#include "cxltier/errors.hpp"

namespace cxltier {
namespace {

constexpr std::size_t kMinMatch = 4;
constexpr std::size_t kLastLiterals = 5;   // block always ends with >= 5 literals
constexpr std::size_t kMatchFindLimit = 12; // no match may start in the last 12 bytes
constexpr std::size_t kMaxOffset = 65535;
constexpr unsigned kHashLog = 12;

std::uint32_t read32(const std::uint8_t* p) noexcept {
  return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
         std::uint32_t{p[3]} << 24;
}

std::uint32_t hash4(std::uint32_t v) noexcept { return (v * 2654435761u) >> (32 - kHashLog); }

void put_length(std::vector<std::uint8_t>& out, std::size_t rest) {
  while (rest >= 255) {
    out.push_back(255);
    rest -= 255;
  }
  out.push_back(static_cast<std::uint8_t>(rest));
}

void emit_sequence(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> literals,
                   std::size_t offset, std::size_t match_len) {
  const std::size_t lit = literals.size();
  const std::size_t ml = match_len - kMinMatch;
  out.push_back(static_cast<std::uint8_t>((lit >= 15 ? 15 : lit) << 4 | (ml >= 15 ? 15 : ml)));
  if (lit >= 15) put_length(out, lit - 15);
  out.insert(out.end(), literals.begin(), literals.end());
  out.push_back(static_cast<std::uint8_t>(offset));
  out.push_back(static_cast<std::uint8_t>(offset >> 8));
  if (ml >= 15) put_length(out, ml - 15);
}

void emit_last_literals(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> literals) {
  const std::size_t lit = literals.size();
  out.push_back(static_cast<std::uint8_t>((lit >= 15 ? 15 : lit) << 4));
  if (lit >= 15) put_length(out, lit - 15);
  out.insert(out.end(), literals.begin(), literals.end());
}

std::vector<std::uint8_t> lz4_compress(std::span<const std::uint8_t> in) {
  std::vector<std::uint8_t> out;
  out.reserve(lz4_bound(in.size()));
  const std::size_t n = in.size();
  std::size_t anchor = 0;

  if (n > kMatchFindLimit) {
    const std::uint8_t* p = in.data();
    const std::size_t last_match_start = n - kMatchFindLimit;
    const std::size_t match_limit = n - kLastLiterals;
    std::array<std::int32_t, std::size_t{1} << kHashLog> table;
    table.fill(-1);

    std::size_t ip = 0;
    while (ip <= last_match_start) {
      const std::uint32_t seq = read32(p + ip);
      const std::uint32_t h = hash4(seq);
      const std::int32_t candidate = table[h];
      table[h] = static_cast<std::int32_t>(ip);
      if (candidate < 0 || ip - static_cast<std::size_t>(candidate) > kMaxOffset ||
          read32(p + candidate) != seq) {
        ++ip;
        continue;
      }

      auto ref = static_cast<std::size_t>(candidate);
      std::size_t len = kMinMatch;
      while (ip + len < match_limit && p[ip + len] == p[ref + len]) ++len;
      while (ip > anchor && ref > 0 && p[ip - 1] == p[ref - 1]) {
        --ip;
        --ref;
        ++len;
      }

      emit_sequence(out, in.subspan(anchor, ip - anchor), ip - ref, len);
      ip += len;
      anchor = ip;
      if (ip >= 2 && ip - 2 + 4 <= n) {
        table[hash4(read32(p + ip - 2))] = static_cast<std::int32_t>(ip - 2);
      }
    }
  }

  emit_last_literals(out, in.subspan(anchor));
  return out;
}

} // namespace

CompressedBlock compress_block(std::span<const std::uint8_t> data, std::uint32_t logical_len) {
  if (!valid_block_size(logical_len)) {
    throw ArgumentError("block logical length must be 1024 or 4096, got " + std::to_string(logical_len));
  }
  if (data.size() != logical_len) {
    throw ArgumentError("block input is " + std::to_string(data.size()) + " bytes, expected " +
                        std::to_string(logical_len));
  }
  return CompressedBlock{logical_len, lz4_compress(data)};
}

std::vector<std::uint8_t> lz4_decompress(std::span<const std::uint8_t> payload, std::size_t logical_len) {
  std::vector<std::uint8_t> out(logical_len);
  const std::size_t size = payload.size();
  const std::uint8_t* p = payload.data();
  std::size_t ip = 0;
  std::size_t op = 0;

  auto read_ext = [&](std::size_t base) {
    std::size_t len = base;
    std::uint8_t b;
    do {
      if (ip >= size) throw FormatError("truncated length extension", ip);
      b = p[ip++];
      len += b;
    } while (b == 255);
    return len;
  };

  for (;;) {
    if (ip >= size) throw FormatError("truncated block: expected sequence token", ip);
    const std::size_t token_at = ip;
    const std::uint8_t token = p[ip++];

    std::size_t lit = token >> 4;
    if (lit == 15) lit = read_ext(lit);
    if (lit > size - ip) throw FormatError("literal run past end of payload", token_at);
    if (lit > logical_len - op) throw FormatError("literal run overruns output", token_at);
    std::memcpy(out.data() + op, p + ip, lit);
    ip += lit;
    op += lit;

    if (ip == size) break;

    if (size - ip < 2) throw FormatError("truncated match offset", ip);
    const std::size_t offset = std::size_t{p[ip]} | std::size_t{p[ip + 1]} << 8;
    if (offset == 0) throw FormatError("zero match offset", ip);
    if (offset > op) throw FormatError("match offset before start of output", ip);
    ip += 2;

    std::size_t match_len = token & 15u;
    if (match_len == 15) match_len = read_ext(match_len);
    match_len += kMinMatch;
    if (match_len > logical_len - op) throw FormatError("match overruns output", token_at);
    const std::size_t from = op - offset;
    for (std::size_t i = 0; i < match_len; ++i) out[op + i] = out[from + i];
    op += match_len;
  }

  if (op != logical_len) {
    throw FormatError("block decoded to " + std::to_string(op) + " bytes, expected " +
                          std::to_string(logical_len),
                      ip);
  }
  return out;
}

} // namespace cxltier
