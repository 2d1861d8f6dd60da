#include "support/line_oracle.hpp"

#include <stdexcept>

namespace oracle {
namespace {

__extension__ typedef __int128 wide;
__extension__ typedef unsigned __int128 uwide;

wide signed_word(const std::uint8_t* p, int bytes) {
  uwide u = 0;
  for (int i = bytes - 1; i >= 0; --i) u = (u << 8) | p[i];
  const wide half = wide{1} << (8 * bytes - 1);
  wide v = static_cast<wide>(u);
  return v >= half ? v - 2 * half : v;
}

bool fits(wide v, int bytes) {
  const wide half = wide{1} << (8 * bytes - 1);
  return v >= -half && v < half;
}

void put(std::vector<std::uint8_t>& out, wide v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v >> (8 * i)) & 0xff));
}

std::optional<std::vector<std::uint8_t>> base_delta(const Line& line, int word, int delta) {
  const int n = 64 / word;
  const wide base = signed_word(line.data(), word);
  std::vector<std::uint8_t> out(line.begin(), line.begin() + word);
  for (int i = 0; i < n; ++i) {
    const wide d = signed_word(line.data() + i * word, word) - base;
    if (!fits(d, delta)) return std::nullopt;
    put(out, d, delta);
  }
  return out;
}

} // namespace

std::optional<std::vector<std::uint8_t>> encode_with(int scheme, const Line& line) {
  std::optional<std::vector<std::uint8_t>> out;
  switch (scheme) {
    case 0:
      for (std::uint8_t b : line)
        if (b != 0) return std::nullopt;
      return std::vector<std::uint8_t>{};
    case 1:
      for (int i = 8; i < 64; ++i)
        if (line[i] != line[i % 8]) return std::nullopt;
      return std::vector<std::uint8_t>(line.begin(), line.begin() + 8);
    case 2: return base_delta(line, 8, 1);
    case 3:
      out = base_delta(line, 4, 1);
      if (out) out->resize(24, 0);
      return out;
    case 4: return base_delta(line, 8, 2);
    case 5: return base_delta(line, 8, 4);
    case 6: return std::vector<std::uint8_t>(line.begin(), line.end());
  }
  throw std::invalid_argument("scheme index");
}

Encoding best(const Line& line) {
  Encoding e;
  int best_size = 1 << 30;
  for (int s = 0; s < kSchemes; ++s) {
    auto payload = encode_with(s, line);
    if (payload && kPayloadBytes[s] < best_size) {
      best_size = kPayloadBytes[s];
      e.scheme = s;
      e.payload = std::move(*payload);
    }
  }
  return e;
}

Line decode(int scheme, const std::vector<std::uint8_t>& p) {
  Line line{};
  auto emit_words = [&](int word, int delta) {
    const wide base = signed_word(p.data(), word);
    for (int i = 0; i < 64 / word; ++i) {
      const wide v = base + signed_word(p.data() + word + i * delta, delta);
      for (int b = 0; b < word; ++b) line[i * word + b] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(v >> (8 * b)) & 0xff);
    }
  };
  switch (scheme) {
    case 0: break;
    case 1:
      for (int i = 0; i < 64; ++i) line[i] = p[i % 8];
      break;
    case 2: emit_words(8, 1); break;
    case 3: emit_words(4, 1); break;
    case 4: emit_words(8, 2); break;
    case 5: emit_words(8, 4); break;
    case 6: std::copy(p.begin(), p.end(), line.begin()); break;
  }
  return line;
}

} // namespace oracle
