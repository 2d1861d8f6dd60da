#include "support/reference_lz4.hpp"

#ifdef CXLTIER_HAVE_REFERENCE_LZ4
extern "C" {
int LZ4_versionNumber(void);
int LZ4_compressBound(int input_size);
int LZ4_compress_default(const char* src, char* dst, int src_size, int dst_capacity);
int LZ4_decompress_safe(const char* src, char* dst, int compressed_size, int dst_capacity);
}
#endif

namespace reference_lz4 {

#ifdef CXLTIER_HAVE_REFERENCE_LZ4

bool available() { return true; }

int version() { return LZ4_versionNumber(); }

std::optional<std::vector<std::uint8_t>> compress(std::span<const std::uint8_t> in) {
  const int n = static_cast<int>(in.size());
  std::vector<std::uint8_t> out(static_cast<std::size_t>(LZ4_compressBound(n)));
  const int written = LZ4_compress_default(reinterpret_cast<const char*>(in.data()),
                                           reinterpret_cast<char*>(out.data()), n, static_cast<int>(out.size()));
  if (written <= 0) return std::nullopt;
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::optional<std::vector<std::uint8_t>> decompress(std::span<const std::uint8_t> payload, std::size_t logical_len) {
  std::vector<std::uint8_t> out(logical_len);
  const int got = LZ4_decompress_safe(reinterpret_cast<const char*>(payload.data()),
                                      reinterpret_cast<char*>(out.data()), static_cast<int>(payload.size()),
                                      static_cast<int>(out.size()));
  if (got < 0 || static_cast<std::size_t>(got) != logical_len) return std::nullopt;
  return out;
}

#else

bool available() { return false; }
int version() { return 0; }
std::optional<std::vector<std::uint8_t>> compress(std::span<const std::uint8_t>) { return std::nullopt; }
std::optional<std::vector<std::uint8_t>> decompress(std::span<const std::uint8_t>, std::size_t) { return std::nullopt; }

#endif

} // namespace reference_lz4
