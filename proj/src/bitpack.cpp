#include "chsk/bitpack.hpp"

#include "chsk/error.hpp"

namespace chsk {

namespace {

void check_bits(std::uint32_t bits) {
  if (bits == 0 || bits > 16) {
    throw Error(ErrorKind::Config, "bits out of range");
  }
}

}  // namespace

std::size_t packed_size_bytes(std::size_t count, std::uint32_t bits) {
  return (count * bits + 7) / 8;
}

std::vector<std::uint8_t> pack_codes(std::span<const std::uint16_t> codes,
                                     std::uint32_t bits) {
  check_bits(bits);
  const std::uint32_t mask = (1U << bits) - 1;
  std::vector<std::uint8_t> out(packed_size_bytes(codes.size(), bits), 0);
  for (std::size_t k = 0; k < codes.size(); ++k) {
    const std::uint32_t code = codes[k];
    if (code > mask) {
      throw Error(ErrorKind::Data, "code out of range for bit width");
    }
    const std::size_t pos = k * bits;
    const std::size_t byte = pos >> 3;
    const unsigned shift = pos & 7;
    // A shifted code spans at most 23 bits, i.e. three bytes. Bytes past
    // the first are only touched when the stream actually extends there.
    const std::uint32_t v = code << shift;
    out[byte] |= static_cast<std::uint8_t>(v & 0xFF);
    if (shift + bits > 8) {
      out[byte + 1] |= static_cast<std::uint8_t>((v >> 8) & 0xFF);
    }
    if (shift + bits > 16) {
      out[byte + 2] |= static_cast<std::uint8_t>((v >> 16) & 0xFF);
    }
  }
  return out;
}

std::vector<std::uint16_t> unpack_codes(std::span<const std::uint8_t> bytes,
                                        std::size_t count, std::uint32_t bits,
                                        bool strict_pad) {
  check_bits(bits);
  if (bytes.size() != packed_size_bytes(count, bits)) {
    throw Error(ErrorKind::Format, "packed length mismatch");
  }
  std::vector<std::uint16_t> codes(count);
  for (std::size_t k = 0; k < count; ++k) {
    codes[k] = packed_code_at(bytes, k, bits);
  }
  if (strict_pad && (count * bits) % 8 != 0) {
    const unsigned used = (count * bits) % 8;
    if (bytes.back() >> used) {
      throw Error(ErrorKind::Format, "nonzero pad bits");
    }
  }
  return codes;
}

std::uint16_t packed_code_at(std::span<const std::uint8_t> bytes,
                             std::size_t k, std::uint32_t bits) noexcept {
  const std::size_t pos = k * bits;
  const std::size_t byte = pos >> 3;
  const unsigned shift = pos & 7;
  std::uint32_t window = bytes[byte];
  if (byte + 1 < bytes.size()) {
    window |= static_cast<std::uint32_t>(bytes[byte + 1]) << 8;
  }
  if (byte + 2 < bytes.size()) {
    window |= static_cast<std::uint32_t>(bytes[byte + 2]) << 16;
  }
  const std::uint32_t mask = (1U << bits) - 1;
  return static_cast<std::uint16_t>((window >> shift) & mask);
}

}  // namespace chsk
