#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace chsk {

// Fixed-width packing of b-bit codes into a little-endian bit stream.
// Code k occupies bit positions [k*b, (k+1)*b); bit position p lives in
// byte p/8 at in-byte bit p%8; within a code the least-significant bit
// comes first. Pad bits past count*b are zero. This layout is normative
// for the sketch file format: b=8 degenerates to plain bytes and b=4 to
// low-nibble-first.

std::size_t packed_size_bytes(std::size_t count, std::uint32_t bits);

std::vector<std::uint8_t> pack_codes(std::span<const std::uint16_t> codes,
                                     std::uint32_t bits);

// Exact inverse of pack_codes. Throws on a length mismatch with the
// declared (count, bits); with strict_pad also on nonzero pad bits, which
// file readers use to catch truncation or corruption early.
std::vector<std::uint16_t> unpack_codes(std::span<const std::uint8_t> bytes,
                                        std::size_t count, std::uint32_t bits,
                                        bool strict_pad = true);

// Reads code k out of a packed stream without unpacking the rest. No
// validation; the caller guarantees a well-formed stream.
std::uint16_t packed_code_at(std::span<const std::uint8_t> bytes,
                             std::size_t k, std::uint32_t bits) noexcept;

}  // namespace chsk
