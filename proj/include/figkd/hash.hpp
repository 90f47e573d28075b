#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>

namespace figkd {

// FNV-1a over a byte stream; used to fingerprint checkpoints in reports.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::span<const std::uint8_t> bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

}  // namespace figkd
