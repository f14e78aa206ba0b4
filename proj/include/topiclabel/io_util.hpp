#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace topiclabel {

// FNV-1a 64-bit over raw bytes, continuing from `state`.
inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = kFnvOffsetBasis) {
  for (char c : bytes) {
    state ^= static_cast<std::uint8_t>(c);
    state *= kFnvPrime;
  }
  return state;
}

std::string to_hex(std::uint64_t value);

/// RFC 3986 percent-encoding; unreserved characters pass through.
std::string percent_encode(std::string_view text);

/// Reads a whole file; throws Error(Io) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void atomic_write_file(const std::filesystem::path& path, std::string_view contents);

/// Reads a non-empty environment variable.
std::string env_or(const char* name, std::string fallback);

}  // namespace topiclabel
