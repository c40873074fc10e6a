#include "bos/hash.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "bos/error.hpp"

namespace bos {
namespace {

constexpr std::uint64_t kOffsetBasis = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kPrime = 0x100000001b3ULL;

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = kOffsetBasis;
  for (std::uint8_t b : bytes) {
    h = (h ^ b) * kPrime;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path.string() + ": cannot open file for hashing");
  }
  std::uint64_t h = kOffsetBasis;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h = (h ^ static_cast<std::uint8_t>(buf[static_cast<std::size_t>(i)])) * kPrime;
    }
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(value));
  return buf.data();
}

}  // namespace bos
