#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace bos {

/// 64-bit FNV-1a content hash.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);

}  // namespace bos
