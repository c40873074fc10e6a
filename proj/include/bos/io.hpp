#pragma once

#include <filesystem>

#include "bos/image.hpp"

namespace bos {

/// Loads an 8-bit grayscale/RGB PNG or a binary PGM (P5, maxval 255).
/// RGB is reduced to luma 0.299 R + 0.587 G + 0.114 B; values are divided by 255.
GrayImage load_image(const std::filesystem::path& path);

/// Loads an 8-bit PNG as RGB (gray inputs are replicated across channels).
RgbImage load_rgb_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG, or PGM when the extension is ".pgm".
/// Each intensity i is stored as round(i * 255) clamped to [0, 255].
void save_image(const GrayImage& img, const std::filesystem::path& path);
void save_image(const RgbImage& img, const std::filesystem::path& path);

/// Nonzero pixels of a grayscale image become members.
Mask load_mask(const std::filesystem::path& path);
/// Members are written as 255, others as 0.
void save_mask(const Mask& mask, const std::filesystem::path& path);

/// Quantizes an intensity to its 8-bit code.
std::uint8_t to_byte(float intensity) noexcept;

inline constexpr float kFlowMagic = 202021.25f;

/// Middlebury-style .flo: "PIEH" magic, int32 width, int32 height, then
/// interleaved float32 (u, v) in row-major order, all little-endian.
/// Sparse fields additionally get a sidecar (see sidecar_path).
void write_flow(const DisplacementField& field, const std::filesystem::path& path);

/// Inverse of write_flow. Picks up grid_step and origin from the sidecar when present.
DisplacementField read_flow(const std::filesystem::path& path);

/// "field.flo" -> "field.grid.txt". Contents: grid_step=<int>\norigin_x=<int>\norigin_y=<int>\n
std::filesystem::path sidecar_path(const std::filesystem::path& flow_path);

}  // namespace bos
