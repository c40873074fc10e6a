#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bos/optics.hpp"

namespace bos::cli {

inline constexpr std::string_view kToolName = "bostk";
inline constexpr std::string_view kVersion = "0.1.0";

/// Runs one invocation; args excludes the program name. Returns the exit code.
/// Failures print a single "error: ..." line on `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Length in meters from a number or a number with an m/cm/mm/um suffix.
double parse_length(std::string_view text);

struct GeometryFile {
  BosGeometry geometry;
  OpticsConstants constants;
  double thickness_z = 0.05;
};

/// JSON object with required keys d1_m, d2_m, f_m, pixel_pitch_m,
/// bg_scale_m_per_px, thickness_z_m and optional n0, gladstone_dale_m3_per_kg.
/// Length values are numbers in meters or strings with an m/cm/mm/um suffix.
GeometryFile load_geometry(const std::filesystem::path& path);

/// Reproducibility record written next to a command's outputs. Output paths
/// are stored relative to the manifest's directory when they lie beneath it.
class Manifest {
 public:
  Manifest(std::filesystem::path file, std::vector<std::string> command);

  void add_config(const std::filesystem::path& path);
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void stage_done(std::string name);
  void stage_failed(std::string name, std::string message);
  /// Wall-clock duration is only recorded when timing was requested, so that
  /// repeated runs produce identical bytes.
  void set_duration_ms(std::optional<double> ms) { duration_ms_ = ms; }

  /// Rewrites the file, hashing every input and output present on disk.
  void write() const;

  const std::filesystem::path& path() const noexcept { return file_; }

 private:
  std::filesystem::path file_;
  std::vector<std::string> command_;
  std::vector<std::filesystem::path> configs_;
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
  std::vector<std::string> stages_done_;
  std::optional<std::pair<std::string, std::string>> failure_;
  std::optional<double> duration_ms_;
};

}  // namespace bos::cli
