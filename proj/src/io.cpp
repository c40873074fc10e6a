#include "bos/io.hpp"

#include <png.h>

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bos {
namespace fs = std::filesystem;

namespace {

struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3
  std::vector<std::uint8_t> bytes;
};

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return ext;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path.string() + ": cannot open file");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(path.string() + ": cannot open for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError(path.string() + ": write failed");
  }
}

// Binary PGM: "P5" <ws> width <ws> height <ws> maxval <single ws> payload; '#' comments allowed.
RawImage decode_pgm(const std::vector<std::uint8_t>& file, const fs::path& path) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < file.size()) {
      if (file[pos] == '#') {
        while (pos < file.size() && file[pos] != '\n') ++pos;
      } else if (std::isspace(file[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&](const char* what) {
    skip_space();
    long value = 0;
    std::size_t digits = 0;
    while (pos < file.size() && std::isdigit(file[pos]) && digits < 9) {
      value = value * 10 + (file[pos] - '0');
      ++pos;
      ++digits;
    }
    if (digits == 0) {
      throw IoError(path.string() + ": corrupt PGM header (bad " + what + ")");
    }
    return static_cast<int>(value);
  };

  if (file.size() < 2 || file[0] != 'P' || file[1] != '5') {
    throw IoError(path.string() + ": unsupported format (expected PNG or binary PGM P5)");
  }
  pos = 2;
  RawImage raw;
  raw.width = read_int("width");
  raw.height = read_int("height");
  const int maxval = read_int("maxval");
  if (raw.width < 1 || raw.height < 1) {
    throw IoError(path.string() + ": corrupt PGM header (non-positive dimensions)");
  }
  if (maxval != 255) {
    throw IoError(path.string() + ": unsupported PGM maxval " + std::to_string(maxval) +
                  " (only 255)");
  }
  if (pos >= file.size() || !std::isspace(file[pos])) {
    throw IoError(path.string() + ": corrupt PGM header");
  }
  ++pos;
  const std::size_t count = static_cast<std::size_t>(raw.width) * raw.height;
  if (file.size() - pos < count) {
    throw IoError(path.string() + ": truncated PGM payload");
  }
  raw.channels = 1;
  raw.bytes.assign(file.begin() + static_cast<std::ptrdiff_t>(pos),
                   file.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return raw;
}

RawImage decode_png(const std::vector<std::uint8_t>& file, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, file.data(), file.size())) {
    throw IoError(path.string() + ": corrupt PNG (" + image.message + ")");
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw IoError(path.string() + ": unsupported PNG bit depth (only 8-bit)");
  }
  RawImage raw;
  raw.width = static_cast<int>(image.width);
  raw.height = static_cast<int>(image.height);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  raw.channels = color ? 3 : 1;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  raw.bytes.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.bytes.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw IoError(path.string() + ": corrupt PNG (" + message + ")");
  }
  return raw;
}

RawImage decode(const fs::path& path) {
  if (!fs::exists(path)) {
    throw IoError(path.string() + ": file not found");
  }
  const std::vector<std::uint8_t> file = read_file(path);
  static constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G',
                                                                '\r', '\n', 0x1a, '\n'};
  if (file.size() >= 8 && std::equal(kPngSignature.begin(), kPngSignature.end(), file.begin())) {
    return decode_png(file, path);
  }
  return decode_pgm(file, path);
}

void encode_png(const fs::path& path, int width, int height, bool color,
                const std::vector<std::uint8_t>& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, bytes.data(), 0, nullptr)) {
    throw IoError(path.string() + ": PNG encoding failed (" + image.message + ")");
  }
  std::vector<std::uint8_t> encoded(size);
  if (!png_image_write_to_memory(&image, encoded.data(), &size, 0, bytes.data(), 0, nullptr)) {
    throw IoError(path.string() + ": PNG encoding failed (" + image.message + ")");
  }
  encoded.resize(size);
  write_file(path, encoded);
}

void check_parent(const fs::path& path) {
  const fs::path parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw IoError(path.string() + ": parent directory does not exist");
  }
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::uint8_t to_byte(float intensity) noexcept {
  const double scaled = std::round(static_cast<double>(intensity) * 255.0);
  if (!(scaled > 0.0)) {
    return 0;
  }
  return static_cast<std::uint8_t>(std::min(scaled, 255.0));
}

GrayImage load_image(const fs::path& path) {
  const RawImage raw = decode(path);
  GrayImage img(raw.width, raw.height);
  auto out = img.pixels();
  if (raw.channels == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = static_cast<float>(raw.bytes[i] / 255.0);
    }
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double luma = 0.299 * raw.bytes[3 * i] + 0.587 * raw.bytes[3 * i + 1] +
                          0.114 * raw.bytes[3 * i + 2];
      out[i] = static_cast<float>(std::clamp(luma / 255.0, 0.0, 1.0));
    }
  }
  return img;
}

RgbImage load_rgb_image(const fs::path& path) {
  const RawImage raw = decode(path);
  RgbImage img(raw.width, raw.height);
  auto out = img.data();
  for (std::size_t i = 0; i < static_cast<std::size_t>(raw.width) * raw.height; ++i) {
    for (int c = 0; c < 3; ++c) {
      const std::uint8_t b = raw.channels == 1 ? raw.bytes[i] : raw.bytes[3 * i + c];
      out[3 * i + c] = static_cast<float>(b / 255.0);
    }
  }
  return img;
}

void save_image(const GrayImage& img, const fs::path& path) {
  check_parent(path);
  std::vector<std::uint8_t> bytes(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), bytes.begin(), to_byte);
  if (lower_extension(path) == ".pgm") {
    const std::string header =
        "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> file(header.begin(), header.end());
    file.insert(file.end(), bytes.begin(), bytes.end());
    write_file(path, file);
    return;
  }
  encode_png(path, img.width(), img.height(), false, bytes);
}

void save_image(const RgbImage& img, const fs::path& path) {
  check_parent(path);
  if (lower_extension(path) == ".pgm") {
    throw IoError(path.string() + ": PGM output is grayscale only");
  }
  std::vector<std::uint8_t> bytes(img.data().size());
  std::transform(img.data().begin(), img.data().end(), bytes.begin(), to_byte);
  encode_png(path, img.width(), img.height(), true, bytes);
}

Mask load_mask(const fs::path& path) {
  const GrayImage img = load_image(path);
  Mask mask(img.width(), img.height(), 0);
  for (std::size_t i = 0; i < img.size(); ++i) {
    mask.pixels()[i] = img.pixels()[i] > 0.f ? 1 : 0;
  }
  return mask;
}

void save_mask(const Mask& mask, const fs::path& path) {
  GrayImage img(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    img.pixels()[i] = mask.pixels()[i] ? 1.f : 0.f;
  }
  save_image(img, path);
}

fs::path sidecar_path(const fs::path& flow_path) {
  fs::path p = flow_path;
  p.replace_extension(".grid.txt");
  return p;
}

void write_flow(const DisplacementField& field, const fs::path& path) {
  field.validate();
  check_parent(path);
  std::vector<std::uint8_t> bytes;
  bytes.reserve(12 + 8 * field.u.size());
  put_u32(bytes, std::bit_cast<std::uint32_t>(kFlowMagic));
  put_u32(bytes, static_cast<std::uint32_t>(field.width()));
  put_u32(bytes, static_cast<std::uint32_t>(field.height()));
  for (std::size_t i = 0; i < field.u.size(); ++i) {
    put_u32(bytes, std::bit_cast<std::uint32_t>(field.u.pixels()[i]));
    put_u32(bytes, std::bit_cast<std::uint32_t>(field.v.pixels()[i]));
  }
  write_file(path, bytes);

  const fs::path sidecar = sidecar_path(path);
  if (field.dense()) {
    std::error_code ec;
    fs::remove(sidecar, ec);
    return;
  }
  std::ofstream out(sidecar, std::ios::binary | std::ios::trunc);
  out << "grid_step=" << field.grid_step << "\norigin_x=" << field.origin_x
      << "\norigin_y=" << field.origin_y << "\n";
  if (!out) {
    throw IoError(sidecar.string() + ": write failed");
  }
}

DisplacementField read_flow(const fs::path& path) {
  if (!fs::exists(path)) {
    throw IoError(path.string() + ": file not found");
  }
  const std::vector<std::uint8_t> file = read_file(path);
  if (file.size() < 12) {
    throw IoError(path.string() + ": truncated flow header");
  }
  if (std::bit_cast<float>(get_u32(file.data())) != kFlowMagic) {
    throw IoError(path.string() + ": wrong magic number (expected PIEH / 202021.25)");
  }
  const auto width = static_cast<std::int32_t>(get_u32(file.data() + 4));
  const auto height = static_cast<std::int32_t>(get_u32(file.data() + 8));
  if (width < 1 || height < 1) {
    throw IoError(path.string() + ": non-positive flow dimensions " + std::to_string(width) +
                  "x" + std::to_string(height));
  }
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if ((file.size() - 12) / 8 < count) {
    throw IoError(path.string() + ": truncated flow payload");
  }
  DisplacementField field(width, height);
  const std::uint8_t* p = file.data() + 12;
  for (std::size_t i = 0; i < count; ++i, p += 8) {
    field.u.pixels()[i] = std::bit_cast<float>(get_u32(p));
    field.v.pixels()[i] = std::bit_cast<float>(get_u32(p + 4));
  }

  const fs::path sidecar = sidecar_path(path);
  if (fs::exists(sidecar)) {
    std::ifstream in(sidecar);
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        continue;
      }
      const std::string key = line.substr(0, eq);
      int value = 0;
      try {
        value = std::stoi(line.substr(eq + 1));
      } catch (const std::exception&) {
        throw IoError(sidecar.string() + ": malformed value for " + key);
      }
      if (key == "grid_step") {
        field.grid_step = value;
      } else if (key == "origin_x") {
        field.origin_x = value;
      } else if (key == "origin_y") {
        field.origin_y = value;
      }
    }
    if (field.grid_step < 1) {
      throw IoError(sidecar.string() + ": grid_step must be >= 1");
    }
  }
  return field;
}

}  // namespace bos
