#include "dentseg/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

namespace dentseg {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Header tokens of a netpbm file, skipping whitespace and '#' comments.
class PnmHeader {
 public:
  explicit PnmHeader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    return out;
  }

  long number(const char* what) {
    const std::string t = token();
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(c); })) {
      throw ImageIoError(std::string("malformed PGM header: bad ") + what);
    }
    return std::stol(t);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() const { return pos_ + 1; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

GrayImage load_pgm(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  PnmHeader header(bytes);
  if (header.token() != "P5") throw ImageIoError(path.string() + ": only binary PGM (P5) is supported");
  const long w = header.number("width");
  const long h = header.number("height");
  const long maxval = header.number("maxval");
  if (w <= 0 || h <= 0) throw ImageIoError(path.string() + ": zero image dimension");
  if (maxval <= 0 || maxval > 255) {
    throw ImageIoError(path.string() + ": only 8-bit PGM (maxval <= 255) is supported");
  }
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const std::size_t offset = header.raster_offset();
  if (offset > bytes.size() || bytes.size() - offset < count) {
    throw ImageIoError(path.string() + ": truncated raster");
  }
  std::vector<double> pixels(count);
  const double scale = 255.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = bytes[offset + i];
    pixels[i] = maxval == 255 ? v : std::min(v, static_cast<double>(maxval)) * scale;
  }
  return GrayImage(static_cast<std::size_t>(w), static_cast<std::size_t>(h), std::move(pixels));
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<char> raster(img.size());
  auto px = img.pixels();
  for (std::size_t i = 0; i < raster.size(); ++i) raster[i] = static_cast<char>(quantize(px[i]));
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw ImageIoError("write failed for " + path.string());
}

struct PngImageGuard {
  png_image* image;
  ~PngImageGuard() { png_image_free(image); }
};

GrayImage load_png(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  PngImageGuard guard{&image};
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw ImageIoError(path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    throw ImageIoError(path.string() + ": 16-bit PNG is not supported");
  }
  if (image.width == 0 || image.height == 0) throw ImageIoError(path.string() + ": zero image dimension");

  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> raster(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raster.data(), 0, nullptr)) {
    throw ImageIoError(path.string() + ": " + image.message);
  }

  const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
  std::vector<double> pixels(count);
  if (color) {
    for (std::size_t i = 0; i < count; ++i) {
      pixels[i] = 0.299 * raster[3 * i] + 0.587 * raster[3 * i + 1] + 0.114 * raster[3 * i + 2];
    }
  } else {
    std::copy(raster.begin(), raster.end(), pixels.begin());
  }
  return GrayImage(image.width, image.height, std::move(pixels));
}

void write_png(const std::filesystem::path& path, std::uint32_t width, std::uint32_t height,
               std::uint32_t format, const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = width;
  image.height = height;
  image.format = format;
  const std::string name = path.string();
  if (!png_image_write_to_file(&image, name.c_str(), 0, data, 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw ImageIoError("cannot write " + name + ": " + msg);
  }
}

}  // namespace

std::uint8_t quantize(double value) {
  const double clamped = std::clamp(round_half_up(value), 0.0, 255.0);
  return static_cast<std::uint8_t>(clamped);
}

GrayImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ImageIoError("no such file: " + path.string());
  const auto bytes = read_all(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return load_pgm(path);
  static constexpr std::uint8_t kPngMagic[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::equal(std::begin(kPngMagic), std::end(kPngMagic), bytes.begin())) {
    return load_png(path);
  }
  throw ImageIoError(path.string() + ": unsupported image format (expected P5 PGM or PNG)");
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".pgm") {
    save_pgm(img, path);
  } else if (ext == ".png") {
    std::vector<std::uint8_t> raster(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), raster.begin(), quantize);
    write_png(path, static_cast<std::uint32_t>(img.width()), static_cast<std::uint32_t>(img.height()),
              PNG_FORMAT_GRAY, raster.data());
  } else {
    throw ImageIoError("unsupported output extension '" + ext + "' (use .pgm or .png)");
  }
}

void save_rgb_png(const RgbImage& img, const std::filesystem::path& path) {
  if (img.data.size() != img.width * img.height * 3) throw ImageIoError("RGB buffer size mismatch");
  write_png(path, static_cast<std::uint32_t>(img.width), static_cast<std::uint32_t>(img.height),
            PNG_FORMAT_RGB, img.data.data());
}

}  // namespace dentseg
