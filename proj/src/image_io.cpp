#include "mindful/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "mindful/csv.hpp"

namespace mindful {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what != nullptr) *what = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

double parse_coordinate(const std::string& field, const std::string& path) {
  try {
    std::size_t used = 0;
    double v = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw FormatError("annotations " + path + ": bad coordinate '" + field + "'");
  }
}

}  // namespace

ImageBuffer load_png(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw FormatError("png: cannot open " + path);
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError("png: not a PNG file: " + path);

  std::string error;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (png == nullptr) throw FormatError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError("png: out of memory");
  }

  std::vector<unsigned char> pixels;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("png: " + path + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3)
    throw FormatError("png: unsupported channel layout in " + path);
  std::vector<float> data(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i)
    data[i] = static_cast<float>(pixels[i]) / 255.0f;
  return ImageBuffer(static_cast<int>(width), static_cast<int>(height), channels,
                     std::move(data));
}

void save_png(const std::string& path, const ImageBuffer& image) {
  if (image.empty()) throw ContractViolation("png: cannot save an empty image");
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw FormatError("png: cannot create " + path);

  std::string error;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_fn, png_warning_fn);
  if (png == nullptr) throw FormatError("png: out of memory");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw FormatError("png: out of memory");
  }

  const auto w = static_cast<std::size_t>(image.width());
  const auto c = static_cast<std::size_t>(image.channels());
  std::vector<unsigned char> bytes(image.data().size());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<unsigned char>(std::lround(image.data()[i] * 255.0f));
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height()));
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = bytes.data() + y * w * c;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FormatError("png: " + path + ": " + error);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8,
               image.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

AnnotationSet load_annotations(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw FormatError("annotations " + path + ": missing header");
  const csv::Row expected = {"image_id", "class_name", "x_min", "y_min", "x_max", "y_max"};
  if (rows.front() != expected)
    throw FormatError("annotations " + path +
                      ": header must be image_id,class_name,x_min,y_min,x_max,y_max");
  AnnotationSet out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 6)
      throw FormatError("annotations " + path + ": row " + std::to_string(r) +
                        " has " + std::to_string(row.size()) + " fields");
    Annotation a;
    a.image_id = row[0];
    a.class_id = row[1];
    a.box.x_min = static_cast<int>(std::floor(parse_coordinate(row[2], path)));
    a.box.y_min = static_cast<int>(std::floor(parse_coordinate(row[3], path)));
    a.box.x_max = static_cast<int>(std::ceil(parse_coordinate(row[4], path)));
    a.box.y_max = static_cast<int>(std::ceil(parse_coordinate(row[5], path)));
    if (a.box.x_min >= a.box.x_max || a.box.y_min >= a.box.y_max || a.box.x_min < 0 ||
        a.box.y_min < 0)
      throw FormatError("annotations " + path + ": degenerate box on row " +
                        std::to_string(r));
    out.entries.push_back(std::move(a));
  }
  return out;
}

void save_annotations(const std::string& path, const AnnotationSet& ann) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("annotations: cannot create " + path);
  csv::write_row(out, {"image_id", "class_name", "x_min", "y_min", "x_max", "y_max"});
  for (const auto& a : ann.entries)
    csv::write_row(out, {a.image_id, a.class_id, std::to_string(a.box.x_min),
                         std::to_string(a.box.y_min), std::to_string(a.box.x_max),
                         std::to_string(a.box.y_max)});
}

}  // namespace mindful
