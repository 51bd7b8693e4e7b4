#include "gvslam/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include "gvslam/errors.hpp"

namespace gvslam {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriter() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

void open_read(PngReader& reader, std::FILE* file, const std::string& path) {
  png_byte header[8];
  if (std::fread(header, 1, 8, file) != 8 || png_sig_cmp(header, 0, 8) != 0) {
    throw ParseError("not a PNG file: " + path);
  }
  reader.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  reader.info = png_create_info_struct(reader.png);
  if (!reader.png || !reader.info) throw IoError("libpng init failed");
  png_init_io(reader.png, file);
  png_set_sig_bytes(reader.png, 8);
}

bool little_endian() {
  const uint16_t probe = 1;
  return *reinterpret_cast<const uint8_t*>(&probe) == 1;
}

}  // namespace

Image<Vec3f> read_png_rgb(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);
  PngReader reader;
  open_read(reader, file.get(), path);
  if (setjmp(png_jmpbuf(reader.png))) throw ParseError("PNG decode failed: " + path);

  png_read_info(reader.png, reader.info);
  png_set_expand(reader.png);
  png_set_strip_16(reader.png);
  png_set_strip_alpha(reader.png);
  png_set_gray_to_rgb(reader.png);
  png_read_update_info(reader.png, reader.info);

  const int w = int(png_get_image_width(reader.png, reader.info));
  const int h = int(png_get_image_height(reader.png, reader.info));
  std::vector<uint8_t> row(size_t(w) * 3);
  Image<Vec3f> img(h, w);
  for (int r = 0; r < h; ++r) {
    png_read_row(reader.png, row.data(), nullptr);
    for (int c = 0; c < w; ++c) {
      img(r, c) = Vec3f(row[c * 3] / 255.0f, row[c * 3 + 1] / 255.0f,
                        row[c * 3 + 2] / 255.0f);
    }
  }
  return img;
}

Image<uint16_t> read_png_gray16(const std::string& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path);
  PngReader reader;
  open_read(reader, file.get(), path);
  if (setjmp(png_jmpbuf(reader.png))) throw ParseError("PNG decode failed: " + path);

  png_read_info(reader.png, reader.info);
  if (png_get_bit_depth(reader.png, reader.info) != 16 ||
      png_get_color_type(reader.png, reader.info) != PNG_COLOR_TYPE_GRAY) {
    throw ParseError("expected 16-bit grayscale PNG: " + path);
  }
  if (little_endian()) png_set_swap(reader.png);
  png_read_update_info(reader.png, reader.info);

  const int w = int(png_get_image_width(reader.png, reader.info));
  const int h = int(png_get_image_height(reader.png, reader.info));
  Image<uint16_t> img(h, w);
  for (int r = 0; r < h; ++r) {
    png_read_row(reader.png, reinterpret_cast<png_bytep>(&img(r, 0)), nullptr);
  }
  return img;
}

void write_png_rgb(const std::string& path, const Image<Vec3f>& img) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path);
  PngWriter writer;
  writer.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  writer.info = png_create_info_struct(writer.png);
  if (!writer.png || !writer.info) throw IoError("libpng init failed");
  if (setjmp(png_jmpbuf(writer.png))) throw IoError("PNG encode failed: " + path);

  png_init_io(writer.png, file.get());
  png_set_IHDR(writer.png, writer.info, img.width(), img.height(), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png, writer.info);
  std::vector<uint8_t> row(size_t(img.width()) * 3);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        const float v = std::min(1.0f, std::max(0.0f, img(r, c)[ch]));
        row[c * 3 + ch] = uint8_t(std::lround(v * 255.0f));
      }
    }
    png_write_row(writer.png, row.data());
  }
  png_write_end(writer.png, nullptr);
}

void write_png_gray16(const std::string& path, const Image<uint16_t>& img) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open " + path);
  PngWriter writer;
  writer.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  writer.info = png_create_info_struct(writer.png);
  if (!writer.png || !writer.info) throw IoError("libpng init failed");
  if (setjmp(png_jmpbuf(writer.png))) throw IoError("PNG encode failed: " + path);

  png_init_io(writer.png, file.get());
  png_set_IHDR(writer.png, writer.info, img.width(), img.height(), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png, writer.info);
  if (little_endian()) png_set_swap(writer.png);
  std::vector<uint16_t> row(size_t(img.width()));
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) row[c] = img(r, c);
    png_write_row(writer.png, reinterpret_cast<png_bytep>(row.data()));
  }
  png_write_end(writer.png, nullptr);
}

void write_depth_png(const std::string& path, const Image<float>& depth,
                     const Image<uint8_t>& valid, double scale) {
  Image<uint16_t> out(depth.height(), depth.width(), 0);
  for (int r = 0; r < depth.height(); ++r) {
    for (int c = 0; c < depth.width(); ++c) {
      if (!valid(r, c)) continue;
      const double v = double(depth(r, c)) * scale;
      out(r, c) = uint16_t(std::min(65535.0, std::max(0.0, std::round(v))));
    }
  }
  write_png_gray16(path, out);
}

void write_csv(const std::string& path, const Image<float>& img) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os.precision(9);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      if (c) os << ',';
      os << img(r, c);
    }
    os << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace gvslam
