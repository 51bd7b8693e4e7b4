#pragma once

#include <cstdint>
#include <string>

#include "gvslam/geometry.hpp"
#include "gvslam/image.hpp"

namespace gvslam {

/// 8-bit PNG (gray, palette, RGB or RGBA all accepted) to RGB in [0, 1].
Image<Vec3f> read_png_rgb(const std::string& path);

/// 16-bit grayscale PNG, native endianness out.
Image<uint16_t> read_png_gray16(const std::string& path);

void write_png_rgb(const std::string& path, const Image<Vec3f>& img);
void write_png_gray16(const std::string& path, const Image<uint16_t>& img);

/// Depth image (meters) to a 16-bit PNG at the TUM scale (5000 units per
/// meter); invalid pixels are written as 0.
void write_depth_png(const std::string& path, const Image<float>& depth,
                     const Image<uint8_t>& valid, double scale = 5000.0);

/// Plain CSV with one row per image row.
void write_csv(const std::string& path, const Image<float>& img);

}  // namespace gvslam
