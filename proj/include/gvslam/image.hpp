#pragma once

#include <cstdint>
#include <vector>

namespace gvslam {

/// Row-major 2D array. (r, c) indexing with r in [0, height), c in [0, width).
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int height, int width, const T& fill = T())
      : height_(height), width_(width), data_(static_cast<size_t>(height) * width, fill) {}

  int height() const { return height_; }
  int width() const { return width_; }
  bool empty() const { return data_.empty(); }
  size_t size() const { return data_.size(); }

  T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * width_ + c]; }
  const T& operator()(int r, int c) const {
    return data_[static_cast<size_t>(r) * width_ + c];
  }

  bool in_bounds(int r, int c) const {
    return r >= 0 && r < height_ && c >= 0 && c < width_;
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  bool same_shape(int h, int w) const { return height_ == h && width_ == w; }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

}  // namespace gvslam
