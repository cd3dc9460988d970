#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sketchvos/error.hpp"

namespace sketchvos {

/// Single-channel H x W raster, row-major.
template <typename T>
class Plane {
 public:
  Plane() = default;
  Plane(int height, int width, T fill = T{}) : height_(height), width_(width) {
    if (height < 0 || width < 0) throw ShapeError("negative raster size");
    data_.assign(static_cast<std::size_t>(height) * width, fill);
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool in_bounds(int y, int x) const { return y >= 0 && y < height_ && x >= 0 && x < width_; }

  T& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  T get_or(int y, int x, T fallback) const { return in_bounds(y, x) ? at(y, x) : fallback; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_size(const Plane& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool operator==(const Plane& other) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

/// Binary mask; every value is 0 or 1.
using Mask = Plane<std::uint8_t>;
/// Per-pixel object ids, 0 = background.
using LabelMap = Plane<std::uint8_t>;

inline std::size_t count_foreground(const Mask& m) {
  return static_cast<std::size_t>(std::count_if(m.data().begin(), m.data().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

inline Mask mask_for_label(const LabelMap& labels, int id) {
  Mask m(labels.height(), labels.width());
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = labels.data()[i] == id ? 1 : 0;
  return m;
}

inline void require_same_size(const Mask& a, const Mask& b, const char* what) {
  if (!a.same_size(b)) {
    throw ShapeError(std::string(what) + ": size mismatch " + std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                     std::to_string(b.width()));
  }
}

/// Interleaved 8-bit RGB, H x W x 3.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int height, int width) : height_(height), width_(width) {
    data_.assign(static_cast<std::size_t>(height) * width * 3, 0);
  }
  int height() const { return height_; }
  int width() const { return width_; }
  std::uint8_t* px(int y, int x) { return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3; }
  const std::uint8_t* px(int y, int x) const {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * 3;
  }
  std::vector<std::uint8_t>& data() { return data_; }
  const std::vector<std::uint8_t>& data() const { return data_; }
  bool operator==(const RgbImage& other) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

struct BBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive pixel coordinates
  bool operator==(const BBox&) const = default;
};

/// Tight bounding box of foreground pixels; throws EmptyReferenceError for an empty mask.
BBox mask_bbox(const Mask& m);

Mask flip_horizontal(const Mask& m);
RgbImage flip_horizontal(const RgbImage& img);

}  // namespace sketchvos
