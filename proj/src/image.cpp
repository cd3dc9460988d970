#include "sketchvos/image.hpp"

#include <algorithm>

namespace sketchvos {

BBox mask_bbox(const Mask& m) {
  BBox box{m.width(), m.height(), -1, -1};
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(y, x)) continue;
      box.x0 = std::min(box.x0, x);
      box.y0 = std::min(box.y0, y);
      box.x1 = std::max(box.x1, x);
      box.y1 = std::max(box.y1, y);
    }
  }
  if (box.x1 < 0) throw EmptyReferenceError("mask is empty");
  return box;
}

Mask flip_horizontal(const Mask& m) {
  Mask out(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) out.at(y, x) = m.at(y, m.width() - 1 - x);
  return out;
}

RgbImage flip_horizontal(const RgbImage& img) {
  RgbImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) std::copy_n(img.px(y, img.width() - 1 - x), 3, out.px(y, x));
  return out;
}

}  // namespace sketchvos
