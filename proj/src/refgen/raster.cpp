#include "sketchvos/refgen/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <deque>

namespace sketchvos::refgen {
namespace {

// Clockwise on screen (y grows downward), starting east.
constexpr std::array<Pixel, 8> kRing{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

int ring_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i].x == dx && kRing[i].y == dy) return i;
  }
  return -1;
}

double canvas_scale(int height, int width) {
  return std::hypot(static_cast<double>(height), static_cast<double>(width)) / std::hypot(64.0, 64.0);
}

long long cross(const Pixel& o, const Pixel& a, const Pixel& b) {
  return static_cast<long long>(a.x - o.x) * (b.y - o.y) - static_cast<long long>(a.y - o.y) * (b.x - o.x);
}

}  // namespace

void stamp(Mask& canvas, int x, int y, int width) {
  const int lo = -(width - 1) / 2;
  const int hi = width / 2;
  for (int dy = lo; dy <= hi; ++dy) {
    for (int dx = lo; dx <= hi; ++dx) {
      if (canvas.in_bounds(y + dy, x + dx)) canvas.at(y + dy, x + dx) = 1;
    }
  }
}

void draw_segment(Mask& canvas, Point a, Point b, int width) {
  int x0 = static_cast<int>(std::lround(a.x)), y0 = static_cast<int>(std::lround(a.y));
  const int x1 = static_cast<int>(std::lround(b.x)), y1 = static_cast<int>(std::lround(b.y));
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    stamp(canvas, x0, y0, width);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_polyline(Mask& canvas, const Polyline& line, int width, bool closed) {
  if (line.empty()) return;
  if (line.size() == 1) {
    draw_segment(canvas, line[0], line[0], width);
    return;
  }
  for (std::size_t i = 0; i + 1 < line.size(); ++i) draw_segment(canvas, line[i], line[i + 1], width);
  if (closed && line.size() > 2) draw_segment(canvas, line.back(), line.front(), width);
}

int stroke_width_for(int height, int width) {
  return std::max(1, static_cast<int>(std::lround(2.0 * canvas_scale(height, width))));
}

int cross_half_length_for(int height, int width) {
  return std::max(1, static_cast<int>(std::lround(6.0 * canvas_scale(height, width))));
}

int Components::largest() const {
  int best = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (best == 0 || sizes[k] > sizes[best - 1]) best = static_cast<int>(k) + 1;
  }
  return best;
}

Components connected_components(const Mask& mask) {
  Components out{Plane<int>(mask.height(), mask.width(), 0), {}};
  std::deque<Pixel> queue;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(y, x) || out.labels.at(y, x)) continue;
      const int label = static_cast<int>(out.sizes.size()) + 1;
      out.sizes.push_back(0);
      out.labels.at(y, x) = label;
      queue.push_back({x, y});
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        ++out.sizes.back();
        for (const Pixel& d : kRing) {
          const int nx = p.x + d.x, ny = p.y + d.y;
          if (mask.in_bounds(ny, nx) && mask.at(ny, nx) && !out.labels.at(ny, nx)) {
            out.labels.at(ny, nx) = label;
            queue.push_back({nx, ny});
          }
        }
      }
    }
  }
  return out;
}

Mask largest_component(const Mask& mask) {
  const Components cc = connected_components(mask);
  const int keep = cc.largest();
  Mask out(mask.height(), mask.width());
  if (keep == 0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = cc.labels.data()[i] == keep ? 1 : 0;
  return out;
}

std::vector<Pixel> trace_outer_boundary(const Mask& mask) {
  Pixel start{-1, -1};
  for (int y = 0; y < mask.height() && start.x < 0; ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(y, x)) {
        start = {x, y};
        break;
      }
    }
  }
  if (start.x < 0) return {};

  auto fg = [&](int x, int y) { return mask.get_or(y, x, 0) != 0; };
  std::vector<Pixel> contour{start};
  Pixel cur = start;
  int back_dir = 4;  // raster-order start: the west neighbour is background
  bool have_first = false;
  Pixel first_next{};
  const std::size_t limit = 4 * mask.size() + 8;
  for (std::size_t iter = 0; iter < limit; ++iter) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int d = (back_dir + k) % 8;
      if (fg(cur.x + kRing[d].x, cur.y + kRing[d].y)) {
        found = d;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const Pixel next{cur.x + kRing[found].x, cur.y + kRing[found].y};
    if (cur == start) {
      if (have_first && next == first_next) break;
      if (!have_first) {
        have_first = true;
        first_next = next;
      }
    }
    const Pixel back{cur.x + kRing[(found + 7) % 8].x, cur.y + kRing[(found + 7) % 8].y};
    back_dir = ring_index(back.x - next.x, back.y - next.y);
    cur = next;
    contour.push_back(cur);
  }
  if (contour.size() > 1 && contour.back() == start) contour.pop_back();
  return contour;
}

std::vector<Pixel> drop_collinear(const std::vector<Pixel>& loop) {
  if (loop.size() < 3) return loop;
  std::vector<Pixel> out;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pixel& prev = loop[(i + n - 1) % n];
    const Pixel& next = loop[(i + 1) % n];
    const Pixel& p = loop[i];
    const bool collinear = cross(prev, p, next) == 0 &&
                           (static_cast<long long>(p.x - prev.x) * (next.x - p.x) +
                            static_cast<long long>(p.y - prev.y) * (next.y - p.y)) > 0;
    if (!collinear) out.push_back(p);
  }
  return out.empty() ? std::vector<Pixel>{loop.front()} : out;
}

std::vector<Pixel> convex_hull(std::vector<Pixel> points) {
  std::sort(points.begin(), points.end(),
            [](const Pixel& a, const Pixel& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() <= 2) return points;
  std::vector<Pixel> hull(2 * points.size());
  std::size_t k = 0;
  for (const Pixel& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

Mask thin(const Mask& mask) {
  Mask img = mask;
  auto v = [&](int x, int y) -> int { return img.get_or(y, x, 0) ? 1 : 0; };
  std::vector<Pixel> remove;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      remove.clear();
      for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
          if (!img.at(y, x)) continue;
          // p2..p9 clockwise from north.
          const int p[8] = {v(x, y - 1), v(x + 1, y - 1), v(x + 1, y),     v(x + 1, y + 1),
                            v(x, y + 1), v(x - 1, y + 1), v(x - 1, y),     v(x - 1, y - 1)};
          int b = 0, a = 0;
          for (int i = 0; i < 8; ++i) {
            b += p[i];
            if (p[i] == 0 && p[(i + 1) % 8] == 1) ++a;
          }
          if (b < 2 || b > 6 || a != 1) continue;
          const bool c1 = pass == 0 ? !(p[0] && p[2] && p[4]) : !(p[0] && p[2] && p[6]);
          const bool c2 = pass == 0 ? !(p[2] && p[4] && p[6]) : !(p[0] && p[4] && p[6]);
          if (c1 && c2) remove.push_back({x, y});
        }
      }
      for (const Pixel& q : remove) img.at(q.y, q.x) = 0;
      changed = changed || !remove.empty();
    }
  }
  return img;
}

Mask inner_boundary(const Mask& mask) {
  Mask out(mask.height(), mask.width());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(y, x)) continue;
      if (!mask.get_or(y - 1, x, 0) || !mask.get_or(y + 1, x, 0) || !mask.get_or(y, x - 1, 0) ||
          !mask.get_or(y, x + 1, 0)) {
        out.at(y, x) = 1;
      }
    }
  }
  return out;
}

}  // namespace sketchvos::refgen
