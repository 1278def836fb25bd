#pragma once

// Axis-aligned boxes, polygons, and binary masks in continuous pixel
// coordinates. Origin is the top-left corner, x grows rightward and y
// grows downward. Cell (c, r) of a mask covers [c, c+1) x [r, r+1).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solartrack/errors.hpp"

namespace solartrack {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

class BBox {
 public:
  constexpr BBox() = default;

  /// Corners may be given in any order; they are normalized so that
  /// x1 <= x2 and y1 <= y2. Non-finite coordinates are rejected.
  BBox(double x1, double y1, double x2, double y2)
      : x1_(std::min(x1, x2)), y1_(std::min(y1, y2)), x2_(std::max(x1, x2)), y2_(std::max(y1, y2)) {
    if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2)) {
      throw ValidationError("BBox: non-finite coordinate");
    }
  }

  static BBox from_center(double cx, double cy, double w, double h) {
    return BBox(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2);
  }

  [[nodiscard]] constexpr double x1() const noexcept { return x1_; }
  [[nodiscard]] constexpr double y1() const noexcept { return y1_; }
  [[nodiscard]] constexpr double x2() const noexcept { return x2_; }
  [[nodiscard]] constexpr double y2() const noexcept { return y2_; }
  [[nodiscard]] constexpr double width() const noexcept { return x2_ - x1_; }
  [[nodiscard]] constexpr double height() const noexcept { return y2_ - y1_; }
  [[nodiscard]] constexpr double area() const noexcept { return width() * height(); }
  [[nodiscard]] constexpr Point center() const noexcept {
    return {(x1_ + x2_) / 2, (y1_ + y2_) / 2};
  }
  [[nodiscard]] constexpr bool empty() const noexcept { return area() <= 0.0; }

  [[nodiscard]] BBox translated(double dx, double dy) const {
    return BBox(x1_ + dx, y1_ + dy, x2_ + dx, y2_ + dy);
  }
  /// Scales coordinates about the origin.
  [[nodiscard]] BBox scaled(double s) const { return BBox(x1_ * s, y1_ * s, x2_ * s, y2_ * s); }
  /// Scales width and height by `factor` about the box center.
  [[nodiscard]] BBox dilated(double factor) const {
    const Point c = center();
    return from_center(c.x, c.y, width() * factor, height() * factor);
  }
  [[nodiscard]] BBox clamped(double width_limit, double height_limit) const {
    return BBox(std::clamp(x1_, 0.0, width_limit), std::clamp(y1_, 0.0, height_limit),
                std::clamp(x2_, 0.0, width_limit), std::clamp(y2_, 0.0, height_limit));
  }

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  double x1_ = 0.0, y1_ = 0.0, x2_ = 0.0, y2_ = 0.0;
};

[[nodiscard]] inline double area(const BBox& b) noexcept { return b.area(); }

/// Overlap box of `a` and `b`; empty when the overlap has zero area.
[[nodiscard]] inline std::optional<BBox> intersection(const BBox& a, const BBox& b) {
  const double x1 = std::max(a.x1(), b.x1());
  const double y1 = std::max(a.y1(), b.y1());
  const double x2 = std::min(a.x2(), b.x2());
  const double y2 = std::min(a.y2(), b.y2());
  if (x2 <= x1 || y2 <= y1) return std::nullopt;
  return BBox(x1, y1, x2, y2);
}

[[nodiscard]] inline double intersection_area(const BBox& a, const BBox& b) {
  const auto i = intersection(a, b);
  return i ? i->area() : 0.0;
}

[[nodiscard]] inline double union_area(const BBox& a, const BBox& b) {
  return a.area() + b.area() - intersection_area(a, b);
}

/// Axis-aligned hull of a four-corner annotation.
[[nodiscard]] inline BBox bbox_from_corners(std::span<const double, 4> xs, std::span<const double, 4> ys) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw ValidationError("bbox_from_corners: non-finite corner");
    }
  }
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  return BBox(*xmin, *ymin, *xmax, *ymax);
}

class Polygon {
 public:
  explicit Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw ValidationError("Polygon: needs at least 3 vertices");
    for (const auto& v : vertices_) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw ValidationError("Polygon: non-finite vertex");
    }
  }

  [[nodiscard]] const std::vector<Point>& vertices() const noexcept { return vertices_; }

  [[nodiscard]] BBox bounds() const {
    double x1 = vertices_[0].x, x2 = x1, y1 = vertices_[0].y, y2 = y1;
    for (const auto& v : vertices_) {
      x1 = std::min(x1, v.x);
      x2 = std::max(x2, v.x);
      y1 = std::min(y1, v.y);
      y2 = std::max(y2, v.y);
    }
    return BBox(x1, y1, x2, y2);
  }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point> vertices_;
};

/// Decodes an 8-direction Freeman chain (digits 0-7, 0 = +x, counting
/// counter-clockwise with north = -y) starting at `start`.
[[nodiscard]] inline Polygon decode_freeman_chain(Point start, const std::string& chain, double step = 1.0) {
  static constexpr std::array<std::array<int, 2>, 8> kSteps{
      {{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
  std::vector<Point> out{start};
  Point p = start;
  for (char c : chain) {
    if (c < '0' || c > '7') throw ValidationError(std::string("decode_freeman_chain: bad digit '") + c + "'");
    const auto& d = kSteps[static_cast<std::size_t>(c - '0')];
    p = {p.x + d[0] * step, p.y + d[1] * step};
    out.push_back(p);
  }
  if (out.size() > 1 && out.back() == out.front()) out.pop_back();
  return Polygon(std::move(out));
}

class BinaryMask {
 public:
  BinaryMask(int width, int height, bool fill = false)
      : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ValidationError("BinaryMask: dimensions must be >= 1");
    cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] bool at(int x, int y) const { return cells_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { cells_[index(x, y)] = v ? 1 : 0; }
  [[nodiscard]] std::size_t count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> cells_;
};

/// Even-odd fill sampled at cell centers. A center lying exactly on an edge
/// follows the half-open crossing rule (counted inside iff strictly left of
/// an odd number of crossings).
[[nodiscard]] inline BinaryMask rasterize(const Polygon& poly, int width, int height) {
  BinaryMask mask(width, height);
  const BBox b = poly.bounds();
  if (b.x1() < 0 || b.y1() < 0 || b.x2() > width || b.y2() > height) {
    throw ValidationError("rasterize: polygon exceeds mask bounds");
  }
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  std::vector<double> crossings;
  const int row_lo = std::max(0, static_cast<int>(std::floor(b.y1())) - 1);
  const int row_hi = std::min(height - 1, static_cast<int>(std::ceil(b.y2())));
  for (int r = row_lo; r <= row_hi; ++r) {
    const double yc = r + 0.5;
    crossings.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      if ((v[i].y > yc) != (v[j].y > yc)) {
        crossings.push_back(v[i].x + (yc - v[i].y) * (v[j].x - v[i].x) / (v[j].y - v[i].y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      // centers xc with crossings[k] <= xc < crossings[k+1]
      const int c_lo = std::max(0, static_cast<int>(std::ceil(crossings[k] - 0.5)));
      const int c_hi = std::min(width - 1, static_cast<int>(std::ceil(crossings[k + 1] - 0.5)) - 1);
      for (int c = c_lo; c <= c_hi; ++c) mask.set(c, r);
    }
  }
  return mask;
}

/// Largest-area axis-aligned all-true rectangle, as a box on cell corners.
/// Ties go to the smallest top edge, then the smallest left edge, then the
/// smallest height. Runs in O(width * height) via per-row column heights and
/// a monotonic stack.
[[nodiscard]] inline BBox maximal_inscribed_box(const BinaryMask& m) {
  const int w = m.width();
  const int h = m.height();
  std::vector<int> heights(static_cast<std::size_t>(w), 0);
  std::vector<int> stack;
  stack.reserve(static_cast<std::size_t>(w) + 1);

  long best_area = 0;
  int bx = 0, by = 0, bw = 0, bh = 0;
  auto consider = [&](int x1, int y1, int rw, int rh) {
    const long a = static_cast<long>(rw) * rh;
    if (a <= 0) return;
    const bool better = a > best_area ||
                        (a == best_area && (y1 < by || (y1 == by && (x1 < bx || (x1 == bx && rh < bh)))));
    if (better) {
      best_area = a;
      bx = x1;
      by = y1;
      bw = rw;
      bh = rh;
    }
  };

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) heights[static_cast<std::size_t>(c)] = m.at(c, r) ? heights[static_cast<std::size_t>(c)] + 1 : 0;
    stack.clear();
    for (int c = 0; c <= w; ++c) {
      const int cur = c < w ? heights[static_cast<std::size_t>(c)] : 0;
      while (!stack.empty() && heights[static_cast<std::size_t>(stack.back())] >= cur) {
        const int hh = heights[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        const int left = stack.empty() ? 0 : stack.back() + 1;
        consider(left, r - hh + 1, c - left, hh);
      }
      stack.push_back(c);
    }
  }
  if (best_area == 0) throw ValidationError("maximal_inscribed_box: empty region");
  return BBox(bx, by, bx + bw, by + bh);
}

}  // namespace solartrack
