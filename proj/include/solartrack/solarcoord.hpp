#pragma once

// Helioprojective-Cartesian (arcsec from disk center, solar north up) to
// 0-based image pixels (row index growing downward) and back. CRPIX values
// follow the 1-based FITS convention; the shift to 0-based happens here.

#include <array>
#include <cmath>

#include "solartrack/errors.hpp"
#include "solartrack/geometry.hpp"
#include "solartrack/timestamp.hpp"

namespace solartrack::solarcoord {

struct ImageHeader {
  double cdelt1 = 0.6;
  double cdelt2 = 0.6;
  double crpix1 = 2048.5;
  double crpix2 = 2048.5;
  double rsun = 960.0;
  int width = 4096;
  int height = 4096;
  Timestamp obs_time{};

  void validate() const {
    if (!(cdelt1 > 0.0) || !(cdelt2 > 0.0)) throw ValidationError("ImageHeader: CDELT must be positive");
    if (!(rsun > 0.0)) throw ValidationError("ImageHeader: RSUN must be positive");
    if (width < 1 || height < 1) throw ValidationError("ImageHeader: bad dimensions");
    if (!(crpix1 >= 1.0 && crpix1 <= width) || !(crpix2 >= 1.0 && crpix2 <= height)) {
      throw ValidationError("ImageHeader: CRPIX outside frame");
    }
  }

  /// Solar radius in pixels along x.
  [[nodiscard]] double rsun_pixels() const { return rsun / cdelt1; }

  friend bool operator==(const ImageHeader&, const ImageHeader&) = default;
};

inline void require_finite(double a, double b, const char* who) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ValidationError(std::string(who) + ": non-finite input");
}

[[nodiscard]] inline Point hpc_to_pixel(double x_arcsec, double y_arcsec, const ImageHeader& h) {
  require_finite(x_arcsec, y_arcsec, "hpc_to_pixel");
  return {(h.crpix1 - 1.0) + x_arcsec / h.cdelt1, (h.crpix2 - 1.0) - y_arcsec / h.cdelt2};
}

[[nodiscard]] inline Point pixel_to_hpc(double px, double py, const ImageHeader& h) {
  require_finite(px, py, "pixel_to_hpc");
  return {(px - (h.crpix1 - 1.0)) * h.cdelt1, ((h.crpix2 - 1.0) - py) * h.cdelt2};
}

/// Boundary inclusive.
[[nodiscard]] inline bool on_disk(double x_arcsec, double y_arcsec, double rsun_arcsec) {
  return x_arcsec * x_arcsec + y_arcsec * y_arcsec <= rsun_arcsec * rsun_arcsec;
}

/// True only when all four corners of the HPC box are on the disk.
[[nodiscard]] inline bool box_within_limb(const BBox& hpc_box, double rsun_arcsec) {
  return on_disk(hpc_box.x1(), hpc_box.y1(), rsun_arcsec) && on_disk(hpc_box.x2(), hpc_box.y1(), rsun_arcsec) &&
         on_disk(hpc_box.x1(), hpc_box.y2(), rsun_arcsec) && on_disk(hpc_box.x2(), hpc_box.y2(), rsun_arcsec);
}

/// Pixel-space hull of an HPC box (the y flip swaps top and bottom).
[[nodiscard]] inline BBox hpc_box_to_pixel(const BBox& hpc_box, const ImageHeader& h) {
  const Point a = hpc_to_pixel(hpc_box.x1(), hpc_box.y1(), h);
  const Point b = hpc_to_pixel(hpc_box.x2(), hpc_box.y2(), h);
  return BBox(a.x, a.y, b.x, b.y);
}

[[nodiscard]] inline Polygon hpc_polygon_to_pixel(const Polygon& hpc, const ImageHeader& h) {
  std::vector<Point> out;
  out.reserve(hpc.vertices().size());
  for (const auto& v : hpc.vertices()) out.push_back(hpc_to_pixel(v.x, v.y, h));
  return Polygon(std::move(out));
}

}  // namespace solartrack::solarcoord
