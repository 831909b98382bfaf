#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "radtherm/errors.hpp"
#include "radtherm/frame.hpp"

namespace radtherm {

namespace {

Eigen::Vector2i nearest_pixel(const Eigen::Vector2d& v) {
  return {static_cast<int>(std::floor(v.x() + 0.5)), static_cast<int>(std::floor(v.y() + 0.5))};
}

// x coordinate where edge (a, b) crosses the horizontal line at y.
double crossing_x(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double y) {
  return (b.x() - a.x()) * (y - a.y()) / (b.y() - a.y()) + a.x();
}

}  // namespace

std::string_view to_string(RoiKind kind) {
  switch (kind) {
    case RoiKind::point: return "point";
    case RoiKind::line: return "line";
    case RoiKind::polygon: return "polygon";
  }
  return "?";
}

RoiKind parse_roi_kind(std::string_view text) {
  if (text == "point") return RoiKind::point;
  if (text == "line") return RoiKind::line;
  if (text == "polygon") return RoiKind::polygon;
  throw DomainError("unknown geometry kind '" + std::string(text) + "' (expected point, line or polygon)");
}

bool point_in_polygon(const Polygon& polygon, double x, double y) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.y() > y) != (b.y() > y) && x < crossing_x(a, b, y)) inside = !inside;
  }
  return inside;
}

std::vector<Eigen::Vector2i> rasterize_polygon(const Polygon& polygon, int width, int height) {
  std::vector<Eigen::Vector2i> out;
  const std::size_t n = polygon.size();
  if (n < 3) return out;
  double ymin = polygon[0].y(), ymax = polygon[0].y();
  for (const auto& v : polygon) {
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  const int row_lo = std::max(0, static_cast<int>(std::floor(ymin)));
  const int row_hi = std::min(height - 1, static_cast<int>(std::ceil(ymax)));
  std::vector<double> xs;
  for (int py = row_lo; py <= row_hi; ++py) {
    xs.clear();
    const double y = py;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const auto& a = polygon[i];
      const auto& b = polygon[j];
      if ((a.y() > y) != (b.y() > y)) xs.push_back(crossing_x(a, b, y));
    }
    std::sort(xs.begin(), xs.end());
    // A pixel is inside when an odd number of crossings lie strictly to its
    // right, i.e. xs[2k] <= px < xs[2k+1].
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int first = std::max(0, static_cast<int>(std::ceil(xs[k])));
      const int last = std::min(width - 1, static_cast<int>(std::ceil(xs[k + 1])) - 1);
      for (int px = first; px <= last; ++px) out.emplace_back(px, py);
    }
  }
  return out;
}

std::vector<Eigen::Vector2i> bresenham_line(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
  const Eigen::Vector2i a = nearest_pixel(from);
  const Eigen::Vector2i b = nearest_pixel(to);
  std::vector<Eigen::Vector2i> out;
  int x = a.x(), y = a.y();
  const int dx = std::abs(b.x() - x), sx = x < b.x() ? 1 : -1;
  const int dy = -std::abs(b.y() - y), sy = y < b.y() ? 1 : -1;
  int err = dx + dy;
  while (true) {
    out.emplace_back(x, y);
    if (x == b.x() && y == b.y()) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
  return out;
}

void RoiGeometry::validate(int width, int height) const {
  const std::size_t n = vertices.size();
  switch (kind) {
    case RoiKind::point:
      if (n != 1) throw DomainError("point geometry needs exactly 1 vertex");
      break;
    case RoiKind::line:
      if (n != 2) throw DomainError("line geometry needs exactly 2 vertices");
      break;
    case RoiKind::polygon: {
      if (n < 3) throw DomainError("polygon geometry needs at least 3 vertices");
      double area2 = 0.0;
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        area2 += vertices[j].x() * vertices[i].y() - vertices[i].x() * vertices[j].y();
      }
      bool collinear = true;
      for (std::size_t i = 2; i < n && collinear; ++i) {
        const Eigen::Vector2d u = vertices[1] - vertices[0];
        const Eigen::Vector2d v = vertices[i] - vertices[0];
        if (std::abs(u.x() * v.y() - u.y() * v.x()) > 1e-12) collinear = false;
      }
      if (collinear || area2 == 0.0) throw DomainError("polygon vertices are collinear");
      break;
    }
  }
  for (const auto& v : vertices) {
    if (!std::isfinite(v.x()) || !std::isfinite(v.y()) || v.x() < -0.5 || v.y() < -0.5 || v.x() >= width - 0.5 ||
        v.y() >= height - 0.5) {
      throw DomainError("geometry vertex (" + std::to_string(v.x()) + ", " + std::to_string(v.y()) +
                        ") outside the " + std::to_string(width) + "x" + std::to_string(height) + " frame");
    }
  }
}

RoiSummary summarize(const std::vector<double>& values) {
  RoiSummary s;
  std::vector<double> finite;
  finite.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) {
      finite.push_back(v);
    } else {
      ++s.invalid;
    }
  }
  s.count = finite.size();
  if (finite.empty()) {
    const double nan = std::nan("");
    s.min = s.max = s.mean = s.std = s.p5 = s.p25 = s.p50 = s.p75 = s.p95 = nan;
    return s;
  }
  const Eigen::Map<const Eigen::ArrayXd> a(finite.data(), static_cast<Eigen::Index>(finite.size()));
  s.min = a.minCoeff();
  s.max = a.maxCoeff();
  s.mean = a.mean();
  s.std = std::sqrt((a - s.mean).square().mean());
  s.p5 = percentile(finite, 5.0);
  s.p25 = percentile(finite, 25.0);
  s.p50 = percentile(finite, 50.0);
  s.p75 = percentile(finite, 75.0);
  s.p95 = percentile(finite, 95.0);
  return s;
}

Histogram histogram(const std::vector<double>& values, int bins) {
  Histogram h;
  bool any = false;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    if (!any) {
      h.lo = h.hi = v;
      any = true;
    }
    h.lo = std::min(h.lo, v);
    h.hi = std::max(h.hi, v);
  }
  if (!any) return h;
  if (h.hi == h.lo) bins = 1;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    int b = h.hi == h.lo ? 0 : static_cast<int>(std::floor((v - h.lo) / (h.hi - h.lo) * bins));
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

RoiStats roi_stats(const ThermalFrame& frame, const RoiGeometry& geom) {
  geom.validate(frame.width(), frame.height());
  RoiStats st;
  st.kind = geom.kind;
  switch (geom.kind) {
    case RoiKind::point: {
      const Eigen::Vector2i c = nearest_pixel(geom.vertices[0]);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = c.x() + dx, y = c.y() + dy;
          if (x >= 0 && y >= 0 && x < frame.width() && y < frame.height()) st.pixels.emplace_back(x, y);
        }
      }
      break;
    }
    case RoiKind::line: st.pixels = bresenham_line(geom.vertices[0], geom.vertices[1]); break;
    case RoiKind::polygon: st.pixels = rasterize_polygon(geom.vertices, frame.width(), frame.height()); break;
  }
  st.values.reserve(st.pixels.size());
  for (const auto& p : st.pixels) st.values.push_back(frame.values(p.y(), p.x()));
  st.summary = summarize(st.values);
  if (geom.kind == RoiKind::polygon) st.histogram = histogram(st.values);
  return st;
}

}  // namespace radtherm
