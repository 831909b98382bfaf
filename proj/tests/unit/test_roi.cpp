#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "radtherm/errors.hpp"
#include "radtherm/frame.hpp"

using namespace radtherm;

namespace {

// Brute-force reference: every pixel centre tested against every edge with
// the half-open crossing rule.
bool oracle_inside(const std::vector<Eigen::Vector2d>& poly, double px, double py) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = poly[i];
    const Eigen::Vector2d& b = poly[(i + 1) % n];
    if ((a.y() > py) == (b.y() > py)) continue;
    const double x = (b.x() - a.x()) * (py - a.y()) / (b.y() - a.y()) + a.x();
    if (px < x) inside = !inside;
  }
  return inside;
}

ThermalFrame random_frame(int w, int h, std::mt19937_64& rng) {
  ThermalFrame f;
  f.kind = FrameKind::corrected_temperature;
  f.values.resize(h, w);
  std::uniform_real_distribution<double> u(1100.0, 1400.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f.values(y, x) = u(rng);
  }
  return f;
}

ThermalFrame constant_frame(int w, int h, double v) {
  ThermalFrame f;
  f.values = FrameValues::Constant(h, w, v);
  return f;
}

}  // namespace

TEST_SUITE("roi") {
  TEST_CASE("polygon statistics equal a brute-force oracle on random geometries") {
    std::mt19937_64 rng(123);
    const int w = 40, h = 30;
    std::uniform_real_distribution<double> ux(-0.5, w - 0.5001), uy(-0.5, h - 0.5001);
    int checked = 0;
    while (checked < 50) {
      RoiGeometry g;
      g.kind = RoiKind::polygon;
      const int n = 3 + static_cast<int>(rng() % 6);
      for (int i = 0; i < n; ++i) g.vertices.emplace_back(ux(rng), uy(rng));
      try {
        g.validate(w, h);
      } catch (const DomainError&) {
        continue;
      }
      const ThermalFrame f = random_frame(w, h, rng);
      const RoiStats st = roi_stats(f, g);

      std::vector<Eigen::Vector2i> pixels;
      std::vector<double> values;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (oracle_inside(g.vertices, x, y)) {
            pixels.emplace_back(x, y);
            values.push_back(f.values(y, x));
          }
        }
      }
      REQUIRE(st.pixels.size() == pixels.size());
      for (std::size_t i = 0; i < pixels.size(); ++i) CHECK(st.pixels[i] == pixels[i]);
      CHECK(st.values == values);
      const RoiSummary ref = summarize(values);
      CHECK(st.summary.count == ref.count);
      if (!values.empty()) {
        CHECK(st.summary.min == *std::min_element(values.begin(), values.end()));
        CHECK(st.summary.max == *std::max_element(values.begin(), values.end()));
        CHECK(st.summary.mean == ref.mean);
        CHECK(st.summary.std == ref.std);
        CHECK(st.summary.p50 == ref.p50);
      }
      std::size_t total = 0;
      for (auto c : st.histogram.counts) total += c;
      CHECK(total == values.size());
      ++checked;
    }
  }

  TEST_CASE("summary statistics against direct formulas") {
    const std::vector<double> v = {4.0, 1.0, 3.0, 2.0, 5.0};
    const RoiSummary s = summarize(v);
    CHECK(s.count == 5);
    CHECK(s.mean == 3.0);
    CHECK(s.std == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.min == 1.0);
    CHECK(s.max == 5.0);
    CHECK(s.p50 == 3.0);
    CHECK(s.p25 == 2.0);
    CHECK(s.p5 == doctest::Approx(1.2));
  }

  TEST_CASE("polygon over a constant frame") {
    const ThermalFrame f = constant_frame(20, 20, 1234.5);
    RoiGeometry g{RoiKind::polygon, {{2.0, 2.0}, {15.0, 3.0}, {9.0, 17.0}}};
    const RoiStats st = roi_stats(f, g);
    CHECK(st.summary.count > 0);
    CHECK(st.summary.std == 0.0);
    CHECK(st.summary.mean == 1234.5);
    CHECK(st.histogram.counts.size() == 1);
    CHECK(st.histogram.counts[0] == st.summary.count);
  }

  TEST_CASE("horizontal line yields one value per column in x order") {
    ThermalFrame f;
    f.values.resize(5, 12);
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 12; ++x) f.values(y, x) = 100.0 * y + x;
    }
    const RoiStats st = roi_stats(f, {RoiKind::line, {{0.0, 2.0}, {11.0, 2.0}}});
    REQUIRE(st.values.size() == 12);
    for (int x = 0; x < 12; ++x) CHECK(st.values[static_cast<std::size_t>(x)] == 200.0 + x);
    const RoiStats back = roi_stats(f, {RoiKind::line, {{11.0, 2.0}, {0.0, 2.0}}});
    CHECK(back.values.front() == 211.0);
    CHECK(back.values.back() == 200.0);
  }

  TEST_CASE("Bresenham traversal is connected and ends on both pixels") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-0.5, 49.4);
    for (int i = 0; i < 200; ++i) {
      const Eigen::Vector2d a(u(rng), u(rng)), b(u(rng), u(rng));
      const auto px = bresenham_line(a, b);
      const Eigen::Vector2i first(static_cast<int>(std::floor(a.x() + 0.5)), static_cast<int>(std::floor(a.y() + 0.5)));
      const Eigen::Vector2i last(static_cast<int>(std::floor(b.x() + 0.5)), static_cast<int>(std::floor(b.y() + 0.5)));
      CHECK(px.front() == first);
      CHECK(px.back() == last);
      const auto d = (last - first).cwiseAbs();
      CHECK(px.size() == static_cast<std::size_t>(std::max(d.x(), d.y()) + 1));
      for (std::size_t k = 1; k < px.size(); ++k) CHECK((px[k] - px[k - 1]).cwiseAbs().maxCoeff() == 1);
    }
  }

  TEST_CASE("point neighbourhood is clipped at the border") {
    ThermalFrame f;
    f.values.resize(4, 4);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) f.values(y, x) = x + 4.0 * y;
    }
    const RoiStats corner = roi_stats(f, {RoiKind::point, {{0.2, -0.3}}});
    CHECK(corner.values.size() == 4);
    CHECK(corner.summary.mean == (0.0 + 1.0 + 4.0 + 5.0) / 4.0);
    const RoiStats inner = roi_stats(f, {RoiKind::point, {{1.0, 1.0}}});
    CHECK(inner.values.size() == 9);
    CHECK(inner.summary.mean == 5.0);
    const double var = (25 + 16 + 9 + 1 + 0 + 1 + 9 + 16 + 25) / 9.0;
    CHECK(inner.summary.std == doctest::Approx(std::sqrt(var)).epsilon(1e-15));
  }

  TEST_CASE("failed pixels are reported, not averaged") {
    ThermalFrame f = constant_frame(5, 5, 10.0);
    f.values(2, 2) = std::nan("");
    const RoiStats st = roi_stats(f, {RoiKind::point, {{2.0, 2.0}}});
    CHECK(st.summary.count == 8);
    CHECK(st.summary.invalid == 1);
    CHECK(st.summary.mean == 10.0);
  }

  TEST_CASE("geometry validation") {
    CHECK_THROWS_AS(RoiGeometry({RoiKind::point, {}}).validate(10, 10), DomainError);
    CHECK_THROWS_AS(RoiGeometry({RoiKind::line, {{1, 1}}}).validate(10, 10), DomainError);
    CHECK_THROWS_AS(RoiGeometry({RoiKind::polygon, {{1, 1}, {2, 2}}}).validate(10, 10), DomainError);
    CHECK_THROWS_AS(RoiGeometry({RoiKind::polygon, {{1, 1}, {2, 2}, {3, 3}}}).validate(10, 10), DomainError);
    CHECK_THROWS_AS(RoiGeometry({RoiKind::point, {{10.0, 1.0}}}).validate(10, 10), DomainError);
    CHECK_THROWS_AS(RoiGeometry({RoiKind::point, {{-0.6, 1.0}}}).validate(10, 10), DomainError);
    CHECK_NOTHROW(RoiGeometry({RoiKind::point, {{9.4, -0.5}}}).validate(10, 10));
    CHECK_THROWS_AS(roi_stats(constant_frame(4, 4, 1.0), {RoiKind::line, {{0, 0}, {7, 0}}}), DomainError);
  }

  TEST_CASE("histogram bins cover the value range") {
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(i);
    const Histogram h = histogram(v);
    CHECK(h.counts.size() == kHistogramBins);
    CHECK(h.lo == 0.0);
    CHECK(h.hi == 99.0);
    for (auto c : h.counts) CHECK(c == 5);
  }
}
