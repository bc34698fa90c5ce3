#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_rng.hpp"
#include "vegtrack/shape_features.hpp"
#include "vegtrack/synth.hpp"

using namespace vegtrack;

namespace {

constexpr double kPi = std::numbers::pi;

Contour make_contour(std::initializer_list<std::pair<double, double>> pts) {
  Contour c;
  for (auto [x, y] : pts) c.points.push_back({x, y});
  return c;
}

// Exact samples of an ellipse with semi-axes (a, b) rotated by angle rot.
Contour ellipse_samples(double a, double b, double rot, int n, double cx = 0,
                        double cy = 0) {
  Contour c;
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * kPi * i / n;
    double x = a * std::cos(t), y = b * std::sin(t);
    c.points.push_back({cx + x * std::cos(rot) - y * std::sin(rot),
                        cy + x * std::sin(rot) + y * std::cos(rot)});
  }
  return c;
}

// Radial harmonic curve with mixed lobes; the odd/even mix keeps the
// once-around spectrum component healthy.
Contour lumpy_contour(int n, double r0, double cx = 0, double cy = 0) {
  Contour c;
  for (int i = 0; i < n; ++i) {
    double t = 2.0 * kPi * i / n;
    double rho = r0 * (1.0 + 0.25 * std::cos(t) + 0.15 * std::cos(2 * t + 0.4) +
                       0.1 * std::cos(3 * t + 1.1));
    c.points.push_back({cx + rho * std::cos(t), cy + rho * std::sin(t)});
  }
  return c;
}

// Two overlapping discs: an asymmetric blob whose centroid-distance
// signature has a strong once-around component.
MaskRaster snowman_mask(int h, int w, double cy, double cx, double scale) {
  MaskRaster m(h, w);
  const double r1 = 16 * scale, r2 = 10 * scale, sep = 15 * scale;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double dy1 = y - cy, dx1 = x - cx;
      double dy2 = y - (cy + sep), dx2 = x - cx;
      if (dy1 * dy1 + dx1 * dx1 <= r1 * r1 || dy2 * dy2 + dx2 * dx2 <= r2 * r2)
        m.set(y, x, true);
    }
  return m;
}

}  // namespace

TEST_SUITE("shape_features") {
  TEST_CASE("contour of a single pixel") {
    MaskRaster m(3, 3);
    m.set(1, 1, true);
    Contour c = trace_contour(m);
    REQUIRE(c.size() == 1);
    CHECK(c.points[0].x == 1.0);
    CHECK(c.points[0].y == 1.0);
  }

  TEST_CASE("contour of a full 3x3 block, hand-derived order") {
    MaskRaster m(3, 3);
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) m.set(y, x, true);
    Contour c = trace_contour(m);
    const std::vector<std::pair<double, double>> expected = {
        {0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}, {1, 0}};
    REQUIRE(c.size() == 8);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(c.points[i].x == expected[i].first);
      CHECK(c.points[i].y == expected[i].second);
    }
  }

  TEST_CASE("largest component wins") {
    MaskRaster m(8, 12);
    for (int x = 0; x < 5; ++x) m.set(1, x, true);   // 5-pixel bar
    for (int x = 9; x < 12; ++x) m.set(6, x, true);  // 3-pixel bar
    Contour c = trace_contour(m);
    for (const auto& p : c.points) {
      CHECK(p.y == 1.0);
      CHECK(p.x <= 4.0);
    }
  }

  TEST_CASE("contour points are 8-connected and closed") {
    test::TestRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      MaskRaster m(32, 32);
      double cy = rng.uniform(10, 22), cx = rng.uniform(10, 22);
      double r = rng.uniform(3, 8);
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
          if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r) m.set(y, x, true);
      if (!m.tight_bbox()) continue;
      Contour c = trace_contour(m);
      REQUIRE(c.size() >= 1);
      for (int i = 0; i < c.size(); ++i) {
        const auto& a = c.points[static_cast<std::size_t>(i)];
        const auto& b = c.points[static_cast<std::size_t>((i + 1) % c.size())];
        if (c.size() <= 2) break;
        CHECK(std::abs(a.x - b.x) <= 1.0);
        CHECK(std::abs(a.y - b.y) <= 1.0);
      }
    }
  }

  TEST_CASE("empty mask raises") {
    MaskRaster m(4, 4);
    CHECK_THROWS_AS(trace_contour(m), EmptyMask);
  }

  TEST_CASE("component labeling agrees with a flood-fill oracle") {
    test::TestRng rng(909);
    for (int trial = 0; trial < 30; ++trial) {
      // random discs across word boundaries
      MaskRaster m(80, 150);
      int discs = 1 + static_cast<int>(rng.next_below(6));
      for (int d = 0; d < discs; ++d) {
        double cy = rng.uniform(5, 75), cx = rng.uniform(5, 145);
        double r = rng.uniform(2, 9);
        for (int y = 0; y < 80; ++y)
          for (int x = 0; x < 150; ++x)
            if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r) m.set(y, x, true);
      }
      // flood-fill oracle for the largest component area
      std::vector<char> seen(80 * 150, 0);
      std::size_t best = 0;
      int comps = 0;
      for (int y = 0; y < 80; ++y)
        for (int x = 0; x < 150; ++x) {
          if (!m.at(y, x) || seen[static_cast<std::size_t>(y) * 150 + x]) continue;
          ++comps;
          std::size_t size = 0;
          std::vector<std::pair<int, int>> stack{{y, x}};
          seen[static_cast<std::size_t>(y) * 150 + x] = 1;
          while (!stack.empty()) {
            auto [cy, cx] = stack.back();
            stack.pop_back();
            ++size;
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                int ny = cy + dy, nx = cx + dx;
                if (ny < 0 || ny >= 80 || nx < 0 || nx >= 150) continue;
                if (!m.at(ny, nx) || seen[static_cast<std::size_t>(ny) * 150 + nx])
                  continue;
                seen[static_cast<std::size_t>(ny) * 150 + nx] = 1;
                stack.emplace_back(ny, nx);
              }
          }
          best = std::max(best, size);
        }
      ComponentStart pick = largest_component_start(m);
      CHECK(pick.components == comps);
      CHECK(pick.area == best);
      MaskRaster kept = largest_component(m);
      CHECK(kept.area() == best);
      CHECK(largest_component(kept) == kept);
    }
  }

  TEST_CASE("centroid signature of square corners") {
    Contour c = make_contour({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    CentroidSignature sig = centroid_signature(c);
    CHECK(sig.x_c == doctest::Approx(1.0));
    CHECK(sig.y_c == doctest::Approx(1.0));
    for (double r : sig.r) CHECK(r == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("centroid signature of a single point") {
    Contour c = make_contour({{5, 7}});
    CentroidSignature sig = centroid_signature(c);
    CHECK(sig.x_c == 5.0);
    CHECK(sig.y_c == 7.0);
    REQUIRE(sig.r.size() == 1);
    CHECK(sig.r[0] == 0.0);
  }

  TEST_CASE("signature is exactly translation invariant on integer contours") {
    Contour c = make_contour({{0, 0}, {3, 1}, {5, 4}, {2, 6}, {1, 3}, {0, 1}, {4, 2}});
    Contour t = c;
    for (auto& p : t.points) {
      p.x += 137;
      p.y += 4096;
    }
    auto sa = centroid_signature(c);
    auto sb = centroid_signature(t);
    REQUIRE(sa.r.size() == sb.r.size());
    for (std::size_t i = 0; i < sa.r.size(); ++i) CHECK(sa.r[i] == sb.r[i]);
  }

  TEST_CASE("descriptor of an analytic two-harmonic signature") {
    const int n = 64;
    CentroidSignature sig;
    sig.r.resize(n);
    for (int i = 0; i < n; ++i)
      sig.r[static_cast<std::size_t>(i)] =
          2.0 + std::cos(2.0 * kPi * i / n) + 0.5 * std::cos(4.0 * kPi * i / n);
    FourierDescriptor fd = fourier_descriptor(sig, 1);
    REQUIRE(fd.values.size() == 1);
    // |G_1| = 0.5, |G_2| = 0.25
    CHECK(fd.values[0] == doctest::Approx(0.5).epsilon(1e-12));
    FourierDescriptor fd2 = fourier_descriptor(sig, 2);
    CHECK(std::abs(fd2.values[1]) < 1e-12);
  }

  TEST_CASE("constant signature is degenerate") {
    CentroidSignature sig;
    sig.r.assign(32, 3.0);
    CHECK_THROWS_AS(fourier_descriptor(sig, 5), DegenerateSignature);
  }

  TEST_CASE("too few points") {
    CentroidSignature sig;
    sig.r.assign(6, 1.0);
    CHECK_THROWS_AS(fourier_descriptor(sig, 5), TooFewPoints);
  }

  TEST_CASE("scaling a contour about its centroid leaves the descriptor") {
    Contour c = lumpy_contour(96, 10, 40, 30);
    auto base = fourier_descriptor(centroid_signature(c), 5);
    CentroidSignature sig = centroid_signature(c);
    Contour scaled = c;
    for (auto& p : scaled.points) {
      p.x = sig.x_c + 3.0 * (p.x - sig.x_c);
      p.y = sig.y_c + 3.0 * (p.y - sig.y_c);
    }
    auto big = fourier_descriptor(centroid_signature(scaled), 5);
    for (std::size_t i = 0; i < base.values.size(); ++i)
      CHECK(big.values[i] == doctest::Approx(base.values[i]).epsilon(1e-9));
  }

  TEST_CASE("rotation with integer start shift leaves magnitudes") {
    Contour c = lumpy_contour(128, 10);
    auto base = fourier_descriptor(centroid_signature(c), 5);
    const double rot = 0.83;
    const int shift = 37;
    Contour moved;
    for (int i = 0; i < c.size(); ++i) {
      const auto& p = c.points[static_cast<std::size_t>((i + shift) % c.size())];
      moved.points.push_back({p.x * std::cos(rot) - p.y * std::sin(rot),
                              p.x * std::sin(rot) + p.y * std::cos(rot)});
    }
    auto rotated = fourier_descriptor(centroid_signature(moved), 5);
    for (std::size_t i = 0; i < base.values.size(); ++i)
      CHECK(rotated.values[i] == doctest::Approx(base.values[i]).epsilon(1e-6));
  }

  TEST_CASE("ellipse fit recovers an axis-aligned ellipse") {
    EllipseFit fit = fit_ellipse(ellipse_samples(2, 1, 0, 64, 10, 20));
    CHECK(fit.axis_ratio == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::min(fit.theta, kPi - fit.theta) < 1e-9);
    CHECK(fit.residual < 1e-9);
    const auto& k = fit.coefficients;
    CHECK(k[1] * k[1] - 4 * k[0] * k[2] < 0);
  }

  TEST_CASE("ellipse fit recovers a 30-degree rotation") {
    EllipseFit fit = fit_ellipse(ellipse_samples(2, 1, kPi / 6, 64, -5, 3));
    CHECK(fit.axis_ratio == doctest::Approx(2.0).epsilon(0.01));
    CHECK(fit.theta == doctest::Approx(kPi / 6).epsilon(0.5 / 30.0));
  }

  TEST_CASE("circles report theta 0") {
    EllipseFit fit = fit_ellipse(ellipse_samples(3, 3, 0, 48, 7, 7));
    CHECK(fit.axis_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.theta == 0.0);
    CHECK(fit.theta_norm == 0.0);
  }

  TEST_CASE("degenerate ellipse inputs") {
    Contour four = make_contour({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK_THROWS_AS(fit_ellipse(four), InsufficientPoints);
    Contour line = make_contour({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}});
    CHECK_THROWS_AS(fit_ellipse(line), DegenerateGeometry);
  }

  TEST_CASE("fit either errors or returns a true ellipse") {
    test::TestRng rng(5150);
    int fitted = 0;
    for (int trial = 0; trial < 60; ++trial) {
      Contour c;
      int n = 5 + static_cast<int>(rng.next_below(20));
      for (int i = 0; i < n; ++i)
        c.points.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
      try {
        EllipseFit fit = fit_ellipse(c);
        const auto& k = fit.coefficients;
        CHECK(k[1] * k[1] - 4 * k[0] * k[2] < 0);
        CHECK(fit.axis_ratio >= 1.0);
        CHECK(fit.theta_norm >= 0.0);
        CHECK(fit.theta_norm < 1.0);
        ++fitted;
      } catch (const DegenerateGeometry&) {
      }
    }
    CHECK(fitted > 0);
  }

  TEST_CASE("shape feature has length fd_length + 2 and is deterministic") {
    MaskRaster m = snowman_mask(64, 48, 20, 24, 1.0);
    ShapeFeature a = extract_shape_feature(m, 5);
    ShapeFeature b = extract_shape_feature(m, 5);
    REQUIRE(a.values.size() == 7);
    CHECK(a.values == b.values);
  }

  TEST_CASE("shape feature is exactly translation invariant in its fd part") {
    MaskRaster m = snowman_mask(96, 96, 25, 30, 1.0);
    MaskRaster t = translate_mask(m, 17, 23);
    REQUIRE(t.area() == m.area());
    ShapeFeature a = extract_shape_feature(m, 5);
    ShapeFeature b = extract_shape_feature(t, 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(a.values[i] == b.values[i]);
    CHECK(a.values[5] == doctest::Approx(b.values[5]).epsilon(1e-9));
    CHECK(a.values[6] == doctest::Approx(b.values[6]).epsilon(1e-9));
  }

  TEST_CASE("raster scale invariance within tolerance") {
    auto table = synth::standard_shape_table();
    synth::PlantSpec spec;
    spec.harmonics = table[6].harmonics;
    spec.phases = table[6].phases;
    spec.eccentricity = table[6].eccentricity;
    spec.orientation = table[6].orientation;
    spec.base_radius = 48;
    ShapeFeature a = extract_shape_feature(synth::rasterize_silhouette(spec), 5);
    spec.base_radius = 144;
    ShapeFeature b = extract_shape_feature(synth::rasterize_silhouette(spec), 5);
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(std::abs(a.values[i] - b.values[i]) < 0.05);
  }
}
