#include "gencon/patch.hpp"

#include "gencon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gencon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_center(int chart_dim, const Vec& center, std::initializer_list<int> axes) {
  if (static_cast<int>(center.size()) != chart_dim) throw ShapeError("patch center has wrong dimension");
  for (int a : axes)
    if (a < 0 || a >= chart_dim) throw ShapeError("patch axis out of range");
  if (chart_dim < static_cast<int>(axes.size())) throw ShapeError("chart too small for patch");
}

double det4(const std::vector<Vec>& c) {
  double m[4][4];
  for (int r = 0; r < 4; ++r)
    for (int k = 0; k < 4; ++k) m[r][k] = c[k][r];
  double det = 1.0;
  for (int k = 0; k < 4; ++k) {
    int piv = k;
    for (int r = k + 1; r < 4; ++r)
      if (std::abs(m[r][k]) > std::abs(m[piv][k])) piv = r;
    if (m[piv][k] == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < 4; ++j) std::swap(m[piv][j], m[k][j]);
      det = -det;
    }
    det *= m[k][k];
    for (int r = k + 1; r < 4; ++r) {
      double f = m[r][k] / m[k][k];
      for (int j = k; j < 4; ++j) m[r][j] -= f * m[k][j];
    }
  }
  return det;
}

}  // namespace

SurfacePatch box_patch(const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size() || lower.empty()) throw ShapeError("box bounds must have equal nonzero length");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i])) throw ShapeError("box bounds must satisfy lower < upper");
  SurfacePatch p;
  p.dim = p.chart_dim = static_cast<int>(lower.size());
  p.lower = lower;
  p.upper = upper;
  p.map = [](const Vec& q) { return q; };
  const int n = p.dim;
  p.jacobian = [n](const Vec&) {
    std::vector<Vec> cols(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) cols[i][i] = 1.0;
    return cols;
  };
  p.label = "box";
  return p;
}

SurfacePatch circle_patch(int chart_dim, const Vec& center, double radius, int ax, int ay) {
  check_center(chart_dim, center, {ax, ay});
  if (!(radius > 0.0)) throw ShapeError("circle radius must be positive");
  SurfacePatch p;
  p.dim = 1;
  p.chart_dim = chart_dim;
  p.lower = {0.0};
  p.upper = {kTwoPi};
  p.map = [=](const Vec& q) {
    ChartPoint x = center;
    x[ax] += radius * std::cos(q[0]);
    x[ay] += radius * std::sin(q[0]);
    return x;
  };
  p.jacobian = [=](const Vec& q) {
    Vec c(static_cast<std::size_t>(chart_dim), 0.0);
    c[ax] = -radius * std::sin(q[0]);
    c[ay] = radius * std::cos(q[0]);
    return std::vector<Vec>{c};
  };
  p.label = "circle";
  return p;
}

SurfacePatch disk_patch(int chart_dim, const Vec& center, double radius, int ax, int ay) {
  check_center(chart_dim, center, {ax, ay});
  if (!(radius > 0.0)) throw ShapeError("disk radius must be positive");
  SurfacePatch p;
  p.dim = 2;
  p.chart_dim = chart_dim;
  p.lower = {0.0, 0.0};
  p.upper = {radius, kTwoPi};
  p.map = [=](const Vec& q) {
    ChartPoint x = center;
    x[ax] += q[0] * std::cos(q[1]);
    x[ay] += q[0] * std::sin(q[1]);
    return x;
  };
  p.jacobian = [=](const Vec& q) {
    Vec c0(static_cast<std::size_t>(chart_dim), 0.0), c1(static_cast<std::size_t>(chart_dim), 0.0);
    c0[ax] = std::cos(q[1]);
    c0[ay] = std::sin(q[1]);
    c1[ax] = -q[0] * std::sin(q[1]);
    c1[ay] = q[0] * std::cos(q[1]);
    return std::vector<Vec>{c0, c1};
  };
  p.graded_faces = {{0, 0}};
  p.label = "disk";
  return p;
}

std::vector<SurfacePatch> sphere_patches(int chart_dim, const Vec& center, double radius, SphereOrientation orient,
                                         int ax, int ay, int az) {
  check_center(chart_dim, center, {ax, ay, az});
  if (!(radius > 0.0)) throw ShapeError("sphere radius must be positive");
  std::vector<SurfacePatch> caps;
  for (int hemi : {1, -1}) {
    SurfacePatch p;
    p.dim = 2;
    p.chart_dim = chart_dim;
    p.lower = {0.0, 0.0};
    p.upper = {std::numbers::pi / 2.0, kTwoPi};
    // (s, phi) with s the angle from the pole; outward on the north cap, inward on the south cap.
    p.map = [=](const Vec& q) {
      ChartPoint x = center;
      x[ax] += radius * std::sin(q[0]) * std::cos(q[1]);
      x[ay] += radius * std::sin(q[0]) * std::sin(q[1]);
      x[az] += hemi * radius * std::cos(q[0]);
      return x;
    };
    p.jacobian = [=](const Vec& q) {
      Vec c0(static_cast<std::size_t>(chart_dim), 0.0), c1(static_cast<std::size_t>(chart_dim), 0.0);
      c0[ax] = radius * std::cos(q[0]) * std::cos(q[1]);
      c0[ay] = radius * std::cos(q[0]) * std::sin(q[1]);
      c0[az] = -hemi * radius * std::sin(q[0]);
      c1[ax] = -radius * std::sin(q[0]) * std::sin(q[1]);
      c1[ay] = radius * std::sin(q[0]) * std::cos(q[1]);
      return std::vector<Vec>{c0, c1};
    };
    const int natural = hemi;  // +1 outward for the north cap, -1 for the south cap
    p.orientation = orient == SphereOrientation::Outward ? natural : -natural;
    p.graded_faces = {{0, 0}};
    p.label = hemi > 0 ? "sphere-north" : "sphere-south";
    caps.push_back(std::move(p));
  }
  return caps;
}

SurfacePatch ball4_patch(const Vec& center, double radius) {
  check_center(4, center, {0, 1, 2, 3});
  if (!(radius > 0.0)) throw ShapeError("ball radius must be positive");
  SurfacePatch p;
  p.dim = 4;
  p.chart_dim = 4;
  p.lower = {0.0, 0.0, 0.0, 0.0};
  p.upper = {radius, std::numbers::pi, std::numbers::pi, kTwoPi};
  p.map = [=](const Vec& q) {
    const double r = q[0], a = q[1], b = q[2], c = q[3];
    ChartPoint x = center;
    x[0] += r * std::cos(a);
    x[1] += r * std::sin(a) * std::cos(b);
    x[2] += r * std::sin(a) * std::sin(b) * std::cos(c);
    x[3] += r * std::sin(a) * std::sin(b) * std::sin(c);
    return x;
  };
  p.jacobian = [](const Vec& q) {
    const double r = q[0], a = q[1], b = q[2], c = q[3];
    const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
    const double cc = std::cos(c), sc = std::sin(c);
    return std::vector<Vec>{
        {ca, sa * cb, sa * sb * cc, sa * sb * sc},
        {-r * sa, r * ca * cb, r * ca * sb * cc, r * ca * sb * sc},
        {0.0, -r * sa * sb, r * sa * cb * cc, r * sa * cb * sc},
        {0.0, 0.0, -r * sa * sb * sc, r * sa * sb * cc},
    };
  };
  const double d = det4(p.jacobian({0.5 * radius, 1.0, 1.0, 1.0}));
  p.orientation = d > 0 ? 1 : -1;
  p.label = "ball4";
  return p;
}

double jacobian_defect(const SurfacePatch& patch, const Vec& q) {
  auto cols = patch.jacobian(q);
  double worst = 0.0;
  for (int j = 0; j < patch.dim; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(q[j]));
    Vec qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    auto xp = patch.map(qp), xm = patch.map(qm);
    for (int r = 0; r < patch.chart_dim; ++r) {
      const double fd = (xp[r] - xm[r]) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - cols[j][r]) / std::max(1.0, std::abs(cols[j][r])));
    }
  }
  return worst;
}

}  // namespace gencon
