#pragma once

// Parameterized integration domains (loops, disks, spheres, balls).

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gencon {

using Vec = std::vector<double>;
using ChartPoint = Vec;

struct SurfacePatch {
  int dim = 0;        ///< parameter dimension
  int chart_dim = 0;  ///< dimension of the target chart
  Vec lower, upper;   ///< parameter box
  std::function<ChartPoint(const Vec&)> map;
  /// Columns d map / d q_j, one vector of length chart_dim per parameter.
  std::function<std::vector<Vec>(const Vec&)> jacobian;
  int orientation = 1;
  /// Faces (axis, side: 0 lower / 1 upper) toward which the initial mesh is
  /// geometrically graded; used where a regularized singularity meets the patch.
  std::vector<std::pair<int, int>> graded_faces;
  std::string label;
};

enum class SphereOrientation { Outward, Inward };

/// Box [lower, upper] in a chart of the same dimension (identity map).
SurfacePatch box_patch(const Vec& lower, const Vec& upper);
/// Circle of radius r in the (ax, ay) coordinate plane, t in [0, 2pi].
SurfacePatch circle_patch(int chart_dim, const Vec& center, double radius, int ax = 0, int ay = 1);
/// Disk of radius r in the (ax, ay) plane, polar parameters (rho, phi), graded toward rho = 0.
SurfacePatch disk_patch(int chart_dim, const Vec& center, double radius, int ax = 0, int ay = 1);
/// Two polar caps covering the sphere of radius r in the (ax, ay, az) subspace.
std::vector<SurfacePatch> sphere_patches(int chart_dim, const Vec& center, double radius,
                                         SphereOrientation orient = SphereOrientation::Outward,
                                         int ax = 0, int ay = 1, int az = 2);
/// Four-ball of radius r in hyperspherical coordinates, positively oriented.
SurfacePatch ball4_patch(const Vec& center, double radius);

/// Largest relative mismatch between patch.jacobian and central differences of patch.map.
double jacobian_defect(const SurfacePatch& patch, const Vec& q);

}  // namespace gencon
