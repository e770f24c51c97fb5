#pragma once

// Adaptive tensor Gauss-Legendre integration of pulled-back forms over patches.

#include "gencon/epsilon.hpp"
#include "gencon/forms.hpp"
#include "gencon/patch.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

namespace gencon {

struct QuadratureOptions {
  double tol = 1e-8;                    ///< absolute target for the summed error estimate
  std::size_t max_cells = std::size_t{1} << 20;
  int graded_levels = 45;               ///< dyadic levels of the initial mesh toward graded faces
  int initial_split = 2;                ///< initial cells per non-graded axis
};

struct QuadratureResult {
  cplx value{};
  double err_est = 0.0;
  std::size_t cells = 0;
  std::size_t evaluations = 0;
};

/// Scalar weight multiplying the integrand, evaluated at chart points.
using Weight = std::function<double(const ChartPoint&)>;

/// Integral of f over patch (degrees must match). The form must be 1x1-valued
/// (u(1) or complex scalar); the (0,0) entry is integrated.
QuadratureResult integrate_form(const KForm& f, const SurfacePatch& patch, const QuadratureOptions& opts = {},
                                const Weight& weight = {});
/// Sum over several patches (e.g. the two caps of a sphere); tol is shared evenly.
QuadratureResult integrate_form(const KForm& f, std::span<const SurfacePatch> patches,
                                const QuadratureOptions& opts = {}, const Weight& weight = {});

/// Integral of a plain integrand over a parameter box with the same engine.
QuadratureResult integrate_box(const std::function<cplx(const Vec&)>& g, const Vec& lower, const Vec& upper,
                               const QuadratureOptions& opts = {},
                               const std::vector<std::pair<int, int>>& graded_faces = {});

/// 1e-8 for eps >= 2^-10, growing like 1/eps below.
double default_tolerance(double eps);

struct FluxLimitResult {
  GeneralizedNumber net;
  Extrapolation ext;
};

/// Per-eps integrals over the patches, then extrapolation to eps -> 0.
/// Without an explicit tol, default_tolerance(eps) is used per sample.
FluxLimitResult flux_limit(const EpsilonFamily& fam, std::span<const SurfacePatch> patches,
                           const EpsilonLadder& ladder, std::optional<double> tol = std::nullopt,
                           const Weight& weight = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes, weights;
};
GaussRule gauss_legendre(int n);

}  // namespace gencon
