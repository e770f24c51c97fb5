#pragma once

// Invariant polynomials, Chern forms and Chern numbers.

#include "gencon/connection.hpp"
#include "gencon/quadrature.hpp"

#include <optional>
#include <span>

namespace gencon {

/// Polarized coefficient of det(lambda I - A / 2 pi i): f_1(A) = -tr A / 2 pi i,
/// f_2(A, B) = -(tr A tr B - tr AB) / 8 pi^2 (so f_2(A, A) = det A / (2 pi i)^2).
/// Throws ShapeError when k exceeds the matrix size or the argument count differs from k.
cplx invariant_poly(int k, std::span<const LieValue> args);
cplx invariant_poly(int k, const LieValue& a);

struct ChernForm {
  int k = 1;
  KForm form;  ///< complex scalar 2k-form
};

/// c_1 = f_1(F); c_2 = f_2(F ^ F) with the 1/(2! 2!) antisymmetrization of the
/// wedge engine. Derivatives follow from those of F by the product rule.
ChernForm chern_form(const KForm& A, int k);
ChernForm chern_form(const GaugePotential& A, double eps, int k);

struct ChernOptions {
  bool require_closed = true;
  std::optional<double> tol;  ///< per-sample quadrature tolerance (default_tolerance when empty)
};

struct ChernNumberResult {
  GeneralizedNumber net;
  Extrapolation ext;
};

/// Integral of c_k over the patches (2k-dimensional) per ladder entry, extrapolated.
ChernNumberResult chern_number(const GaugePotential& A, std::span<const SurfacePatch> patches,
                               const EpsilonLadder& ladder, const ChernOptions& opts = {});
/// Single-eps integral of c_k.
QuadratureResult chern_integral(const KForm& A, std::span<const SurfacePatch> patches, double tol);

/// |integral of d beta| for fixed polynomial beta; ~0 exactly when the patches form a cycle.
double boundary_defect(std::span<const SurfacePatch> patches);

/// max over samples and (2k+1)-index triples of |d c_k|; analytic derivatives
/// when the form has them unless `finite_differences` is set.
double closedness_residual(const ChernForm& cf, std::span<const ChartPoint> samples, bool finite_differences = false);

}  // namespace gencon
