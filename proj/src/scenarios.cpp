#include "gencon/scenarios.hpp"

#include "gencon/errors.hpp"

#include <cmath>

namespace gencon {

namespace {

template <class F>
KForm field_form(int degree, int dim, AlgebraTag tag, std::vector<LieValue> basis, F fn) {
  const int n = static_cast<int>(multi_indices(dim, degree).size()) * static_cast<int>(basis.size());
  return KForm::from_field(degree, dim, tag, std::move(basis), SmoothField::from(dim, n, fn, 3));
}

std::vector<LieValue> u1_basis() { return {LieValue::u1(1.0)}; }

template <class T>
void regular_coords(RegularPart a, std::span<const T> x, std::span<T> c) {
  using std::exp;
  for (auto& v : c) v = T(0.0);
  switch (a) {
    case RegularPart::Zero:
      break;
    case RegularPart::Polynomial:
      c[0 * 3 + 0] = 0.3 * x[2];
      c[0 * 3 + 2] = 0.2 * x[3];
      c[1 * 3 + 1] = 0.5 * x[3];
      c[2 * 3 + 0] = 0.4 * x[0];
      c[2 * 3 + 1] = 0.1 * x[1];
      c[3 * 3 + 2] = 0.25 * (x[0] * x[1]);
      break;
    case RegularPart::Gaussian: {
      T g = exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]));
      c[2 * 3 + 0] = g;
      c[3 * 3 + 1] = g;
      c[0 * 3 + 2] = 0.5 * g;
      break;
    }
  }
}

}  // namespace

Scenario flat_wire(double alpha) {
  Scenario s;
  s.name = "flat_wire";
  s.description = "U(1) wire potential i alpha (x dy - y dx)/(x^2+y^2+eps^2) on R^4";
  s.alpha = alpha;
  s.potential.tag = AlgebraTag::u1();
  s.potential.dim = 4;
  s.potential.family = {[alpha](double eps) {
                          return field_form(1, 4, AlgebraTag::u1(), u1_basis(), [alpha, eps](auto x, auto out) {
                            using T = typename decltype(x)::value_type;
                            T d = x[0] * x[0] + x[1] * x[1] + eps * eps;
                            out[0] = -alpha * x[1] / d;
                            out[1] = alpha * x[0] / d;
                            out[2] = T(0.0);
                            out[3] = T(0.0);
                          });
                        },
                        "flat_wire potential"};
  s.pieces.push_back({"F", {[alpha](double eps) {
                              return field_form(2, 4, AlgebraTag::u1(), u1_basis(), [alpha, eps](auto x, auto out) {
                                using T = typename decltype(x)::value_type;
                                T d = x[0] * x[0] + x[1] * x[1] + eps * eps;
                                for (auto& o : out) o = T(0.0);
                                out[0] = 2.0 * eps * eps * alpha / (d * d);
                              });
                            },
                            "flat_wire curvature"}});
  s.default_region = CompactRegion({-1, -1, -1, -1}, {1, 1, 1, 1});
  s.default_patches = {disk_patch(4, {0, 0, 0, 0}, 1.0)};
  s.default_loops = {ParamCurve::circle(4, {0, 0, 0, 0}, 1.0)};
  return s;
}

Scenario dirac_monopole(double alpha) {
  Scenario s;
  s.name = "dirac_monopole";
  s.description = "U(1) monopole with regularized Dirac string along the negative z-axis on R^3";
  s.alpha = alpha;
  s.potential.tag = AlgebraTag::u1();
  s.potential.dim = 3;
  s.potential.family = {[alpha](double eps) {
                          return field_form(1, 3, AlgebraTag::u1(), u1_basis(), [alpha, eps](auto x, auto out) {
                            using T = typename decltype(x)::value_type;
                            using std::sqrt;
                            T rho2 = x[0] * x[0] + x[1] * x[1];
                            T sq = sqrt(rho2 + x[2] * x[2] + eps * eps);
                            T h = 0.5 * alpha * (x[2] / sq - 1.0) / (rho2 + eps * eps);
                            out[0] = -(h * x[1]);
                            out[1] = h * x[0];
                            out[2] = T(0.0);
                          });
                        },
                        "dirac_monopole potential"};
  // Pair order of 2-form coefficients: dx^dy, dx^dz, dy^dz.
  s.pieces.push_back({"F1", {[alpha](double eps) {
                               return field_form(2, 3, AlgebraTag::u1(), u1_basis(), [alpha, eps](auto x, auto out) {
                                 using T = typename decltype(x)::value_type;
                                 using std::sqrt;
                                 T sq = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + eps * eps);
                                 T s3 = sq * sq * sq;
                                 out[0] = -0.5 * alpha * x[2] / s3;
                                 out[1] = 0.5 * alpha * x[1] / s3;
                                 out[2] = -0.5 * alpha * x[0] / s3;
                               });
                             },
                             "monopole term"}});
  s.pieces.push_back({"F2", {[alpha](double eps) {
                               return field_form(2, 3, AlgebraTag::u1(), u1_basis(), [alpha, eps](auto x, auto out) {
                                 using T = typename decltype(x)::value_type;
                                 using std::sqrt;
                                 T d = x[0] * x[0] + x[1] * x[1] + eps * eps;
                                 T sq = sqrt(d + x[2] * x[2]);
                                 out[0] = 0.5 * alpha * eps * eps * x[2] / (sq * sq * sq * d);
                                 out[1] = T(0.0);
                                 out[2] = T(0.0);
                               });
                             },
                             "regularization term"}});
  s.pieces.push_back({"F3", {[alpha](double eps) {
                               return field_form(2, 3, AlgebraTag::u1(), u1_basis(), [alpha, eps](auto x, auto out) {
                                 using T = typename decltype(x)::value_type;
                                 using std::sqrt;
                                 T d = x[0] * x[0] + x[1] * x[1] + eps * eps;
                                 T sq = sqrt(d + x[2] * x[2]);
                                 out[0] = (x[2] / sq - 1.0) * alpha * eps * eps / (d * d);
                                 out[1] = T(0.0);
                                 out[2] = T(0.0);
                               });
                             },
                             "wire term"}});
  s.default_region = CompactRegion({-1, -1, -1}, {1, 1, 1});
  s.default_patches = sphere_patches(3, {0, 0, 0}, 1.0, SphereOrientation::Inward);
  s.default_loops = {ParamCurve::circle(3, {0, 0, 0}, 1.0)};
  return s;
}

KForm su2_regular_form(RegularPart a) {
  return field_form(1, 4, AlgebraTag::su2(), basis(AlgebraTag::su2()), [a](auto x, auto out) {
    using T = typename decltype(x)::value_type;
    regular_coords<T>(a, x, out);
  });
}

RegularPart parse_regular_part(const std::string& name) {
  if (name == "zero") return RegularPart::Zero;
  if (name == "polynomial") return RegularPart::Polynomial;
  if (name == "gaussian") return RegularPart::Gaussian;
  throw ShapeError("unknown regular part '" + name + "' (expected zero, polynomial or gaussian)");
}

std::string regular_part_name(RegularPart a) {
  switch (a) {
    case RegularPart::Zero:
      return "zero";
    case RegularPart::Polynomial:
      return "polynomial";
    case RegularPart::Gaussian:
      return "gaussian";
  }
  return "zero";
}

Scenario su2_singular(double alpha, RegularPart a) {
  Scenario s;
  s.name = "su2_singular";
  s.description = "SU(2) connection 2 alpha e3 A_eps + a singular along {x1 = x2 = 0} on R^4, a = " +
                  regular_part_name(a);
  s.alpha = alpha;
  s.potential.tag = AlgebraTag::su2();
  s.potential.dim = 4;
  s.potential.family = {[alpha, a](double eps) {
                          return field_form(1, 4, AlgebraTag::su2(), basis(AlgebraTag::su2()),
                                            [alpha, a, eps](auto x, auto out) {
                                              using T = typename decltype(x)::value_type;
                                              regular_coords<T>(a, x, out);
                                              T d = x[0] * x[0] + x[1] * x[1] + eps * eps;
                                              out[0 * 3 + 2] += 2.0 * alpha * (-x[1] / d);
                                              out[1 * 3 + 2] += 2.0 * alpha * (x[0] / d);
                                            });
                        },
                        "su2_singular potential"};
  s.pieces.push_back({"F1", {[alpha, a](double eps) {
                               return field_form(2, 4, AlgebraTag::su2(), basis(AlgebraTag::su2()),
                                                 [alpha, a, eps](auto x, auto out) {
                                                   using T = typename decltype(x)::value_type;
                                                   T c[12];
                                                   regular_coords<T>(a, x, std::span<T>(c, 12));
                                                   T d = x[0] * x[0] + x[1] * x[1] + eps * eps;
                                                   const T A[4] = {-x[1] / d, x[0] / d, T(0.0), T(0.0)};
                                                   const auto& pairs = multi_indices(4, 2);
                                                   for (std::size_t q = 0; q < pairs.size(); ++q) {
                                                     const int i = pairs[q][0], j = pairs[q][1];
                                                     out[q * 3 + 0] = -2.0 * alpha * (c[i * 3 + 1] * A[j] - c[j * 3 + 1] * A[i]);
                                                     out[q * 3 + 1] = 2.0 * alpha * (c[i * 3 + 0] * A[j] - c[j * 3 + 0] * A[i]);
                                                     out[q * 3 + 2] = T(0.0);
                                                   }
                                                   out[0 * 3 + 2] = 4.0 * alpha * eps * eps / (d * d);
                                                 });
                             },
                             "singular term"}});
  const KForm F2 = curvature_form(su2_regular_form(a));
  s.pieces.push_back({"F2", {[F2](double) { return F2; }, "curvature of the regular part"}});
  s.default_region = CompactRegion({-1, -1, -1, -1}, {1, 1, 1, 1});
  s.default_patches = {disk_patch(4, {0, 0, 0, 0}, 1.0)};
  s.default_loops = {ParamCurve::circle(4, {0, 0, 0, 0}, 1.0)};
  return s;
}

std::vector<std::string> scenario_names() { return {"flat_wire", "dirac_monopole", "su2_singular"}; }

Scenario make_scenario(const std::string& name, double alpha, RegularPart a) {
  if (!std::isfinite(alpha)) throw ShapeError("alpha must be finite");
  if (name == "flat_wire") return flat_wire(alpha);
  if (name == "dirac_monopole") return dirac_monopole(alpha);
  if (name == "su2_singular") return su2_singular(alpha, a);
  throw ShapeError("unknown scenario '" + name + "'");
}

}  // namespace gencon
