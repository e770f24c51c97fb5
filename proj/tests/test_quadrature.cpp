#include "doctest.h"
#include "oracles.hpp"

#include "gencon/errors.hpp"
#include "gencon/quadrature.hpp"
#include "gencon/scenarios.hpp"

#include <cmath>

using namespace gencon;

namespace {

KForm scalar_constant(int degree, int dim, std::vector<cplx> c) {
  KForm::Coefficients cs;
  for (cplx z : c) cs.push_back(LieValue::scalar(z));
  return KForm::constant(degree, dim, cs);
}

KForm dphi_form() {
  return KForm(1, 4, AlgebraTag::scalar(), [](const ChartPoint& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    return KForm::Coefficients{LieValue::scalar(-p[1] / r2), LieValue::scalar(p[0] / r2), LieValue::scalar(0.0),
                               LieValue::scalar(0.0)};
  });
}

}  // namespace

TEST_CASE("patch Jacobians agree with finite differences") {
  oracle::Rng rng;
  std::vector<SurfacePatch> patches{box_patch({-1, 0}, {1, 2}), circle_patch(4, {0.1, 0, 0, 0}, 1.5),
                                    disk_patch(4, {0, 0, 0, 0}, 2.0, 1, 2), ball4_patch({0, 0, 0, 0}, 2.0)};
  for (const auto& s : sphere_patches(3, {0, 0, 0}, 1.0)) patches.push_back(s);
  for (const auto& s : sphere_patches(4, {0, 0, 0, 0}, 1.0, SphereOrientation::Inward)) patches.push_back(s);
  for (const auto& patch : patches) {
    for (int i = 0; i < 10; ++i) {
      Vec q(static_cast<std::size_t>(patch.dim));
      for (int j = 0; j < patch.dim; ++j) {
        const double lo = patch.lower[static_cast<std::size_t>(j)], hi = patch.upper[static_cast<std::size_t>(j)];
        q[static_cast<std::size_t>(j)] = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
      }
      CHECK(jacobian_defect(patch, q) <= 1e-6);
    }
  }
}

TEST_CASE("Gauss-Legendre rule is exact to degree 13") {
  const GaussRule r = gauss_legendre(7);
  REQUIRE(r.nodes.size() == 7);
  for (int deg = 0; deg <= 14; ++deg) {
    double s = 0.0;
    for (std::size_t i = 0; i < 7; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
    const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
    if (deg <= 13)
      CHECK(std::abs(s - exact) <= 1e-14);
    else
      CHECK(std::abs(s - exact) > 1e-6);
  }
  QuadratureOptions opts;
  opts.tol = 1e-13;
  const auto res = integrate_box([](const Vec& x) { return cplx(std::pow(x[0], 13) * std::pow(x[1], 12)); },
                                 {0, 0}, {1, 1}, opts);
  CHECK(std::abs(res.value - 1.0 / (14.0 * 13.0)) <= 1e-14);
}

TEST_CASE("base rule converges with order >= 10 under uniform refinement") {
  const GaussRule r = gauss_legendre(7);
  auto composite = [&](int cells) {
    double s = 0.0;
    const double h = 2.0 / cells;
    for (int c = 0; c < cells; ++c)
      for (std::size_t i = 0; i < 7; ++i) {
        const double x = -1.0 + h * (c + 0.5 * (r.nodes[i] + 1.0));
        s += 0.5 * h * r.weights[i] / (1.0 + 4.0 * x * x);
      }
    return s;
  };
  const double exact = std::atan(2.0);
  const double e1 = std::abs(composite(4) - exact), e2 = std::abs(composite(8) - exact);
  CHECK(std::log2(e1 / e2) >= 10.0);
}

TEST_CASE("integrate_form examples") {
  const KForm dxdy = scalar_constant(2, 2, {1.0});
  CHECK(std::abs(integrate_form(dxdy, box_patch({0, 0}, {1, 1})).value - 1.0) <= 1e-14);

  const Scenario wire = flat_wire(1.0);
  for (double eps : {0.5, 0.1, 0.01}) {
    for (double R : {1.0, 2.0}) {
      const KForm F = wire.pieces[0].family(eps);
      const auto res = integrate_form(F, disk_patch(4, {0, 0, 0, 0}, R));
      CHECK(std::abs(res.value - cplx(0.0, oracle::wire_disk_flux(R, eps, 1.0))) <= 1e-8);
      CHECK(res.err_est <= 1e-8);
    }
  }
  CHECK(std::abs(integrate_form(dphi_form(), circle_patch(4, {0, 0, 0, 0}, 1.0)).value - 2.0 * oracle::pi) <= 1e-12);
  CHECK_THROWS_AS(integrate_form(dxdy, circle_patch(2, {0, 0}, 1.0)), ShapeError);
}

TEST_CASE("property: orientation reversal negates exactly") {
  const KForm F = flat_wire(0.7).pieces[0].family(0.05);
  SurfacePatch disk = disk_patch(4, {0.1, 0, 0, 0}, 1.0);
  const cplx forward = integrate_form(F, disk).value;
  disk.orientation = -disk.orientation;
  CHECK(integrate_form(F, disk).value == -forward);
}

TEST_CASE("property: additivity over a split parameter box") {
  const KForm F = flat_wire(1.0).pieces[0].family(0.05);
  QuadratureOptions opts;
  opts.tol = 1e-9;
  const SurfacePatch disk = disk_patch(4, {0, 0, 0, 0}, 1.0);
  SurfacePatch left = disk, right = disk;
  left.upper[1] = 2.0;
  right.lower[1] = 2.0;
  const cplx whole = integrate_form(F, disk, opts).value;
  const cplx parts = integrate_form(F, left, opts).value + integrate_form(F, right, opts).value;
  CHECK(std::abs(whole - parts) <= 2 * opts.tol);
}

TEST_CASE("near-singular disk at eps = 2^-14 reaches tol 1e-6") {
  const double eps = std::ldexp(1.0, -14);
  const KForm F = flat_wire(1.0).pieces[0].family(eps);
  QuadratureOptions opts;
  opts.tol = 1e-6;
  const auto res = integrate_form(F, disk_patch(4, {0, 0, 0, 0}, 1.0), opts);
  CHECK(res.err_est <= 1e-6);
  CHECK(res.cells <= opts.max_cells);
  CHECK(std::abs(res.value - cplx(0.0, oracle::wire_disk_flux(1.0, eps, 1.0))) <= 1e-6);

  // An off-centre disk is not graded toward the peak; a tiny budget must fail loudly.
  QuadratureOptions tiny;
  tiny.tol = 1e-12;
  tiny.max_cells = 64;
  CHECK_THROWS_WITH_AS(integrate_form(F, disk_patch(4, {0.3, 0.2, 0, 0}, 1.0), tiny),
                       doctest::Contains("cell budget exhausted"), NumericalError);
}

TEST_CASE("default tolerance policy") {
  CHECK(default_tolerance(0.5) == 1e-8);
  CHECK(default_tolerance(std::ldexp(1.0, -10)) == 1e-8);
  CHECK(default_tolerance(std::ldexp(1.0, -12)) == doctest::Approx(4e-8));
}

TEST_CASE("flux_limit examples") {
  const EpsilonFamily constant{[](double) { return scalar_constant(2, 2, {cplx(0.0, 3.0)}); }, "constant"};
  const std::vector<SurfacePatch> square{box_patch({0, 0}, {2, 1})};
  const auto res = flux_limit(constant, square, EpsilonLadder());
  CHECK(std::abs(res.ext.limit - cplx(0.0, 6.0)) <= 1e-12);

  const Scenario wire = flat_wire(1.0);
  const std::vector<SurfacePatch> disk{disk_patch(4, {0, 0, 0, 0}, 1.0)};
  const auto flux = flux_limit(wire.pieces[0].family, disk, EpsilonLadder());
  CHECK(std::abs(flux.ext.limit - cplx(0.0, 2.0 * oracle::pi)) <= 1e-6);
  CHECK(flux.ext.order == doctest::Approx(2.0).epsilon(0.05));
  for (int k = 0; k < flux.net.ladder.count(); ++k)
    CHECK(std::abs(flux.net.values[static_cast<std::size_t>(k)].imag() -
                   oracle::wire_disk_flux(1.0, flux.net.ladder[k], 1.0)) <= 1e-7);
}

TEST_CASE("monopole second piece has vanishing sphere flux") {
  const Scenario mono = dirac_monopole(1.0);
  const auto res = flux_limit(mono.pieces[1].family, mono.default_patches, EpsilonLadder());
  CHECK(std::abs(res.ext.limit) <= 1e-3);
}
