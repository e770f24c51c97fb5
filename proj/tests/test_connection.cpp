#include "doctest.h"
#include "oracles.hpp"

#include "gencon/connection.hpp"
#include "gencon/errors.hpp"
#include "gencon/scenarios.hpp"

#include <cmath>

using namespace gencon;

namespace {

Vec unit(int m, int i) {
  Vec v(static_cast<std::size_t>(m), 0.0);
  v[static_cast<std::size_t>(i)] = 1.0;
  return v;
}

/// Smooth su(2) potential on R^4 with exact derivatives.
KForm smooth_su2_potential(double s) {
  return KForm::from_field(1, 4, AlgebraTag::su2(), basis(AlgebraTag::su2()),
                           SmoothField::from(4, 12, [s](auto x, auto out) {
                             for (int k = 0; k < 12; ++k) {
                               const double a = 0.3 + 0.21 * k + s, b = 0.7 - 0.05 * k;
                               out[k] = sin(a * x[k % 4] + b * x[(k + 1) % 4]) + 0.2 * x[(k + 3) % 4] * x[(k + 2) % 4];
                             }
                           }));
}

/// Curvature from central differences of the coefficient matrices, independent of the library.
oracle::M2 oracle_curvature(const KForm& A, const Vec& p, const Vec& u, const Vec& v) {
  auto Aof = [&](const Vec& q, int i) -> oracle::M2 {
    auto c = A.coefficients(q)[static_cast<std::size_t>(i)].matrix();
    oracle::M2 m = oracle::M2::Zero();
    m.topLeftCorner(A.tag().n, A.tag().n) = c.topLeftCorner(A.tag().n, A.tag().n);
    return m;
  };
  const int m = A.dim();
  const double h = 1e-4;
  oracle::M2 F = oracle::M2::Zero();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Vec pp = p, pm = p, pp2 = p, pm2 = p;
      pp[static_cast<std::size_t>(i)] += h;
      pm[static_cast<std::size_t>(i)] -= h;
      pp2[static_cast<std::size_t>(i)] += 2 * h;
      pm2[static_cast<std::size_t>(i)] -= 2 * h;
      const oracle::M2 di = (8.0 * (Aof(pp, j) - Aof(pm, j)) - (Aof(pp2, j) - Aof(pm2, j))) / (12 * h);
      const double w = u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] -
                       v[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(j)];
      F += w * di;
    }
  oracle::M2 Au = oracle::M2::Zero(), Av = oracle::M2::Zero();
  for (int i = 0; i < m; ++i) {
    Au += u[static_cast<std::size_t>(i)] * Aof(p, i);
    Av += v[static_cast<std::size_t>(i)] * Aof(p, i);
  }
  return F + oracle::commutator(Au, Av);
}

/// g(x) = exp(t1(x) e3) exp(t2(x) e1) with its exact differential.
GaugeMap su2_gauge() {
  auto t1 = [](const ChartPoint& p) { return 0.8 * p[0] + std::sin(p[1]) * p[2]; };
  auto t2 = [](const ChartPoint& p) { return 0.5 * p[3] * p[0] + 0.3; };
  GaugeMap g;
  g.value = [=](const ChartPoint& p) { return exp(LieValue::su2(0, 0, t1(p))) * exp(LieValue::su2(t2(p), 0, 0)); };
  g.differential = [=](const ChartPoint& p) {
    const Vec d1{0.8, std::cos(p[1]) * p[2], std::sin(p[1]), 0.0};
    const Vec d2{0.5 * p[3], 0.0, 0.0, 0.5 * p[0]};
    const Mat2 a = exp(LieValue::su2(0, 0, t1(p))).matrix(), b = exp(LieValue::su2(t2(p), 0, 0)).matrix();
    const Mat2 e3 = LieValue::su2(0, 0, 1).matrix(), e1 = LieValue::su2(1, 0, 0).matrix();
    std::vector<Mat2> out;
    for (int i = 0; i < 4; ++i) out.push_back(d1[static_cast<std::size_t>(i)] * e3 * a * b + d2[static_cast<std::size_t>(i)] * a * e1 * b);
    return out;
  };
  return g;
}

std::vector<AxiomSample> su2_samples(oracle::Rng& rng, int count) {
  std::vector<AxiomSample> s;
  const auto lattice = group_lattice(AlgebraTag::su2());
  for (int i = 0; i < count; ++i) {
    const Vec x = rng.vec(4);
    const auto& g = lattice[static_cast<std::size_t>(i * 7) % lattice.size()];
    s.push_back({x, g, {rng.vec(4), from_coordinates(AlgebraTag::su2(), rng.vec(3))}});
  }
  return s;
}

}  // namespace

TEST_CASE("curvature examples") {
  const KForm zero = KForm::zero(1, 4, AlgebraTag::su2());
  CHECK(curvature(zero, {0.1, 0.2, 0.3, 0.4}, unit(4, 0), unit(4, 2)).norm() == 0.0);

  const GaugePotential wire = flat_wire(1.0).potential;
  const LieValue F = curvature(wire, 1.0, {0, 0, 0, 0}, unit(4, 0), unit(4, 1));
  CHECK(std::abs(F(0, 0) - cplx(0.0, oracle::wire_curvature(0, 0, 1.0, 1.0))) <= 1e-14);

  oracle::Rng rng;
  const KForm A = smooth_su2_potential(0.1);
  for (int i = 0; i < 50; ++i) {
    const Vec p = rng.vec(4), u = rng.vec(4), v = rng.vec(4);
    CHECK((curvature(A, p, u, v).matrix() - oracle_curvature(A, p, u, v)).norm() <= 1e-8);
  }
}

TEST_CASE("curvature_form keeps exact derivatives and matches pointwise curvature") {
  const KForm A = smooth_su2_potential(0.4);
  const KForm F = curvature_form(A);
  CHECK(F.has_analytic_derivative());
  oracle::Rng rng;
  for (int i = 0; i < 20; ++i) {
    const Vec p = rng.vec(4), u = rng.vec(4), v = rng.vec(4);
    CHECK((evaluate(F, p, std::vector<Vec>{u, v}) - curvature(A, p, u, v)).norm() <= 1e-13);
  }
}

TEST_CASE("property: Bianchi identity") {
  oracle::Rng rng;
  const KForm A = smooth_su2_potential(-0.3);
  for (int i = 0; i < 20; ++i)
    CHECK(bianchi_residual(A, rng.vec(4), rng.vec(4), rng.vec(4), rng.vec(4)).norm() <= 1e-10);
  const double eps = std::ldexp(1.0, -6);
  for (const auto& name : scenario_names()) {
    const Scenario s = make_scenario(name, 0.3);
    const KForm Ae = s.potential.at(eps);
    const int m = s.potential.dim;
    for (int i = 0; i < 20; ++i)
      CHECK(bianchi_residual(Ae, rng.vec(m), rng.vec(m), rng.vec(m), rng.vec(m)).norm() <= 1e-6);
  }
}

TEST_CASE("gauge transform examples") {
  const KForm A = smooth_su2_potential(0.2);
  GaugeMap id{[](const ChartPoint&) { return GroupElement::identity(AlgebraTag::su2()); },
              [](const ChartPoint&) { return std::vector<Mat2>(4, Mat2::Zero()); }};
  const KForm same = gauge_transform(A, id);
  oracle::Rng rng;
  for (int i = 0; i < 10; ++i) {
    const Vec p = rng.vec(4), v = rng.vec(4);
    CHECK((evaluate(same, p, std::vector<Vec>{v}) - evaluate(A, p, std::vector<Vec>{v})).norm() <= 1e-15);
  }

  // U(1): A = i alpha dphi and g = exp(-i n phi).
  const double alpha = 0.3;
  const int n = 2;
  const KForm dphi(1, 2, AlgebraTag::u1(), [alpha](const ChartPoint& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    return KForm::Coefficients{LieValue::u1(-alpha * p[1] / r2), LieValue::u1(alpha * p[0] / r2)};
  });
  GaugeMap phase{[](const ChartPoint& p) { return exp(LieValue::u1(-n * std::atan2(p[1], p[0]))); },
                 [](const ChartPoint& p) {
                   const double r2 = p[0] * p[0] + p[1] * p[1];
                   const cplx g = std::exp(cplx(0.0, -n * std::atan2(p[1], p[0])));
                   std::vector<Mat2> d(2, Mat2::Zero());
                   d[0](0, 0) = g * cplx(0.0, -n) * (-p[1] / r2);
                   d[1](0, 0) = g * cplx(0.0, -n) * (p[0] / r2);
                   return d;
                 }};
  const KForm At = gauge_transform(dphi, phase);
  for (int i = 0; i < 10; ++i) {
    const Vec p{rng.uniform(0.2, 2.0), rng.uniform(-2.0, 2.0)}, v = rng.vec(2);
    const double r2 = p[0] * p[0] + p[1] * p[1];
    const double dphi_v = (p[0] * v[1] - p[1] * v[0]) / r2;
    CHECK(std::abs(evaluate(At, p, std::vector<Vec>{v})(0, 0) - cplx(0.0, (alpha - n) * dphi_v)) <= 1e-14);
  }

  // Pure gauge has zero curvature.
  const KForm pure = gauge_transform(KForm::zero(1, 4, AlgebraTag::su2()), su2_gauge());
  for (int i = 0; i < 20; ++i) CHECK(curvature(pure, rng.vec(4), rng.vec(4), rng.vec(4)).norm() <= 1e-8);

  GaugeMap no_diff{[](const ChartPoint&) { return GroupElement::identity(AlgebraTag::su2()); }, {}};
  CHECK_THROWS_WITH_AS(gauge_transform(A, no_diff), "gauge map needs an analytic differential", ShapeError);
}

TEST_CASE("property: curvature is gauge covariant") {
  const KForm A = smooth_su2_potential(0.6);
  const GaugeMap g = su2_gauge();
  const KForm At = gauge_transform(A, g);
  oracle::Rng rng;
  for (int i = 0; i < 30; ++i) {
    const Vec p = rng.vec(4), u = rng.vec(4), v = rng.vec(4);
    const LieValue expected = adjoint(g.value(p).inverse(), curvature(A, p, u, v));
    CHECK((curvature(At, p, u, v) - expected).norm() <= 1e-8);
  }
}

TEST_CASE("su(2) split") {
  Mat2 d = Mat2::Zero();
  d(0, 0) = cplx(0, 0.7);
  d(1, 1) = cplx(0, -0.7);
  const LieValue D(AlgebraTag::su2(), d), Z = LieValue::zero(AlgebraTag::su2());
  const KForm a = KForm::constant(1, 4, {D, Z, Z, Z});
  const Su2Split s = su2_split(a);
  const Vec p{0.1, 0.2, 0.3, 0.4};
  CHECK(s.diag.coefficients(p)[0](0, 0) == cplx(0.0, 0.7));
  for (const auto& c : s.trans.coefficients(p)) CHECK(c.norm() == 0.0);

  // Cone connection diag(i alpha, -i alpha) dphi.
  const double alpha = 0.3;
  const KForm cone = su2_singular(alpha, RegularPart::Zero).potential.at(0.0625);
  const Su2Split cs = su2_split(cone);
  oracle::Rng rng;
  for (int i = 0; i < 10; ++i) {
    const Vec q = rng.vec(4);
    const auto [ax, ay] = oracle::wire_coeffs(q[0], q[1], 0.0625, alpha);
    const auto dc = cs.diag.coefficients(q);
    CHECK(std::abs(dc[0](0, 0) - cplx(0.0, ax)) <= 1e-14);
    CHECK(std::abs(dc[1](0, 0) - cplx(0.0, ay)) <= 1e-14);
    for (const auto& c : cs.trans.coefficients(q)) CHECK(c.norm() == 0.0);
  }

  const KForm r = smooth_su2_potential(0.9);
  const Su2Split rs = su2_split(r);
  const KForm back = su2_join(rs.diag, rs.trans);
  for (int i = 0; i < 20; ++i) {
    const Vec q = rng.vec(4);
    const auto c1 = r.coefficients(q), c2 = back.coefficients(q);
    for (std::size_t k = 0; k < c1.size(); ++k) CHECK((c1[k] - c2[k]).norm() <= 1e-14);
  }
  CHECK_THROWS_WITH_AS(su2_split(flat_wire(1.0).potential.at(0.1)), "su2_split needs an su(2)-valued form", ShapeError);
}

TEST_CASE("bracket split identities") {
  oracle::Rng rng;
  Mat2 d = Mat2::Zero();
  d(0, 0) = cplx(0, 1.0);
  d(1, 1) = cplx(0, -1.0);
  const LieValue D(AlgebraTag::su2(), d);
  const KForm a = KForm::constant(1, 3, {D, D * 0.5, D * -2.0});
  const KForm b = KForm::constant(1, 3, {D * 0.1, D * 1.5, D});
  const auto s0 = bracket_split_identities(a, b, {0, 0, 0}, rng.vec(3), rng.vec(3));
  CHECK(std::abs(s0.d_lhs) == 0.0);
  CHECK(std::abs(s0.d_rhs) == 0.0);

  const KForm r = smooth_su2_potential(0.25), q = smooth_su2_potential(-0.7);
  for (int i = 0; i < 50; ++i) {
    const Vec p = rng.vec(4), u = rng.vec(4), v = rng.vec(4);
    const auto s = bracket_split_identities(r, q, p, u, v);
    CHECK(std::abs(s.d_lhs - s.d_rhs) <= 1e-12);
    CHECK(std::abs(s.t_lhs - s.t_rhs) <= 1e-12);
    const auto same = bracket_split_identities(r, r, p, u, v);
    CHECK(std::abs(same.d_lhs - same.d_rhs) <= 1e-12);
    CHECK(std::abs(same.t_lhs - same.t_rhs) <= 1e-12);
    // Direct 2x2 computation of [a, a](u, v) = 2 [a(u), a(v)].
    const oracle::M2 au = evaluate(r, p, std::vector<Vec>{u}).matrix(), av = evaluate(r, p, std::vector<Vec>{v}).matrix();
    const oracle::M2 direct = 2.0 * oracle::commutator(au, av);
    CHECK(std::abs(same.d_lhs - direct(0, 0)) <= 1e-12);
    CHECK(std::abs(same.t_lhs - direct(0, 1)) <= 1e-12);
  }
}

TEST_CASE("reconstructed bundle forms") {
  oracle::Rng rng;
  const KForm A = smooth_su2_potential(0.15);
  const BundleForm w = reconstruct_bundle_form(A);
  const GroupElement e = GroupElement::identity(AlgebraTag::su2());
  for (int i = 0; i < 20; ++i) {
    const Vec x = rng.vec(4), v = rng.vec(4);
    const LieValue B = from_coordinates(AlgebraTag::su2(), rng.vec(3));
    CHECK((w(x, e, {v, B}) - (evaluate(A, x, std::vector<Vec>{v}) + B)).norm() <= 1e-15);
    const GroupElement g = exp(from_coordinates(AlgebraTag::su2(), rng.vec(3, -2, 2)));
    CHECK((w(x, g, {Vec(4, 0.0), B}) - B).norm() == 0.0);
  }
  const BundleForm wu = reconstruct_bundle_form(flat_wire(0.7).potential, 0.1);
  const Vec x{0.3, -0.2, 0.1, 0.0}, v{1.0, 0.5, 0.0, 2.0};
  const LieValue B = LieValue::u1(0.4);
  const LieValue ref = wu(x, GroupElement::identity(AlgebraTag::u1()), {v, B});
  for (const auto& g : group_lattice(AlgebraTag::u1())) CHECK((wu(x, g, {v, B}) - ref).norm() <= 1e-15);
}

TEST_CASE("axiom checks") {
  oracle::Rng rng;
  const auto samples = su2_samples(rng, 16);
  const auto lattice = group_lattice(AlgebraTag::su2());
  const EpsilonLadder ladder(0.25, 0.5, 10);
  const GaugePotential pot = su2_singular(0.3).potential;
  const auto exact = check_axioms(reconstruct_bundle_family(pot), ladder, samples, lattice);
  for (double r : exact.res_i) CHECK(r <= 1e-13);
  for (double r : exact.res_ii) CHECK(r <= 1e-13);

  auto perturbed = [&](std::function<double(double)> size) {
    return BundleFamily{[pot, size](double eps) {
                          BundleForm w = reconstruct_bundle_form(pot, eps);
                          const double c = size(eps);
                          auto base = w.eval;
                          w.eval = [base, c](const ChartPoint& x, const GroupElement& g, const BundleTangent& t) {
                            return base(x, g, t) + LieValue::su2(c * t.base[0], 0.0, c * t.base[1] * x[2]);
                          };
                          return w;
                        },
                        "perturbed"};
  };
  const auto quad = check_axioms(perturbed([](double e) { return e * e; }), ladder, samples, lattice);
  for (double r : quad.res_i) CHECK(r <= 1e-13);
  const auto cert = negligible_from_sups(quad.eps, quad.res_ii, 2);
  CHECK(cert.verdict);
  CHECK(cert.negligible_up_to >= 2);

  const auto flat = check_axioms(perturbed([](double) { return 0.1; }), ladder, samples, lattice);
  CHECK_FALSE(negligible_from_sups(flat.eps, flat.res_ii, 1).verdict);
  CHECK(flat.res_ii.back() > 1e-3);
}

TEST_CASE("canonicalization") {
  oracle::Rng rng;
  const auto samples = su2_samples(rng, 12);
  const auto lattice = group_lattice(AlgebraTag::su2());
  const GaugePotential pot = su2_singular(0.3, RegularPart::Gaussian).potential;
  const BundleForm w = reconstruct_bundle_form(pot, 0.1);
  const BundleForm c = canonicalize(w);
  CHECK(bundle_distance(w, c, samples) <= 1e-12);

  // A fiber block that is invertible but not the identity.
  const Mat2 k = exp(LieValue::su2(0.3, -0.2, 0.5)).matrix();
  BundleForm skew = w;
  skew.eval = [w, k](const ChartPoint& x, const GroupElement& g, const BundleTangent& t) {
    const LieValue base = w(x, g, t);
    const LieValue twisted = LieValue::projected(AlgebraTag::su2(), 1.3 * k * t.fiber.matrix() * k.adjoint());
    const LieValue extra = LieValue::su2(0.2 * t.base[0], x[1] * t.base[2], 0.0);
    return base - t.fiber + twisted + extra;
  };
  CHECK(vertical_residual(skew, samples) > 0.1);
  const BundleForm fixed = canonicalize(skew);
  CHECK(vertical_residual(fixed, samples) <= 1e-12);
  CHECK(equivariance_residual(fixed, samples, lattice) <= 1e-12);

  const BundleForm twice = canonicalize(fixed);
  CHECK(bundle_distance(fixed, twice, samples) <= 1e-12);

  BundleForm degenerate = w;
  degenerate.eval = [w](const ChartPoint& x, const GroupElement& g, const BundleTangent& t) {
    return w(x, g, t) - LieValue::su2(0.0, 0.0, t.fiber.coordinates()[2]);
  };
  const std::vector<ChartPoint> at{{0.1, 0.1, 0.1, 0.1}};
  CHECK_THROWS_WITH_AS(canonicalize(degenerate, at), "ε too large: vertical block degenerate", NumericalError);
}

TEST_CASE("canonicalization removes a negligible perturbation at its order") {
  oracle::Rng rng;
  const auto samples = su2_samples(rng, 12);
  const GaugePotential pot = su2_singular(0.3).potential;
  const BundleFamily fam{[pot](double eps) {
                           BundleForm w = reconstruct_bundle_form(pot, eps);
                           auto base = w.eval;
                           const double c = eps * eps * eps;
                           w.eval = [base, c](const ChartPoint& x, const GroupElement& g, const BundleTangent& t) {
                             return base(x, g, t) + LieValue::su2(c * (t.base[0] + t.fiber.coordinates()[1]), 0.0,
                                                                   c * x[3] * t.base[1]);
                           };
                           return w;
                         },
                         "eps^3 perturbation"};
  const EpsilonLadder ladder(0.25, 0.5, 10);
  std::vector<double> dist;
  for (double eps : ladder.values()) {
    const BundleForm w = fam(eps);
    dist.push_back(bundle_distance(w, canonicalize(w), samples));
  }
  const auto cert = negligible_from_sups(ladder.values(), dist, 3);
  CHECK(cert.slope >= 2.5);
  CHECK(cert.negligible_up_to >= 3);

  const std::vector<ChartPoint> base{{0.1, 0.2, 0.3, 0.4}};
  const auto eps0 = canonicalization_threshold(fam, ladder, base);
  REQUIRE(eps0.has_value());
  CHECK(*eps0 == 0.25);
}

TEST_CASE("property: reconstructed curvature is horizontal") {
  oracle::Rng rng;
  for (const auto& name : scenario_names()) {
    const Scenario s = make_scenario(name, 0.3);
    const BundleForm w = reconstruct_bundle_form(s.potential, 0.125);
    const AlgebraTag tag = s.potential.tag;
    const int m = s.potential.dim;
    for (int i = 0; i < 10; ++i) {
      const Vec x = rng.vec(m, -0.8, 0.8);
      const GroupElement g = exp(from_coordinates(tag, rng.vec(tag.real_dim(), -2, 2)));
      const BundleTangent vert{Vec(static_cast<std::size_t>(m), 0.0), from_coordinates(tag, rng.vec(tag.real_dim()))};
      const BundleTangent any{rng.vec(m), from_coordinates(tag, rng.vec(tag.real_dim()))};
      CHECK(bundle_curvature(w, x, g, vert, any).norm() <= 1e-10);
      // On horizontal lifts it reproduces ad(g^-1) F.
      const Vec u = rng.vec(m), v = rng.vec(m);
      const LieValue Au = evaluate(s.potential.at(0.125), x, std::vector<Vec>{u});
      const LieValue Av = evaluate(s.potential.at(0.125), x, std::vector<Vec>{v});
      const BundleTangent hu{u, adjoint(g.inverse(), Au) * -1.0}, hv{v, adjoint(g.inverse(), Av) * -1.0};
      const LieValue expected = adjoint(g.inverse(), curvature(s.potential, 0.125, x, u, v));
      CHECK((bundle_curvature(w, x, g, hu, hv) - expected).norm() <= 1e-6 * std::max(1.0, expected.norm()));
    }
  }
}
