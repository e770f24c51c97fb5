#include "doctest.h"
#include "oracles.hpp"

#include "gencon/connection.hpp"
#include "gencon/errors.hpp"
#include "gencon/holonomy.hpp"
#include "gencon/scenarios.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace gencon;

namespace {

double dist(const GroupElement& a, const GroupElement& b) { return operator_distance(a.matrix(), b.matrix(), a.n()); }

/// Smooth su(2) potential with exact derivatives.
KForm smooth_su2_potential(double s) {
  return KForm::from_field(1, 4, AlgebraTag::su2(), basis(AlgebraTag::su2()),
                           SmoothField::from(4, 12, [s](auto x, auto out) {
                             for (int k = 0; k < 12; ++k) {
                               const double a = 0.4 + 0.13 * k + s;
                               out[k] = sin(a * x[k % 4] - 0.5 * x[(k + 1) % 4]) + 0.3 * x[(k + 2) % 4];
                             }
                           }));
}

GaugeMap su2_gauge() {
  auto t1 = [](const ChartPoint& p) { return 0.8 * p[0] + std::sin(p[1]) * p[2]; };
  auto t2 = [](const ChartPoint& p) { return 0.5 * p[3] * p[0] + 0.3 * p[1]; };
  GaugeMap g;
  g.value = [=](const ChartPoint& p) { return exp(LieValue::su2(0, 0, t1(p))) * exp(LieValue::su2(t2(p), 0, 0)); };
  g.differential = [=](const ChartPoint& p) {
    const Vec d1{0.8, std::cos(p[1]) * p[2], std::sin(p[1]), 0.0};
    const Vec d2{0.5 * p[3], 0.3, 0.0, 0.5 * p[0]};
    const Mat2 a = exp(LieValue::su2(0, 0, t1(p))).matrix(), b = exp(LieValue::su2(t2(p), 0, 0)).matrix();
    const Mat2 e3 = LieValue::su2(0, 0, 1).matrix(), e1 = LieValue::su2(1, 0, 0).matrix();
    std::vector<Mat2> out;
    for (std::size_t i = 0; i < 4; ++i) out.push_back(d1[i] * e3 * a * b + d2[i] * a * e1 * b);
    return out;
  };
  return g;
}

const GroupElement kId2 = GroupElement::identity(AlgebraTag::su2());

}  // namespace

TEST_CASE("curve helpers") {
  const ParamCurve c = ParamCurve::circle(4, {0.5, 0, 0, 0}, 0.5);
  CHECK(c.closed());
  const ParamCurve r = c.reversed();
  const ParamCurve cc = c.then(ParamCurve::circle(4, {0, 0, 0, 0}, 1.0));
  const ParamCurve rp = c.reparameterized([](double s) { return s + 0.3 * std::sin(s); },
                                          [](double s) { return 1.0 + 0.3 * std::cos(s); }, 0.0, 2 * oracle::pi);
  for (double t : {0.3, 1.7, 4.0, 6.0}) {
    CHECK(velocity_defect(c, t) <= 1e-6);
    CHECK(velocity_defect(r, t) <= 1e-6);
    CHECK(velocity_defect(rp, t) <= 1e-6);
    CHECK(velocity_defect(cc, t + 2.0) <= 1e-6);
  }
  CHECK(cc.b == doctest::Approx(4 * oracle::pi));
  CHECK(cc.closed());
  ParamCurve open = c;
  open.b = 3.0;
  CHECK_FALSE(open.closed());
}

TEST_CASE("transport examples") {
  const GroupElement g0 = exp(LieValue::su2(0.3, -0.4, 1.1));
  CHECK(dist(transport(KForm::zero(1, 4, AlgebraTag::su2()), ParamCurve::circle(4, {0, 0, 0, 0}, 1.0), g0).g_end, g0) == 0.0);

  // Regular gauge i alpha dphi away from the axis.
  const KForm dphi = flat_wire(0.25).potential.at(0.0);
  TransportOptions opts;
  opts.step = 2 * oracle::pi / 4096;
  const auto u1 = transport(dphi, ParamCurve::circle(4, {0, 0, 0, 0}, 1.0), GroupElement::identity(AlgebraTag::u1()), opts);
  CHECK(std::abs(u1.g_end(0, 0) - cplx(0.0, -1.0)) <= 1e-8);
  CHECK(u1.steps == 4096);
  CHECK(u1.max_defect <= 1e-10);

  const double alpha = 0.3;
  const KForm cone = su2_singular(alpha, RegularPart::Zero).potential.at(0.0);
  const auto su = transport(cone, ParamCurve::circle(4, {0.1, -0.2, 0.3, 0.0}, 1.3), kId2, opts);
  Mat2 expected = Mat2::Zero();
  expected(0, 0) = std::exp(cplx(0.0, -2 * oracle::pi * alpha));
  expected(1, 1) = std::exp(cplx(0.0, 2 * oracle::pi * alpha));
  CHECK(operator_distance(su.g_end.matrix(), expected, 2) <= 1e-8);
  CHECK(su.max_defect <= 1e-10);
}

TEST_CASE("holonomy examples and errors") {
  // Contractible loop far from the axis where F_eps is negligible.
  const KForm A = flat_wire(1.0).potential.at(std::ldexp(1.0, -14));
  const GroupElement h = holonomy(A, ParamCurve::circle(4, {3.0, 0, 0, 0}, 0.5));
  CHECK(dist(h, GroupElement::identity(AlgebraTag::u1())) <= 1e-9);

  ParamCurve open = ParamCurve::circle(4, {0, 0, 0, 0}, 1.0);
  open.b = 2.0;
  CHECK_THROWS_WITH_AS(holonomy(A, open), "holonomy needs a closed loop", ShapeError);

  TransportOptions fenced;
  fenced.in_chart = [](const ChartPoint& p) { return p[1] < 0.5; };
  CHECK_THROWS_WITH_AS(transport(A, ParamCurve::circle(4, {0, 0, 0, 0}, 1.0), GroupElement::identity(AlgebraTag::u1()), fenced),
                       doctest::Contains("curve exits chart at t="), NumericalError);

}

TEST_CASE("property: holonomy group laws") {
  const KForm A = smooth_su2_potential(0.2);
  const ParamCurve g1 = ParamCurve::circle(4, {0.5, 0, 0, 0}, 0.5);
  // Both loops are based at (1, 0, 0, 0); the second lies in the (x, w) plane.
  const ParamCurve loop2 = ParamCurve::circle(4, {0.5, 0, 0, 0}, 0.5, 0, 3);
  REQUIRE(std::abs(loop2.map(loop2.a)[0] - 1.0) < 1e-15);
  const GroupElement h1 = holonomy(A, g1), h2 = holonomy(A, loop2);
  CHECK(dist(holonomy(A, g1.reversed()), h1.inverse()) <= 1e-9);
  CHECK(dist(holonomy(A, g1.then(loop2)), h2 * h1) <= 1e-9);
  CHECK(dist(h2 * h1, h1 * h2) > 1e-3);

  const ParamCurve rp = g1.reparameterized([](double s) { return s + 0.3 * std::sin(s); },
                                           [](double s) { return 1.0 + 0.3 * std::cos(s); }, 0.0, 2 * oracle::pi);
  CHECK(dist(holonomy(A, rp), h1) <= 1e-8);
  const ParamCurve slow = g1.reparameterized([](double s) { return 2 * oracle::pi * s * s; },
                                             [](double s) { return 4 * oracle::pi * s; }, 0.0, 1.0);
  CHECK(dist(holonomy(A, slow), h1) <= 1e-8);
}

TEST_CASE("property: holonomy is conjugation covariant") {
  const KForm A = smooth_su2_potential(-0.4);
  const GaugeMap g = su2_gauge();
  const KForm At = gauge_transform(A, g);
  const ParamCurve loop = ParamCurve::circle(4, {0.2, 0.1, -0.3, 0.4}, 0.7, 1, 3);
  const ChartPoint base = loop.map(loop.a);
  const GroupElement gb = g.value(base);
  CHECK(dist(holonomy(At, loop), gb.inverse() * holonomy(A, loop) * gb) <= 1e-8);
}

TEST_CASE("property: RK4 convergence and group constraints") {
  for (double eps : {0.5, 0.25}) {
    const KForm A = flat_wire(1.0).potential.at(eps);
    const ParamCurve loop = ParamCurve::circle(4, {0, 0, 0, 0}, 1.0);
    const cplx exact = oracle::wire_holonomy(1.0, eps, 1.0);
    TransportOptions coarse, fine;
    coarse.step = 2 * oracle::pi / 32;
    fine.step = 2 * oracle::pi / 64;
    const double e1 = std::abs(holonomy(A, loop, coarse)(0, 0) - exact);
    const double e2 = std::abs(holonomy(A, loop, fine)(0, 0) - exact);
    CHECK(e1 / e2 >= 12.0);
  }
  const Scenario s = su2_singular(0.3, RegularPart::Gaussian);
  const ParamCurve loop = ParamCurve::circle(4, {0.1, 0, 0.2, 0}, 0.8);
  const KForm A = s.potential.at(0.125);
  TransportOptions ref_opts, c, f;
  ref_opts.step = 2 * oracle::pi / 8192;
  c.step = 2 * oracle::pi / 48;
  f.step = 2 * oracle::pi / 96;
  const auto ref = transport(A, loop, kId2, ref_opts);
  const auto tc = transport(A, loop, kId2, c), tf = transport(A, loop, kId2, f);
  CHECK(dist(tc.g_end, ref.g_end) / dist(tf.g_end, ref.g_end) >= 12.0);
  CHECK(ref.max_defect <= 1e-10);
  CHECK(tc.max_defect <= 1e-10);
}

TEST_CASE("holonomy net over the ladder") {
  const GaugePotential A = flat_wire(0.25).potential;
  const auto net = holonomy_net(A, ParamCurve::circle(4, {0, 0, 0, 0}, 1.0), EpsilonLadder());
  for (std::size_t k = 0; k < net.eps.size(); ++k)
    CHECK(std::abs(net.values[k](0, 0) - oracle::wire_holonomy(1.0, net.eps[k], 0.25)) <= 1e-10);
  CHECK(std::abs(net.limit(0, 0) - cplx(0.0, -1.0)) <= 1e-8);
  CHECK(net.err_est <= 1e-8);
}

TEST_CASE("trace output") {
  TransportOptions opts;
  opts.keep_trace = true;
  opts.step = 2 * oracle::pi / 16;
  const auto res = transport(flat_wire(0.5).potential, 0.1, ParamCurve::circle(4, {0, 0, 0, 0}, 1.0),
                             GroupElement::identity(AlgebraTag::u1()), opts);
  CHECK(res.trace.size() == 17);
  const auto path = (std::filesystem::temp_directory_path() / "gencon_trace_test.csv").string();
  write_trace_csv(path, res.trace);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,g00_re,g00_im");
  std::filesystem::remove(path);
}

TEST_CASE("parallel transport of vectors") {
  const GroupElement g = exp(LieValue::su2(0.2, 0.5, -0.1));
  const std::vector<cplx> xi{cplx(1, 2), cplx(-0.5, 0.25)};
  CHECK(parallel_transport_vector(Representation::Defining, g, g, xi) == xi);
  const auto phase = parallel_transport_vector(Representation::Defining, exp(LieValue::u1(0.3)), exp(LieValue::u1(1.0)),
                                               std::vector<cplx>{cplx(2, 0)});
  CHECK(std::abs(phase[0] - 2.0 * std::exp(cplx(0, 0.7))) <= 1e-15);
  oracle::Rng rng;
  for (int i = 0; i < 20; ++i) {
    const GroupElement a = exp(from_coordinates(AlgebraTag::su2(), rng.vec(3, -3, 3)));
    const GroupElement b = exp(from_coordinates(AlgebraTag::su2(), rng.vec(3, -3, 3)));
    const auto out = parallel_transport_vector(Representation::Defining, a, b, xi);
    const double n0 = std::norm(xi[0]) + std::norm(xi[1]), n1 = std::norm(out[0]) + std::norm(out[1]);
    CHECK(std::abs(n1 - n0) <= 1e-12);
  }
  CHECK(parallel_transport_vector(Representation::Trivial, kId2, g, std::vector<cplx>{cplx(3, 1)}) ==
        std::vector<cplx>{cplx(3, 1)});
  CHECK_THROWS_AS(parallel_transport_vector(Representation::Defining, g, g, std::vector<cplx>{1.0}), ShapeError);
}

TEST_CASE("connection coefficients") {
  const auto zero = connection_coefficients(KForm::zero(1, 4, AlgebraTag::su2()), {0.1, 0.2, 0.3, 0.4});
  for (const auto& gi : zero)
    for (const auto& row : gi)
      for (cplx z : row) CHECK(z == cplx(0.0));

  const auto w = connection_coefficients(flat_wire(1.0).potential, 1.0, {1, 0, 0, 0});
  const auto [ax, ay] = oracle::wire_coeffs(1, 0, 1.0, 1.0);
  CHECK(std::abs(w[1][0][0] - cplx(0.0, ay)) <= 1e-15);
  CHECK(std::abs(w[1][0][0] - cplx(0.0, 0.5)) <= 1e-15);
  CHECK(w[0][0][0] == cplx(0.0, ax));

  // Constant gauge: Gamma_i -> g^-1 Gamma_i g.
  const KForm A = smooth_su2_potential(0.1);
  const GroupElement g = exp(LieValue::su2(0.7, -0.3, 1.2));
  const GaugeMap cg{[g](const ChartPoint&) { return g; }, [](const ChartPoint&) { return std::vector<Mat2>(4, Mat2::Zero()); }};
  const ChartPoint p{0.3, -0.1, 0.2, 0.5};
  const auto G = connection_coefficients(A, p), Gt = connection_coefficients(gauge_transform(A, cg), p);
  for (int i = 0; i < 4; ++i) {
    oracle::M2 m, mt;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(b, a) = G[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) mt(b, a) = Gt[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    const oracle::M2 gm = g.matrix();
    CHECK((mt - gm.inverse() * m * gm).norm() <= 1e-14);
  }
}

TEST_CASE("covariant derivative") {
  const Section constant{[](const ChartPoint&) { return std::vector<cplx>{cplx(1, 1), cplx(0, -2)}; },
                         [](const ChartPoint&) { return std::vector<std::vector<cplx>>(4, std::vector<cplx>(2, 0.0)); }};
  auto X = [](const ChartPoint& p) { return Vec{1.0, p[0], -0.5, p[2] * p[3]}; };
  auto Y = [](const ChartPoint& p) { return Vec{std::sin(p[1]), 0.0, 2.0, -1.0}; };
  for (cplx z : covariant_derivative(KForm::zero(1, 4, AlgebraTag::su2()), constant, X, {0.1, 0.2, 0.3, 0.4}))
    CHECK(z == cplx(0.0));

  const KForm A = smooth_su2_potential(0.5);
  const Section V{[](const ChartPoint& p) { return std::vector<cplx>{cplx(p[0] * p[1], 1.0), cplx(std::cos(p[2]), p[3])}; },
                  [](const ChartPoint& p) {
                    return std::vector<std::vector<cplx>>{{cplx(p[1], 0), 0.0},
                                                          {cplx(p[0], 0), 0.0},
                                                          {0.0, cplx(-std::sin(p[2]), 0)},
                                                          {0.0, cplx(0, 1)}};
                  }};
  auto lambda = [](const ChartPoint& p) { return std::exp(p[0]) + p[1] * p[3]; };
  auto dlambda = [](const ChartPoint& p) { return Vec{std::exp(p[0]), p[3], 0.0, p[1]}; };
  const Section LV{[=](const ChartPoint& p) {
                     auto v = V.value(p);
                     for (auto& z : v) z *= lambda(p);
                     return v;
                   },
                   [=](const ChartPoint& p) {
                     auto d = V.partials(p);
                     const auto v = V.value(p);
                     const auto dl = dlambda(p);
                     for (std::size_t i = 0; i < 4; ++i)
                       for (std::size_t b = 0; b < 2; ++b) d[i][b] = lambda(p) * d[i][b] + dl[i] * v[b];
                     return d;
                   }};
  oracle::Rng rng;
  for (int i = 0; i < 20; ++i) {
    const ChartPoint p = rng.vec(4);
    const auto lhs = covariant_derivative(A, LV, X, p);
    const auto nv = covariant_derivative(A, V, X, p);
    const auto v = V.value(p);
    const Vec x = X(p), dl = dlambda(p);
    double xl = 0.0;
    for (std::size_t k = 0; k < 4; ++k) xl += x[k] * dl[k];
    for (std::size_t b = 0; b < 2; ++b) CHECK(std::abs(lhs[b] - (lambda(p) * nv[b] + xl * v[b])) <= 1e-8);

    auto XY = [&](const ChartPoint& q) {
      Vec a = X(q), c = Y(q);
      for (std::size_t k = 0; k < 4; ++k) a[k] += c[k];
      return a;
    };
    const auto sum = covariant_derivative(A, V, XY, p);
    const auto nx = covariant_derivative(A, V, X, p), ny = covariant_derivative(A, V, Y, p);
    for (std::size_t b = 0; b < 2; ++b) CHECK(std::abs(sum[b] - (nx[b] + ny[b])) <= 1e-14);
  }
}
