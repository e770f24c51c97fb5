#include "gencon/characteristic.hpp"

#include "gencon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gencon {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kTwoPiI{0.0, 2.0 * kPi};
}  // namespace

cplx invariant_poly(int k, std::span<const LieValue> args) {
  if (k < 1 || k > 2) throw ShapeError("invariant polynomial degree must be 1 or 2");
  if (static_cast<int>(args.size()) != k) throw ShapeError("invariant polynomial needs exactly k arguments");
  const int n = args[0].n();
  for (const auto& a : args)
    if (a.n() != n) throw ShapeError("invariant polynomial arguments differ in size");
  if (k > n) throw ShapeError("invariant polynomial degree exceeds matrix size");
  if (k == 1) return -args[0].trace() / kTwoPiI;
  const cplx ta = args[0].trace(), tb = args[1].trace();
  const cplx tab = (args[0].matrix() * args[1].matrix()).trace();
  return -(ta * tb - tab) / (8.0 * kPi * kPi);
}

cplx invariant_poly(int k, const LieValue& a) {
  std::vector<LieValue> args(static_cast<std::size_t>(k), a);
  return invariant_poly(k, args);
}

namespace {

struct QuadTerm {
  int sign;
  int left, right;  // positions in multi_indices(m, 2)
};

// (2,2)-shuffles of each increasing 4-index, as pairs of 2-index positions.
std::vector<std::vector<QuadTerm>> quad_terms(int m) {
  const auto& quads = multi_indices(m, 4);
  const auto& shuffles = multi_indices(4, 2);
  std::vector<std::vector<QuadTerm>> out;
  for (const auto& I : quads) {
    std::vector<QuadTerm> terms;
    for (const auto& s : shuffles) {
      std::vector<int> rest;
      for (int t = 0; t < 4; ++t)
        if (t != s[0] && t != s[1]) rest.push_back(t);
      const int inversions = s[0] + (s[1] - 1);
      const std::vector<int> l{I[s[0]], I[s[1]]}, r{I[rest[0]], I[rest[1]]};
      terms.push_back({inversions % 2 == 0 ? 1 : -1, multi_index_position(m, l), multi_index_position(m, r)});
    }
    out.push_back(std::move(terms));
  }
  return out;
}

cplx f2(const LieValue& a, const LieValue& b) {
  const LieValue args[2] = {a, b};
  return invariant_poly(2, args);
}

}  // namespace

ChernForm chern_form(const KForm& A, int k) {
  if (k < 1 || k > 2) throw ShapeError("Chern form degree must be 1 or 2");
  if (A.tag().n < k) throw ShapeError("invariant polynomial degree exceeds matrix size");
  const KForm F = curvature_form(A);
  const int m = A.dim();
  const bool analytic = F.has_analytic_derivative();

  if (k == 1) {
    auto map = [](const KForm::Coefficients& cs) {
      KForm::Coefficients out;
      out.reserve(cs.size());
      for (const auto& c : cs) out.push_back(LieValue::scalar(invariant_poly(1, c)));
      return out;
    };
    KForm::DCoeffFn d;
    if (analytic)
      d = [F, map](const ChartPoint& p) {
        auto ds = F.derivatives(p);
        std::vector<KForm::Coefficients> out;
        for (const auto& x : ds) out.push_back(map(x));
        return out;
      };
    return {1, KForm(2, m, AlgebraTag::scalar(), [F, map](const ChartPoint& p) { return map(F.coefficients(p)); }, d)};
  }

  if (m < 4) throw ShapeError("c_2 needs a chart of dimension >= 4");
  const auto terms = quad_terms(m);
  auto coeff = [F, terms](const ChartPoint& p) {
    auto c = F.coefficients(p);
    KForm::Coefficients out;
    out.reserve(terms.size());
    for (const auto& ts : terms) {
      cplx s{};
      for (const auto& t : ts) s += static_cast<double>(t.sign) * f2(c[t.left], c[t.right]);
      out.push_back(LieValue::scalar(s));
    }
    return out;
  };
  KForm::DCoeffFn d;
  if (analytic)
    d = [F, terms](const ChartPoint& p) {
      auto c = F.coefficients(p);
      auto ds = F.derivatives(p);
      std::vector<KForm::Coefficients> out;
      out.reserve(ds.size());
      for (const auto& dc : ds) {
        KForm::Coefficients row;
        row.reserve(terms.size());
        for (const auto& ts : terms) {
          cplx s{};
          for (const auto& t : ts)
            s += static_cast<double>(t.sign) * (f2(dc[t.left], c[t.right]) + f2(c[t.left], dc[t.right]));
          row.push_back(LieValue::scalar(s));
        }
        out.push_back(std::move(row));
      }
      return out;
    };
  return {2, KForm(4, m, AlgebraTag::scalar(), coeff, d)};
}

ChernForm chern_form(const GaugePotential& A, double eps, int k) { return chern_form(A.at(eps), k); }

namespace {

// Fixed polynomial (d-1)-form with analytic derivatives, used to test for boundaries.
KForm probe_form(int degree, int m) {
  const int n = static_cast<int>(multi_indices(m, degree).size());
  auto w = [](int I, int j) { return 0.3 + 0.1 * ((I * 7 + j * 3) % 5); };
  auto v = [](int I, int j) { return 0.7 - 0.2 * ((I * 5 + j * 2) % 4); };
  auto coeff = [=](const ChartPoint& x) {
    KForm::Coefficients out;
    for (int I = 0; I < n; ++I) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += w(I, j) * x[j] * x[(j + 1) % m] + v(I, j) * x[j];
      out.push_back(LieValue::scalar(s));
    }
    return out;
  };
  auto dcoeff = [=](const ChartPoint& x) {
    std::vector<KForm::Coefficients> out(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d)
      for (int I = 0; I < n; ++I) {
        double s = v(I, d);
        for (int j = 0; j < m; ++j) {
          if (j == d) s += w(I, j) * x[(j + 1) % m];
          if ((j + 1) % m == d) s += w(I, j) * x[j];
        }
        out[d].push_back(LieValue::scalar(s));
      }
    return out;
  };
  return KForm(degree, m, AlgebraTag::scalar(), coeff, dcoeff);
}

}  // namespace

double boundary_defect(std::span<const SurfacePatch> patches) {
  if (patches.empty()) throw ShapeError("no patches");
  const int dim = patches.front().dim, m = patches.front().chart_dim;
  KForm beta = probe_form(dim - 1, m);
  KForm dbeta = exterior_derivative(beta);
  QuadratureOptions opts;
  opts.tol = 1e-10;
  return std::abs(integrate_form(dbeta, patches, opts).value);
}

QuadratureResult chern_integral(const KForm& A, std::span<const SurfacePatch> patches, double tol) {
  if (patches.empty()) throw ShapeError("no patches");
  const int dim = patches.front().dim;
  if (dim % 2 != 0) throw ShapeError("Chern numbers need an even-dimensional patch");
  ChernForm cf = chern_form(A, dim / 2);
  QuadratureOptions opts;
  opts.tol = tol;
  return integrate_form(cf.form, patches, opts);
}

ChernNumberResult chern_number(const GaugePotential& A, std::span<const SurfacePatch> patches,
                               const EpsilonLadder& ladder, const ChernOptions& opts) {
  if (patches.empty()) throw ShapeError("no patches");
  if (opts.require_closed) {
    double scale = 1.0;
    for (const auto& p : patches)
      for (const Vec& q : {p.lower, p.upper})
        for (double x : p.map(q)) scale = std::max(scale, std::abs(x));
    if (boundary_defect(patches) > 1e-6 * std::pow(scale, patches.front().dim))
      throw ShapeError("chern_number needs a closed patch (boundary detected)");
  }
  ChernNumberResult out;
  out.net.ladder = ladder;
  for (double e : ladder.values()) {
    const double tol = opts.tol ? *opts.tol : default_tolerance(e);
    auto r = chern_integral(A.at(e), patches, tol);
    out.net.values.push_back(r.value);
    out.net.noise.push_back(r.err_est);
  }
  out.ext = extrapolate(out.net);
  return out;
}

double closedness_residual(const ChernForm& cf, std::span<const ChartPoint> samples, bool finite_differences) {
  const KForm f = finite_differences ? cf.form.without_derivative() : cf.form;
  const int m = f.dim(), deg = f.degree() + 1;
  if (deg > m) return 0.0;
  double worst = 0.0;
  for (const auto& p : samples)
    for (const auto& J : multi_indices(m, deg)) {
      std::vector<Vec> vs;
      for (int j : J) {
        Vec e(static_cast<std::size_t>(m), 0.0);
        e[j] = 1.0;
        vs.push_back(std::move(e));
      }
      worst = std::max(worst, exterior_derivative(f, p, vs).norm());
    }
  return worst;
}

}  // namespace gencon
