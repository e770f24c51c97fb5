#include "gencon/connection.hpp"

#include "gencon/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace gencon {

KForm GaugePotential::at(double eps) const {
  if (!family.make) throw ShapeError("gauge potential has no family");
  KForm a = family(eps);
  if (a.degree() != 1) throw ShapeError("gauge potential must be a 1-form");
  if (a.dim() != dim) throw ShapeError("gauge potential has wrong chart dimension");
  if (!(a.tag() == tag)) throw ShapeError("algebra mismatch");
  return a;
}

std::optional<std::vector<double>> coordinates_in(std::span<const LieValue> basis, const LieValue& v) {
  const int nb = static_cast<int>(basis.size());
  Eigen::MatrixXd R(8, nb);
  Eigen::VectorXd y(8);
  auto flat = [](const Mat2& m, Eigen::Ref<Eigen::VectorXd> out) {
    for (int k = 0; k < 4; ++k) {
      out(2 * k) = m(k / 2, k % 2).real();
      out(2 * k + 1) = m(k / 2, k % 2).imag();
    }
  };
  for (int b = 0; b < nb; ++b) flat(basis[b].matrix(), R.col(b));
  flat(v.matrix(), y);
  Eigen::VectorXd c = R.colPivHouseholderQr().solve(y);
  if ((R * c - y).norm() > 1e-12 * std::max(1.0, y.norm())) return std::nullopt;
  return std::vector<double>(c.data(), c.data() + nb);
}

// ---------------------------------------------------------------- curvature

LieValue curvature(const KForm& A, const ChartPoint& p, const Vec& u, const Vec& v) {
  if (A.degree() != 1) throw ShapeError("curvature needs a 1-form");
  const std::vector<Vec> uv{u, v};
  LieValue dA = exterior_derivative(A, p, uv);
  auto c = A.coefficients(p);
  auto eval1 = [&](const Vec& w) {
    if (static_cast<int>(w.size()) != A.dim()) throw ShapeError("vector length does not match chart dimension");
    Mat2 m = Mat2::Zero();
    for (int i = 0; i < A.dim(); ++i) m += w[i] * c[i].matrix();
    return LieValue::projected(A.tag(), m);
  };
  return dA + bracket(eval1(u), eval1(v));
}

LieValue curvature(const GaugePotential& A, double eps, const ChartPoint& p, const Vec& u, const Vec& v) {
  return curvature(A.at(eps), p, u, v);
}

namespace {

struct StructTerm {
  int b, c, d;
  double coef;
};

std::optional<std::vector<StructTerm>> structure_terms(std::span<const LieValue> basis) {
  std::vector<StructTerm> terms;
  const int nb = static_cast<int>(basis.size());
  for (int b = 0; b < nb; ++b)
    for (int c = 0; c < nb; ++c) {
      LieValue br = bracket(basis[b], basis[c]);
      if (br.norm() == 0.0) continue;
      auto co = coordinates_in(basis, br);
      if (!co) return std::nullopt;
      for (int d = 0; d < nb; ++d)
        if ((*co)[d] != 0.0) terms.push_back({b, c, d, (*co)[d]});
    }
  return terms;
}

}  // namespace

KForm curvature_form(const KForm& A) {
  if (A.degree() != 1) throw ShapeError("curvature needs a 1-form");
  const int m = A.dim();
  if (m < 2) throw ShapeError("curvature needs a chart of dimension >= 2");
  const auto& pairs = multi_indices(m, 2);
  const AlgebraTag tag = A.tag();

  if (const FormExpansion* e = A.expansion(); e != nullptr && e->field.depth() >= 2) {
    if (auto terms = structure_terms(e->basis)) {
      const SmoothField inner = e->field;
      const int nb = static_cast<int>(e->basis.size());
      const auto st = *terms;
      auto fn = [inner, nb, m, pairs, st](auto x, auto out) {
        using U = std::remove_const_t<typename decltype(x)::value_type>;
        if constexpr (dual_depth<U>::value >= 3) {
          throw ShapeError("smooth field: derivative level not available");
        } else {
          const std::size_t len = static_cast<std::size_t>(m * nb);
          std::vector<U> val(len);
          std::vector<std::vector<U>> der(static_cast<std::size_t>(m), std::vector<U>(len));
          for (int j = 0; j < m; ++j)
            field_partial<U>(inner, x, j, j == 0 ? std::span<U>(val) : std::span<U>(), der[j]);
          for (std::size_t q = 0; q < pairs.size(); ++q) {
            const int i = pairs[q][0], j = pairs[q][1];
            for (int d = 0; d < nb; ++d) out[q * nb + d] = der[i][j * nb + d] - der[j][i * nb + d];
            for (const auto& t : st) out[q * nb + t.d] += t.coef * (val[i * nb + t.b] * val[j * nb + t.c]);
          }
        }
      };
      SmoothField F = SmoothField::from(m, static_cast<int>(pairs.size()) * nb, fn, inner.depth() - 1);
      return KForm::from_field(2, m, tag, e->basis, std::move(F));
    }
  }

  return KForm(2, m, tag, [A, pairs, tag](const ChartPoint& p) {
    auto c = A.coefficients(p);
    auto d = A.derivatives(p);
    KForm::Coefficients out;
    out.reserve(pairs.size());
    for (const auto& ij : pairs) {
      const int i = ij[0], j = ij[1];
      Mat2 f = d[i][j].matrix() - d[j][i].matrix() + c[i].matrix() * c[j].matrix() - c[j].matrix() * c[i].matrix();
      out.push_back(LieValue::projected(tag, f));
    }
    return out;
  });
}

LieValue bianchi_residual(const KForm& A, const ChartPoint& p, const Vec& u, const Vec& v, const Vec& w) {
  KForm F = curvature_form(A);
  const std::vector<Vec> uvw{u, v, w};
  return exterior_derivative(F, p, uvw) + wedge_pair(A, F, Pairing::Bracket, p, uvw);
}

// ------------------------------------------------------------------- gauge

KForm gauge_transform(const KForm& A, const GaugeMap& g) {
  if (A.degree() != 1) throw ShapeError("gauge transformation acts on 1-forms");
  if (!g.value) throw ShapeError("gauge map has no value callback");
  if (!g.differential) throw ShapeError("gauge map needs an analytic differential");
  const AlgebraTag tag = A.tag();
  const int m = A.dim();
  return KForm(1, m, tag, [A, g, tag, m](const ChartPoint& p) {
    GroupElement gv = g.value(p);
    if (!(gv.tag() == tag)) throw ShapeError("algebra mismatch");
    const Mat2 gi = gv.inverse().matrix();
    const Mat2& gm = gv.matrix();
    auto dg = g.differential(p);
    if (static_cast<int>(dg.size()) != m) throw ShapeError("gauge differential has wrong length");
    auto c = A.coefficients(p);
    KForm::Coefficients out;
    out.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out.push_back(LieValue::projected(tag, gi * c[i].matrix() * gm + gi * dg[i]));
    return out;
  });
}

GaugePotential gauge_transform(const GaugePotential& A, const GaugeMap& g) {
  if (!g.differential) throw ShapeError("gauge map needs an analytic differential");
  GaugePotential out = A;
  out.family.make = [A, g](double eps) { return gauge_transform(A.at(eps), g); };
  out.family.meta = A.family.meta + " (gauge transformed)";
  return out;
}

// --------------------------------------------------------------- su(2) split

namespace {

KForm entry_form(const KForm& a, int r, int c) {
  auto pick = [r, c](const KForm::Coefficients& cs) {
    KForm::Coefficients out;
    out.reserve(cs.size());
    for (const auto& x : cs) out.push_back(LieValue::scalar(x(r, c)));
    return out;
  };
  KForm::DCoeffFn d;
  if (a.has_analytic_derivative()) {
    d = [a, pick](const ChartPoint& p) {
      auto ds = a.derivatives(p);
      std::vector<KForm::Coefficients> out;
      out.reserve(ds.size());
      for (const auto& x : ds) out.push_back(pick(x));
      return out;
    };
  }
  return KForm(a.degree(), a.dim(), AlgebraTag::scalar(), [a, pick](const ChartPoint& p) { return pick(a.coefficients(p)); },
               d);
}

}  // namespace

Su2Split su2_split(const KForm& a) {
  if (!(a.tag() == AlgebraTag::su2())) throw ShapeError("su2_split needs an su(2)-valued form");
  return {entry_form(a, 0, 0), entry_form(a, 0, 1)};
}

KForm su2_join(const KForm& diag, const KForm& trans) {
  if (diag.degree() != trans.degree() || diag.dim() != trans.dim()) throw ShapeError("split parts differ in shape");
  if (diag.tag().n != 1 || trans.tag().n != 1) throw ShapeError("split parts must be complex valued");
  auto join = [](const KForm::Coefficients& d, const KForm::Coefficients& t) {
    KForm::Coefficients out;
    out.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      Mat2 m;
      m << d[i](0, 0), t[i](0, 0), -std::conj(t[i](0, 0)), -d[i](0, 0);
      out.push_back(LieValue::projected(AlgebraTag::su2(), m));
    }
    return out;
  };
  return KForm(diag.degree(), diag.dim(), AlgebraTag::su2(),
               [diag, trans, join](const ChartPoint& p) { return join(diag.coefficients(p), trans.coefficients(p)); });
}

BracketSplit bracket_split_identities(const KForm& a, const KForm& b, const ChartPoint& p, const Vec& u, const Vec& v) {
  if (!(a.tag() == AlgebraTag::su2()) || !(b.tag() == AlgebraTag::su2()))
    throw ShapeError("bracket split identities need su(2)-valued forms");
  if (a.degree() != 1 || b.degree() != 1) throw ShapeError("bracket split identities need 1-forms");
  const std::vector<Vec> vu{u}, vv{v};
  const Mat2 au = evaluate(a, p, vu).matrix(), av = evaluate(a, p, vv).matrix();
  const Mat2 bu = evaluate(b, p, vu).matrix(), bv = evaluate(b, p, vv).matrix();
  const Mat2 lhs = (au * bv - bv * au) - (av * bu - bu * av);
  const cplx aDu = au(0, 0), aDv = av(0, 0), aTu = au(0, 1), aTv = av(0, 1);
  const cplx bDu = bu(0, 0), bDv = bv(0, 0), bTu = bu(0, 1), bTv = bv(0, 1);
  BracketSplit r;
  r.d_lhs = lhs(0, 0);
  r.d_rhs = cplx(0.0, -2.0) * (aTu * std::conj(bTv) - aTv * std::conj(bTu)).imag();
  r.t_lhs = lhs(0, 1);
  r.t_rhs = 2.0 * ((aDu * bTv - aDv * bTu) - (aTu * bDv - aTv * bDu));
  return r;
}

// ---------------------------------------------------------------- bundles

BundleForm reconstruct_bundle_form(const KForm& A) {
  if (A.degree() != 1) throw ShapeError("connection form needs a 1-form potential");
  BundleForm w;
  w.tag = A.tag();
  w.base_dim = A.dim();
  w.eval = [A](const ChartPoint& x, const GroupElement& g, const BundleTangent& t) {
    if (!(t.fiber.tag() == A.tag()) || !(g.tag() == A.tag())) throw ShapeError("algebra mismatch");
    const std::vector<Vec> v{t.base};
    return adjoint(g.inverse(), evaluate(A, x, v)) + t.fiber;
  };
  return w;
}

BundleForm reconstruct_bundle_form(const GaugePotential& A, double eps) { return reconstruct_bundle_form(A.at(eps)); }

BundleFamily reconstruct_bundle_family(const GaugePotential& A) {
  return {[A](double eps) { return reconstruct_bundle_form(A, eps); }, A.family.meta + " (reconstructed)"};
}

double vertical_residual(const BundleForm& w, std::span<const AxiomSample> samples) {
  double r = 0.0;
  for (const auto& s : samples) {
    BundleTangent vert{Vec(static_cast<std::size_t>(w.base_dim), 0.0), s.t.fiber};
    r = std::max(r, (w(s.x, s.g, vert) - s.t.fiber).norm());
  }
  return r;
}

double equivariance_residual(const BundleForm& w, std::span<const AxiomSample> samples,
                             std::span<const GroupElement> lattice) {
  double r = 0.0;
  for (const auto& s : samples) {
    const LieValue here = w(s.x, s.g, s.t);
    for (const auto& h : lattice) {
      const GroupElement hi = h.inverse();
      BundleTangent moved{s.t.base, adjoint(hi, s.t.fiber)};
      r = std::max(r, (w(s.x, s.g * h, moved) - adjoint(hi, here)).norm());
    }
  }
  return r;
}

AxiomResiduals check_axioms(const BundleFamily& fam, const EpsilonLadder& ladder, std::span<const AxiomSample> samples,
                            std::span<const GroupElement> lattice) {
  AxiomResiduals out;
  for (double eps : ladder.values()) {
    BundleForm w = fam(eps);
    out.eps.push_back(eps);
    out.res_i.push_back(vertical_residual(w, samples));
    out.res_ii.push_back(equivariance_residual(w, samples, lattice));
  }
  return out;
}

namespace {

Eigen::MatrixXd fiber_block_inverse(const BundleForm& w, const ChartPoint& x) {
  const auto bs = basis(w.tag);
  const int nb = static_cast<int>(bs.size());
  const GroupElement e = GroupElement::identity(w.tag);
  Eigen::MatrixXd M(nb, nb);
  for (int b = 0; b < nb; ++b) {
    BundleTangent t{Vec(static_cast<std::size_t>(w.base_dim), 0.0), bs[b]};
    auto c = w(x, e, t).coordinates();
    for (int r = 0; r < nb; ++r) M(r, b) = c[r];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (!(s(nb - 1) > 1e-8 * std::max(1.0, s(0)))) throw NumericalError("ε too large: vertical block degenerate");
  return M.inverse();
}

}  // namespace

BundleForm canonicalize(const BundleForm& w, std::span<const ChartPoint> validate_at) {
  for (const auto& x : validate_at) fiber_block_inverse(w, x);
  BundleForm out;
  out.tag = w.tag;
  out.base_dim = w.base_dim;
  out.eval = [w](const ChartPoint& x, const GroupElement& g, const BundleTangent& t) {
    const Eigen::MatrixXd Minv = fiber_block_inverse(w, x);
    const GroupElement e = GroupElement::identity(w.tag);
    BundleTangent at_e{t.base, adjoint(g, t.fiber)};
    auto c = w(x, e, at_e).coordinates();
    Eigen::VectorXd y = Minv * Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    LieValue val = from_coordinates(w.tag, std::vector<double>(y.data(), y.data() + y.size()));
    return adjoint(g.inverse(), val);
  };
  return out;
}

std::optional<double> canonicalization_threshold(const BundleFamily& fam, const EpsilonLadder& ladder,
                                                 std::span<const ChartPoint> base_samples) {
  std::optional<double> best;
  auto eps = ladder.values();
  for (auto it = eps.rbegin(); it != eps.rend(); ++it) {
    try {
      canonicalize(fam(*it), base_samples);
      best = *it;
    } catch (const NumericalError&) {
      break;
    }
  }
  return best;
}

double bundle_distance(const BundleForm& a, const BundleForm& b, std::span<const AxiomSample> samples) {
  double r = 0.0;
  for (const auto& s : samples) r = std::max(r, (a(s.x, s.g, s.t) - b(s.x, s.g, s.t)).norm());
  return r;
}

LieValue bundle_curvature(const BundleForm& w, const ChartPoint& x, const GroupElement& g, const BundleTangent& X,
                          const BundleTangent& Y) {
  // Derivative of omega(Z) along the flow of the left-invariant extension of D.
  auto along = [&](const BundleTangent& D, const BundleTangent& Z) {
    auto at = [&](double t) {
      ChartPoint xt = x;
      for (std::size_t i = 0; i < xt.size(); ++i) xt[i] += t * D.base[i];
      return w(xt, g * exp(t * D.fiber), Z).matrix();
    };
    const double h = 1e-2;
    auto stencil = [&](double s) { return Mat2((-at(2 * s) + 8.0 * at(s) - 8.0 * at(-s) + at(-2 * s)) / (12.0 * s)); };
    return LieValue::projected(w.tag, (16.0 * stencil(0.5 * h) - stencil(h)) / 15.0);
  };
  BundleTangent br{Vec(static_cast<std::size_t>(w.base_dim), 0.0), bracket(X.fiber, Y.fiber)};
  LieValue dw = along(X, Y) - along(Y, X) - w(x, g, br);
  return dw + bracket(w(x, g, X), w(x, g, Y));
}

}  // namespace gencon
