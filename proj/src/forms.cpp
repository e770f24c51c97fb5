#include "gencon/forms.hpp"

#include "gencon/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace gencon {

namespace {

using IndexTable = std::array<std::array<std::vector<std::vector<int>>, kMaxChartDim + 2>, kMaxChartDim + 1>;

void combinations(int m, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < m; ++i) {
    cur.push_back(i);
    combinations(m, k, i + 1, cur, out);
    cur.pop_back();
  }
}

const IndexTable& index_table() {
  static const IndexTable table = [] {
    IndexTable t;
    for (int m = 0; m <= kMaxChartDim; ++m)
      for (int k = 0; k <= m && k <= kMaxChartDim + 1; ++k) {
        std::vector<int> cur;
        combinations(m, k, 0, cur, t[m][k]);
      }
    return t;
  }();
  return table;
}

void check_shape(int degree, int dim) {
  if (dim < 1 || dim > kMaxChartDim) throw ShapeError("chart dimension must be in 1..7");
  if (degree < 0 || degree > kMaxDegree + 1 || degree > dim) throw ShapeError("form degree out of range");
}

// Sum of scalar-weighted Lie values, projected once onto the tag.
LieValue combine(const AlgebraTag& tag, std::span<const LieValue> basis, std::span<const double> weights) {
  Mat2 acc = Mat2::Zero();
  for (std::size_t b = 0; b < basis.size(); ++b) acc += weights[b] * basis[b].matrix();
  return LieValue::projected(tag, acc);
}

LieValue evaluate_coeffs(const KForm::Coefficients& c, const AlgebraTag& tag, int degree, int dim,
                         std::span<const Vec> vectors) {
  const auto& idx = multi_indices(dim, degree);
  Mat2 acc = Mat2::Zero();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double det = minor_det(vectors, idx[i]);
    if (det != 0.0) acc += det * c[i].matrix();
  }
  return LieValue::projected(tag, acc);
}

void check_vectors(int count, int dim, std::span<const Vec> vectors) {
  if (static_cast<int>(vectors.size()) != count)
    throw ShapeError("expected " + std::to_string(count) + " argument vectors, got " + std::to_string(vectors.size()));
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != dim) throw ShapeError("argument vector length does not match chart dimension");
}

}  // namespace

const std::vector<std::vector<int>>& multi_indices(int m, int k) {
  if (m < 0 || m > kMaxChartDim || k < 0 || k > m) throw ShapeError("multi-index request out of range");
  return index_table()[m][k];
}

int multi_index_position(int m, std::span<const int> idx) {
  const auto& all = multi_indices(m, static_cast<int>(idx.size()));
  for (std::size_t i = 0; i < all.size(); ++i)
    if (std::equal(all[i].begin(), all[i].end(), idx.begin(), idx.end())) return static_cast<int>(i);
  throw ShapeError("multi-index is not increasing");
}

double fd_step(const ChartPoint& p) {
  double inf = 0.0;
  for (double x : p) inf = std::max(inf, std::abs(x));
  return 1e-4 * std::max(1.0, inf);
}

double minor_det(std::span<const Vec> cols, std::span<const int> rows) {
  const std::size_t n = rows.size();
  if (n == 0) return 1.0;
  if (n == 1) return cols[0][rows[0]];
  if (n == 2) return cols[0][rows[0]] * cols[1][rows[1]] - cols[1][rows[0]] * cols[0][rows[1]];
  std::array<std::array<double, kMaxChartDim>, kMaxChartDim> a{};
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a[r][c] = cols[c][rows[r]];
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// ------------------------------------------------------------------ KForm

KForm::KForm(int degree, int dim, AlgebraTag tag, CoeffFn coeff, DCoeffFn dcoeff) {
  check_shape(degree, dim);
  if (!coeff) throw ShapeError("form needs a coefficient callback");
  impl_ = std::make_shared<Impl>(Impl{degree, dim, tag, std::move(coeff), std::move(dcoeff), nullptr});
}

KForm KForm::from_field(int degree, int dim, AlgebraTag tag, std::vector<LieValue> basis, SmoothField field) {
  check_shape(degree, dim);
  const int n_idx = static_cast<int>(multi_indices(dim, degree).size());
  const int nb = static_cast<int>(basis.size());
  if (field.in_dim() != dim || field.out_dim() != n_idx * nb)
    throw ShapeError("smooth field shape does not match form layout");
  for (const auto& b : basis)
    if (!(b.tag() == tag)) throw ShapeError("algebra mismatch in form basis");

  auto exp_ptr = std::make_shared<FormExpansion>(FormExpansion{std::move(basis), std::move(field)});
  CoeffFn coeff = [exp_ptr, tag, n_idx, nb](const ChartPoint& p) {
    std::vector<double> y(static_cast<std::size_t>(n_idx * nb));
    exp_ptr->field.value(p, y);
    Coefficients out;
    out.reserve(static_cast<std::size_t>(n_idx));
    for (int i = 0; i < n_idx; ++i)
      out.push_back(combine(tag, exp_ptr->basis, std::span<const double>(y).subspan(static_cast<std::size_t>(i * nb), nb)));
    return out;
  };
  DCoeffFn dcoeff;
  if (exp_ptr->field.depth() >= 1) {
    dcoeff = [exp_ptr, tag, n_idx, nb, dim](const ChartPoint& p) {
      std::vector<Coefficients> out(static_cast<std::size_t>(dim));
      std::vector<double> der(static_cast<std::size_t>(n_idx * nb));
      for (int j = 0; j < dim; ++j) {
        field_partial<double>(exp_ptr->field, p, j, {}, der);
        out[j].reserve(static_cast<std::size_t>(n_idx));
        for (int i = 0; i < n_idx; ++i)
          out[j].push_back(combine(tag, exp_ptr->basis, std::span<const double>(der).subspan(static_cast<std::size_t>(i * nb), nb)));
      }
      return out;
    };
  }
  auto impl = std::make_shared<Impl>(Impl{degree, dim, tag, std::move(coeff), std::move(dcoeff), exp_ptr});
  return KForm(std::move(impl));
}

KForm KForm::constant(int degree, int dim, Coefficients coeffs) {
  check_shape(degree, dim);
  if (coeffs.size() != multi_indices(dim, degree).size()) throw ShapeError("wrong number of coefficients");
  AlgebraTag tag = coeffs.front().tag();
  for (const auto& c : coeffs)
    if (!(c.tag() == tag)) throw ShapeError("algebra mismatch in constant form");
  Coefficients zeros(coeffs.size(), LieValue::zero(tag));
  return KForm(
      degree, dim, tag, [coeffs](const ChartPoint&) { return coeffs; },
      [zeros, dim](const ChartPoint&) { return std::vector<Coefficients>(static_cast<std::size_t>(dim), zeros); });
}

KForm KForm::zero(int degree, int dim, AlgebraTag tag) {
  return constant(degree, dim, Coefficients(multi_indices(dim, degree).size(), LieValue::zero(tag)));
}

int KForm::size() const { return static_cast<int>(multi_indices(dim(), degree()).size()); }

KForm::Coefficients KForm::coefficients(const ChartPoint& p) const {
  if (static_cast<int>(p.size()) != dim()) throw ShapeError("chart point has wrong dimension");
  return impl_->coeff(p);
}

std::vector<KForm::Coefficients> KForm::derivatives(const ChartPoint& p) const {
  if (impl_->dcoeff) return impl_->dcoeff(p);
  return finite_difference_derivatives(p);
}

std::vector<KForm::Coefficients> KForm::finite_difference_derivatives(const ChartPoint& p) const {
  const double h = fd_step(p);
  const int n = size();
  std::vector<Coefficients> out(static_cast<std::size_t>(dim()));
  auto at = [&](int j, double off) {
    ChartPoint q = p;
    q[j] += off;
    return impl_->coeff(q);
  };
  for (int j = 0; j < dim(); ++j) {
    auto p2 = at(j, 2 * h), p1 = at(j, h), ph = at(j, 0.5 * h);
    auto m2 = at(j, -2 * h), m1 = at(j, -h), mh = at(j, -0.5 * h);
    out[j].reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Mat2 d_h = (-p2[i].matrix() + 8.0 * p1[i].matrix() - 8.0 * m1[i].matrix() + m2[i].matrix()) / (12.0 * h);
      Mat2 d_half = (-p1[i].matrix() + 8.0 * ph[i].matrix() - 8.0 * mh[i].matrix() + m1[i].matrix()) / (6.0 * h);
      out[j].push_back(LieValue::projected(tag(), (16.0 * d_half - d_h) / 15.0));
    }
  }
  return out;
}

KForm KForm::without_derivative() const {
  auto impl = std::make_shared<Impl>(Impl{degree(), dim(), tag(), impl_->coeff, {}, nullptr});
  return KForm(std::move(impl));
}

// ------------------------------------------------------------- operations

LieValue evaluate(const KForm& f, const ChartPoint& p, std::span<const Vec> vectors) {
  check_vectors(f.degree(), f.dim(), vectors);
  return evaluate_coeffs(f.coefficients(p), f.tag(), f.degree(), f.dim(), vectors);
}

LieValue exterior_derivative(const KForm& f, const ChartPoint& p, std::span<const Vec> vectors) {
  if (f.degree() > 3) throw ShapeError("exterior derivative needs degree <= 3");
  check_vectors(f.degree() + 1, f.dim(), vectors);
  const auto& idx = multi_indices(f.dim(), f.degree());
  auto der = f.derivatives(p);
  Mat2 acc = Mat2::Zero();
  std::vector<int> rows(static_cast<std::size_t>(f.degree() + 1));
  for (int j = 0; j < f.dim(); ++j) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (std::find(idx[i].begin(), idx[i].end(), j) != idx[i].end()) continue;
      rows[0] = j;
      std::copy(idx[i].begin(), idx[i].end(), rows.begin() + 1);
      double det = minor_det(vectors, rows);
      if (det != 0.0) acc += det * der[j][i].matrix();
    }
  }
  return LieValue::projected(f.tag(), acc);
}

KForm exterior_derivative(const KForm& f) {
  if (f.degree() >= f.dim()) throw ShapeError("exterior derivative would exceed chart dimension");
  const int m = f.dim();
  const int k = f.degree();
  const auto& src = multi_indices(m, k);
  const auto& dst = multi_indices(m, k + 1);

  // For each target index J and removal position: (direction, source index, sign).
  struct Term {
    int dir, src, sign;
  };
  std::vector<std::vector<Term>> terms(dst.size());
  for (std::size_t jdx = 0; jdx < dst.size(); ++jdx) {
    for (int pos = 0; pos <= k; ++pos) {
      std::vector<int> rest;
      for (int q = 0; q <= k; ++q)
        if (q != pos) rest.push_back(dst[jdx][q]);
      int s = 0;
      for (std::size_t i = 0; i < src.size(); ++i)
        if (src[i] == rest) s = static_cast<int>(i);
      terms[jdx].push_back({dst[jdx][pos], s, pos % 2 == 0 ? 1 : -1});
    }
  }

  if (const FormExpansion* e = f.expansion(); e != nullptr && e->field.depth() >= 2) {
    const SmoothField inner = e->field;
    const int nb = static_cast<int>(e->basis.size());
    const int n_src = static_cast<int>(src.size());
    auto fn = [inner, nb, n_src, m, terms](auto x, auto out) {
      using T = typename decltype(x)::value_type;
      using U = std::remove_const_t<T>;
      if constexpr (dual_depth<U>::value >= 3) {
        throw ShapeError("smooth field: derivative level not available");
      } else {
        std::vector<std::vector<U>> der(static_cast<std::size_t>(m), std::vector<U>(static_cast<std::size_t>(n_src * nb)));
        for (int j = 0; j < m; ++j) field_partial<U>(inner, x, j, {}, der[j]);
        for (std::size_t jdx = 0; jdx < terms.size(); ++jdx)
          for (int b = 0; b < nb; ++b) {
            U acc(0.0);
            for (const auto& t : terms[jdx]) {
              const U& d = der[t.dir][static_cast<std::size_t>(t.src * nb + b)];
              acc = t.sign > 0 ? acc + d : acc - d;
            }
            out[jdx * nb + b] = acc;
          }
      }
    };
    SmoothField df = SmoothField::from(m, static_cast<int>(dst.size()) * nb, fn, inner.depth() - 1);
    return KForm::from_field(k + 1, m, f.tag(), e->basis, std::move(df));
  }

  const AlgebraTag tag = f.tag();
  return KForm(k + 1, m, tag, [f, terms, tag](const ChartPoint& p) {
    auto der = f.derivatives(p);
    KForm::Coefficients out;
    out.reserve(terms.size());
    for (const auto& tj : terms) {
      Mat2 acc = Mat2::Zero();
      for (const auto& t : tj) acc += static_cast<double>(t.sign) * der[t.dir][t.src].matrix();
      out.push_back(LieValue::projected(tag, acc));
    }
    return out;
  });
}

LieValue pair_values(Pairing pairing, const LieValue& a, const LieValue& b) {
  switch (pairing) {
    case Pairing::Bracket:
      return bracket(a, b);
    case Pairing::Multiply: {
      if (a.n() == 1) return LieValue::projected(AlgebraTag::gl(b.n()), a(0, 0) * b.matrix());
      if (b.n() == 1) return LieValue::projected(AlgebraTag::gl(a.n()), b(0, 0) * a.matrix());
      return LieValue::projected(AlgebraTag::gl(a.n()), a.matrix() * b.matrix());
    }
    case Pairing::TracePair:
      if (a.n() != b.n()) throw ShapeError("trace pairing needs equal matrix sizes");
      return LieValue::scalar((a.matrix() * b.matrix()).trace());
  }
  throw ShapeError("unknown pairing");
}

LieValue shuffle_sum(int j, int k, std::span<const Vec> vectors,
                     const std::function<LieValue(std::span<const Vec>)>& left,
                     const std::function<LieValue(std::span<const Vec>)>& right, const PairFn& pair) {
  if (static_cast<int>(vectors.size()) != j + k) throw ShapeError("wrong number of vectors for wedge");
  const auto& shuffles = multi_indices(j + k, j);
  bool first = true;
  LieValue acc;
  std::vector<Vec> lv(static_cast<std::size_t>(j)), rv(static_cast<std::size_t>(k));
  for (const auto& s : shuffles) {
    int inversions = 0;
    for (int a = 0; a < j; ++a) inversions += s[a] - a;
    std::size_t li = 0, ri = 0;
    for (int t = 0; t < j + k; ++t) {
      if (li < s.size() && s[li] == t)
        lv[li++] = vectors[t];
      else
        rv[ri++] = vectors[t];
    }
    LieValue term = pair(left(lv), right(rv));
    if (inversions % 2 == 1) term = -term;
    if (first) {
      acc = term;
      first = false;
    } else {
      acc += term;
    }
  }
  return acc;
}

LieValue wedge_pair(const KForm& f, const KForm& g, Pairing pairing, const ChartPoint& p, std::span<const Vec> vectors) {
  if (f.dim() != g.dim()) throw ShapeError("wedge of forms on different charts");
  check_vectors(f.degree() + g.degree(), f.dim(), vectors);
  if (pairing == Pairing::Bracket && !(f.tag() == g.tag())) throw ShapeError("algebra mismatch");
  auto cf = f.coefficients(p);
  auto cg = g.coefficients(p);
  return shuffle_sum(
      f.degree(), g.degree(), vectors,
      [&](std::span<const Vec> v) { return evaluate_coeffs(cf, f.tag(), f.degree(), f.dim(), v); },
      [&](std::span<const Vec> v) { return evaluate_coeffs(cg, g.tag(), g.degree(), g.dim(), v); },
      [pairing](const LieValue& a, const LieValue& b) { return pair_values(pairing, a, b); });
}

LieValue pullback(const KForm& f, const SurfacePatch& patch, const Vec& q, std::span<const Vec> param_vectors) {
  if (patch.chart_dim != f.dim()) throw ShapeError("patch does not map into the form's chart");
  check_vectors(f.degree(), patch.dim, param_vectors);
  auto cols = patch.jacobian(q);
  std::vector<Vec> pushed;
  pushed.reserve(param_vectors.size());
  for (const auto& w : param_vectors) {
    Vec v(static_cast<std::size_t>(patch.chart_dim), 0.0);
    for (int a = 0; a < patch.dim; ++a)
      for (int r = 0; r < patch.chart_dim; ++r) v[r] += cols[a][r] * w[a];
    pushed.push_back(std::move(v));
  }
  return evaluate(f, patch.map(q), pushed);
}

}  // namespace gencon
