#include "gencon/holonomy.hpp"

#include "gencon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace gencon {

// ------------------------------------------------------------------ curves

ParamCurve ParamCurve::circle(int chart_dim, const Vec& center, double radius, int ax, int ay) {
  if (static_cast<int>(center.size()) != chart_dim) throw ShapeError("circle center has wrong dimension");
  if (ax < 0 || ay < 0 || ax >= chart_dim || ay >= chart_dim || ax == ay) throw ShapeError("circle axes out of range");
  if (!(radius > 0.0)) throw ShapeError("circle radius must be positive");
  ParamCurve c;
  c.a = 0.0;
  c.b = 2.0 * std::numbers::pi;
  c.map = [=](double t) {
    ChartPoint x = center;
    x[ax] += radius * std::cos(t);
    x[ay] += radius * std::sin(t);
    return x;
  };
  c.velocity = [=](double t) {
    Vec v(static_cast<std::size_t>(chart_dim), 0.0);
    v[ax] = -radius * std::sin(t);
    v[ay] = radius * std::cos(t);
    return v;
  };
  return c;
}

ParamCurve ParamCurve::reversed() const {
  ParamCurve r;
  r.a = a;
  r.b = b;
  const auto m = map;
  const auto v = velocity;
  const double s = a + b;
  r.map = [m, s](double t) { return m(s - t); };
  r.velocity = [v, s](double t) {
    Vec w = v(s - t);
    for (auto& x : w) x = -x;
    return w;
  };
  if (!pieces.empty()) {
    // Pieces of the reversal, each reparameterized onto its slot in [a, b].
    double t0 = a;
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
      ParamCurve p = it->reversed();
      const double len = p.b - p.a, shift = t0 - p.a;
      ParamCurve q;
      q.a = t0;
      q.b = t0 + len;
      q.map = [p, shift](double t) { return p.map(t - shift); };
      q.velocity = [p, shift](double t) { return p.velocity(t - shift); };
      r.pieces.push_back(std::move(q));
      t0 += len;
    }
  }
  return r;
}

ParamCurve ParamCurve::then(const ParamCurve& next) const {
  ParamCurve c;
  c.a = a;
  c.b = b + (next.b - next.a);
  const ParamCurve first = *this;
  const ParamCurve second = next;
  const double mid = b;
  c.map = [first, second, mid](double t) {
    return t <= mid ? first.map(t) : second.map(second.a + (t - mid));
  };
  c.velocity = [first, second, mid](double t) {
    return t <= mid ? first.velocity(t) : second.velocity(second.a + (t - mid));
  };
  auto add = [&c](const ParamCurve& part, double shift) {
    auto push = [&c, shift](const ParamCurve& p) {
      ParamCurve q;
      q.a = p.a + shift;
      q.b = p.b + shift;
      q.map = [p, shift](double t) { return p.map(t - shift); };
      q.velocity = [p, shift](double t) { return p.velocity(t - shift); };
      c.pieces.push_back(std::move(q));
    };
    if (part.pieces.empty())
      push(part);
    else
      for (const auto& p : part.pieces) push(p);
  };
  add(first, 0.0);
  add(second, mid - second.a);
  return c;
}

ParamCurve ParamCurve::reparameterized(std::function<double(double)> phi, std::function<double(double)> dphi, double s0,
                                       double s1) const {
  if (!(s0 < s1)) throw ShapeError("reparameterization interval must satisfy s0 < s1");
  ParamCurve c;
  c.a = s0;
  c.b = s1;
  const auto m = map;
  const auto v = velocity;
  c.map = [m, phi](double s) { return m(phi(s)); };
  c.velocity = [v, phi, dphi](double s) {
    Vec w = v(phi(s));
    const double d = dphi(s);
    for (auto& x : w) x *= d;
    return w;
  };
  return c;
}

bool ParamCurve::closed(double tol) const {
  ChartPoint p = map(a), q = map(b);
  double scale = 1.0, diff = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    scale = std::max(scale, std::abs(p[i]));
    diff = std::max(diff, std::abs(p[i] - q[i]));
  }
  return diff <= tol * scale;
}

double velocity_defect(const ParamCurve& c, double t) {
  const double h = 1e-6 * std::max(1.0, std::abs(t));
  ChartPoint p = c.map(t + h), m = c.map(t - h);
  Vec v = c.velocity(t);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double fd = (p[i] - m[i]) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - v[i]) / std::max(1.0, std::abs(v[i])));
  }
  return worst;
}

// --------------------------------------------------------------- transport

namespace {

Mat2 generator(const KForm& A, const ParamCurve& c, double t, const TransportOptions& opts) {
  ChartPoint x = c.map(t);
  if (opts.in_chart && !opts.in_chart(x)) throw NumericalError("curve exits chart at t=" + std::to_string(t));
  Vec v = c.velocity(t);
  if (static_cast<int>(x.size()) != A.dim() || static_cast<int>(v.size()) != A.dim())
    throw ShapeError("curve does not lie in the potential's chart");
  auto coeffs = A.coefficients(x);
  Mat2 k = Mat2::Zero();
  for (int i = 0; i < A.dim(); ++i) k -= v[i] * coeffs[i].matrix();
  if (!k.allFinite()) throw NumericalError("curve exits chart at t=" + std::to_string(t));
  return k;
}

void integrate_piece(const KForm& A, const ParamCurve& c, double step, const TransportOptions& opts, GroupElement& g,
                     TransportResult& res) {
  const double len = c.b - c.a;
  const int n = std::max(1, static_cast<int>(std::ceil(len / step - 1e-9)));
  const double h = len / n;
  const AlgebraTag tag = g.tag();
  Mat2 k_start = generator(A, c, c.a, opts);
  for (int s = 0; s < n; ++s) {
    const double t = c.a + s * h;
    const double t_end = s + 1 == n ? c.b : t + h;
    const Mat2& G = g.matrix();
    const Mat2 k_mid = generator(A, c, t + 0.5 * h, opts);
    const Mat2 k_end = generator(A, c, t_end, opts);
    const Mat2 k1 = k_start * G;
    const Mat2 k2 = k_mid * (G + 0.5 * h * k1);
    const Mat2 k3 = k_mid * (G + 0.5 * h * k2);
    const Mat2 k4 = k_end * (G + h * k3);
    const Mat2 raw = G + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    g = GroupElement::projected(tag, raw);
    res.max_drift = std::max(res.max_drift, operator_distance(raw, g.matrix(), tag.n));
    res.max_defect = std::max(res.max_defect, g.constraint_defect());
    ++res.steps;
    if (opts.keep_trace) res.trace.emplace_back(t_end, g);
    k_start = k_end;
  }
}

}  // namespace

TransportResult transport(const KForm& A, const ParamCurve& curve, const GroupElement& g0,
                          const TransportOptions& opts) {
  if (A.degree() != 1) throw ShapeError("transport needs a 1-form potential");
  if (!(g0.tag() == A.tag())) throw ShapeError("algebra mismatch");
  if (!(curve.b > curve.a)) throw ShapeError("curve interval must satisfy a < b");
  if (opts.step < 0.0) throw ShapeError("transport step must be positive");
  const double step = opts.step > 0.0 ? opts.step : (curve.b - curve.a) / 4096.0;
  TransportResult res;
  GroupElement g = g0;
  if (opts.keep_trace) res.trace.emplace_back(curve.a, g);
  if (curve.pieces.empty()) {
    integrate_piece(A, curve, step, opts, g, res);
  } else {
    for (const auto& p : curve.pieces) integrate_piece(A, p, step, opts, g, res);
  }
  res.g_end = g;
  return res;
}

TransportResult transport(const GaugePotential& A, double eps, const ParamCurve& curve, const GroupElement& g0,
                          const TransportOptions& opts) {
  return transport(A.at(eps), curve, g0, opts);
}

GroupElement holonomy(const KForm& A, const ParamCurve& loop, const TransportOptions& opts) {
  if (!loop.closed()) throw ShapeError("holonomy needs a closed loop");
  return transport(A, loop, GroupElement::identity(A.tag()), opts).g_end;
}

GroupElement holonomy(const GaugePotential& A, double eps, const ParamCurve& loop, const TransportOptions& opts) {
  return holonomy(A.at(eps), loop, opts);
}

HolonomyNet holonomy_net(const GaugePotential& A, const ParamCurve& loop, const EpsilonLadder& ladder,
                         const TransportOptions& opts) {
  HolonomyNet net;
  std::vector<std::vector<double>> coords;
  for (double e : ladder.values()) {
    GroupElement g = holonomy(A, e, loop, opts);
    net.eps.push_back(e);
    net.values.push_back(g);
    coords.push_back(log(g).coordinates());
  }
  const std::size_t nc = coords.front().size();
  std::vector<double> lim(nc);
  double err2 = 0.0;
  for (std::size_t j = 0; j < nc; ++j) {
    std::vector<cplx> series;
    for (const auto& c : coords) series.emplace_back(c[j], 0.0);
    Extrapolation ex = extrapolate(net.eps, series);
    lim[j] = ex.limit.real();
    err2 += ex.err_est * ex.err_est;
  }
  net.limit = exp(from_coordinates(A.tag, lim));
  net.err_est = std::sqrt(err2);
  return net;
}

void write_trace_csv(const std::string& path, const std::vector<std::pair<double, GroupElement>>& trace) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  const int n = trace.empty() ? 1 : trace.front().second.n();
  f << "t";
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) f << ",g" << r << c << "_re,g" << r << c << "_im";
  f << "\n";
  char buf[64];
  for (const auto& [t, g] : trace) {
    std::snprintf(buf, sizeof buf, "%.17g", t);
    f << buf;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", g(r, c).real(), g(r, c).imag());
        f << buf;
      }
    f << "\n";
  }
}

// ----------------------------------------------------- associated bundles

std::vector<cplx> parallel_transport_vector(Representation rep, const GroupElement& g0, const GroupElement& g1,
                                            const std::vector<cplx>& xi0) {
  if (!(g0.tag() == g1.tag())) throw ShapeError("algebra mismatch");
  if (rep == Representation::Trivial) return xi0;
  const int n = g0.n();
  if (static_cast<int>(xi0.size()) != n) throw ShapeError("vector dimension does not match the representation");
  const Mat2 m = g1.matrix() * g0.inverse().matrix();
  std::vector<cplx> out(static_cast<std::size_t>(n), cplx{});
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out[r] += m(r, c) * xi0[c];
  return out;
}

ConnectionCoefficients connection_coefficients(const KForm& A, const ChartPoint& p) {
  if (A.degree() != 1) throw ShapeError("connection coefficients need a 1-form potential");
  auto c = A.coefficients(p);
  const int n = A.tag().n;
  ConnectionCoefficients G(static_cast<std::size_t>(A.dim()),
                           std::vector<std::vector<cplx>>(static_cast<std::size_t>(n), std::vector<cplx>(static_cast<std::size_t>(n))));
  for (int i = 0; i < A.dim(); ++i)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) G[i][a][b] = c[i](b, a);
  return G;
}

ConnectionCoefficients connection_coefficients(const GaugePotential& A, double eps, const ChartPoint& p) {
  return connection_coefficients(A.at(eps), p);
}

std::vector<cplx> covariant_derivative(const KForm& A, const Section& V, const std::function<Vec(const ChartPoint&)>& X,
                                       const ChartPoint& p) {
  if (!V.value || !V.partials || !X) throw ShapeError("covariant derivative needs section, partials and field");
  const auto G = connection_coefficients(A, p);
  const int n = A.tag().n;
  const auto v = V.value(p);
  const auto dv = V.partials(p);
  const Vec x = X(p);
  if (static_cast<int>(v.size()) != n) throw ShapeError("section dimension does not match the representation");
  if (static_cast<int>(x.size()) != A.dim() || static_cast<int>(dv.size()) != A.dim())
    throw ShapeError("vector field dimension does not match the chart");
  std::vector<cplx> out(static_cast<std::size_t>(n), cplx{});
  for (int i = 0; i < A.dim(); ++i)
    for (int b = 0; b < n; ++b) {
      out[b] += x[i] * dv[i][b];
      for (int a = 0; a < n; ++a) out[b] += G[i][a][b] * v[a] * x[i];
    }
  return out;
}

std::vector<cplx> covariant_derivative(const GaugePotential& A, double eps, const Section& V,
                                       const std::function<Vec(const ChartPoint&)>& X, const ChartPoint& p) {
  return covariant_derivative(A.at(eps), V, X, p);
}

}  // namespace gencon
