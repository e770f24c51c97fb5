#include "gencon/quadrature.hpp"

#include "gencon/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>

namespace gencon {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ShapeError("Gauss rule needs at least one node");
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? x : p1;
      double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

double default_tolerance(double eps) { return 1e-8 * std::max(1.0, std::ldexp(1.0, -10) / eps); }

namespace {

constexpr int kMaxDim = 4;
constexpr int kNodes = 7;

using Box = std::array<double, kMaxDim>;

struct Cell {
  Box lo{}, hi{};
  cplx value{};
  double err = 0.0;
  std::size_t id = 0;
  bool alive = true;
};

class Engine {
 public:
  Engine(const std::function<cplx(const Vec&)>& g, int dim) : g_(g), dim_(dim), rule_(gauss_legendre(kNodes)) {
    if (dim < 1 || dim > kMaxDim) throw ShapeError("integration dimension must be 1..4");
    total_nodes_ = 1;
    for (int a = 0; a < dim; ++a) total_nodes_ *= kNodes;
    x_.resize(static_cast<std::size_t>(dim));
  }

  cplx rule(const Box& lo, const Box& hi) {
    cplx sum{};
    std::array<int, kMaxDim> idx{};
    double jac = 1.0;
    for (int a = 0; a < dim_; ++a) jac *= 0.5 * (hi[a] - lo[a]);
    for (int t = 0; t < total_nodes_; ++t) {
      double w = 1.0;
      for (int a = 0; a < dim_; ++a) {
        x_[a] = 0.5 * (lo[a] + hi[a]) + 0.5 * (hi[a] - lo[a]) * rule_.nodes[idx[a]];
        w *= rule_.weights[idx[a]];
      }
      sum += w * g_(x_);
      for (int a = 0; a < dim_; ++a) {
        if (++idx[a] < kNodes) break;
        idx[a] = 0;
      }
    }
    evaluations_ += static_cast<std::size_t>(total_nodes_);
    return jac * sum;
  }

  std::vector<std::pair<Box, Box>> children(const Box& lo, const Box& hi) const {
    std::vector<std::pair<Box, Box>> out;
    for (int mask = 0; mask < (1 << dim_); ++mask) {
      Box l = lo, h = hi;
      for (int a = 0; a < dim_; ++a) {
        double mid = 0.5 * (lo[a] + hi[a]);
        if (mask & (1 << a))
          l[a] = mid;
        else
          h[a] = mid;
      }
      out.emplace_back(l, h);
    }
    return out;
  }

  void assess(Cell& c) {
    cplx parent = rule(c.lo, c.hi);
    cplx kids{};
    for (const auto& [l, h] : children(c.lo, c.hi)) kids += rule(l, h);
    c.value = kids;
    c.err = std::abs(parent - kids);
    if (!std::isfinite(c.err) || !std::isfinite(c.value.real()) || !std::isfinite(c.value.imag()))
      throw NumericalError("quadrature: non-finite integrand value");
  }

  std::size_t evaluations() const { return evaluations_; }

 private:
  const std::function<cplx(const Vec&)>& g_;
  int dim_;
  GaussRule rule_;
  int total_nodes_ = 1;
  Vec x_;
  std::size_t evaluations_ = 0;
};

std::vector<double> breakpoints(double a, double b, bool grade_lo, bool grade_hi, int levels, int split) {
  std::vector<double> pts;
  if (!grade_lo && !grade_hi) {
    for (int i = 0; i <= split; ++i) pts.push_back(a + (b - a) * i / split);
    return pts;
  }
  if (grade_lo && grade_hi) {
    const double mid = 0.5 * (a + b);
    auto left = breakpoints(a, mid, true, false, levels, split);
    auto right = breakpoints(mid, b, false, true, levels, split);
    pts = left;
    pts.insert(pts.end(), right.begin() + 1, right.end());
    return pts;
  }
  pts.push_back(a);
  for (int j = levels; j >= 0; --j) {
    double t = std::ldexp(1.0, -j);
    pts.push_back(grade_lo ? a + (b - a) * t : b - (b - a) * t);
  }
  if (grade_hi) {
    // Built from the upper face; reorder ascending.
    pts.front() = b;
    std::sort(pts.begin(), pts.end());
  }
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

QuadratureResult integrate_box(const std::function<cplx(const Vec&)>& g, const Vec& lower, const Vec& upper,
                               const QuadratureOptions& opts, const std::vector<std::pair<int, int>>& graded_faces) {
  const int dim = static_cast<int>(lower.size());
  if (upper.size() != lower.size()) throw ShapeError("integration box bounds differ in length");
  for (int a = 0; a < dim; ++a)
    if (!(lower[a] < upper[a])) throw ShapeError("integration box must satisfy lower < upper");
  if (!(opts.tol > 0.0)) throw ShapeError("quadrature tolerance must be positive");
  Engine engine(g, dim);

  std::vector<std::vector<double>> axis_pts(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    bool glo = false, ghi = false;
    for (auto [ax, side] : graded_faces)
      if (ax == a) (side == 0 ? glo : ghi) = true;
    axis_pts[a] = breakpoints(lower[a], upper[a], glo, ghi, opts.graded_levels, std::max(1, opts.initial_split));
  }

  std::vector<Cell> cells;
  std::array<std::size_t, kMaxDim> idx{};
  while (true) {
    Cell c;
    for (int a = 0; a < dim; ++a) {
      c.lo[a] = axis_pts[a][idx[a]];
      c.hi[a] = axis_pts[a][idx[a] + 1];
    }
    c.id = cells.size();
    cells.push_back(c);
    int a = 0;
    for (; a < dim; ++a) {
      if (++idx[a] + 1 < axis_pts[a].size()) break;
      idx[a] = 0;
    }
    if (a == dim) break;
  }

  auto cmp = [&cells](std::size_t x, std::size_t y) {
    if (cells[x].err != cells[y].err) return cells[x].err < cells[y].err;
    return x > y;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);

  double total = 0.0;
  double unresolved = 0.0;
  for (auto& c : cells) {
    engine.assess(c);
    total += c.err;
  }
  for (const auto& c : cells) heap.push(c.id);
  std::size_t live = cells.size();

  auto exact_total = [&] {
    double s = unresolved;
    for (const auto& c : cells)
      if (c.alive) s += c.err;
    return s;
  };

  while (true) {
    if (total <= opts.tol) {
      total = exact_total();
      if (total <= opts.tol) break;
    }
    if (heap.empty()) break;
    const std::size_t top = heap.top();
    heap.pop();
    Cell parent = cells[top];
    bool splittable = true;
    for (int a = 0; a < dim; ++a)
      if (parent.hi[a] - parent.lo[a] <= 1e-14 * (upper[a] - lower[a])) splittable = false;
    if (!splittable || parent.err == 0.0) {
      unresolved += parent.err;
      cells[top].err = 0.0;
      continue;
    }
    if (live + (std::size_t{1} << dim) - 1 > opts.max_cells) {
      throw NumericalError("quadrature cell budget exhausted (" + std::to_string(opts.max_cells) +
                           " cells), achieved error estimate " + std::to_string(exact_total()));
    }
    cells[top].alive = false;
    total -= parent.err;
    const auto kids = engine.children(parent.lo, parent.hi);
    for (const auto& [l, h] : kids) {
      Cell c;
      c.lo = l;
      c.hi = h;
      c.id = cells.size();
      engine.assess(c);
      total += c.err;
      cells.push_back(c);
      heap.push(c.id);
    }
    live += kids.size() - 1;
  }

  QuadratureResult r;
  for (const auto& c : cells)
    if (c.alive) {
      r.value += c.value;
      r.err_est += c.err;
    }
  r.err_est += unresolved;
  r.cells = live;
  r.evaluations = engine.evaluations();
  return r;
}

QuadratureResult integrate_form(const KForm& f, const SurfacePatch& patch, const QuadratureOptions& opts,
                                const Weight& weight) {
  if (f.degree() != patch.dim) throw ShapeError("form degree does not match patch dimension");
  if (f.dim() != patch.chart_dim) throw ShapeError("patch does not map into the form's chart");
  if (f.tag().n != 1) throw ShapeError("integration needs a scalar- or u(1)-valued form");
  std::vector<Vec> units(static_cast<std::size_t>(patch.dim), Vec(static_cast<std::size_t>(patch.dim), 0.0));
  for (int a = 0; a < patch.dim; ++a) units[a][a] = 1.0;
  const double orient = patch.orientation >= 0 ? 1.0 : -1.0;
  std::function<cplx(const Vec&)> g = [&](const Vec& q) {
    cplx v = pullback(f, patch, q, units)(0, 0);
    if (weight) v *= weight(patch.map(q));
    return orient * v;
  };
  return integrate_box(g, patch.lower, patch.upper, opts, patch.graded_faces);
}

QuadratureResult integrate_form(const KForm& f, std::span<const SurfacePatch> patches, const QuadratureOptions& opts,
                                const Weight& weight) {
  if (patches.empty()) throw ShapeError("no patches to integrate over");
  QuadratureOptions each = opts;
  each.tol = opts.tol / static_cast<double>(patches.size());
  QuadratureResult total;
  for (const auto& p : patches) {
    auto r = integrate_form(f, p, each, weight);
    total.value += r.value;
    total.err_est += r.err_est;
    total.cells += r.cells;
    total.evaluations += r.evaluations;
  }
  return total;
}

FluxLimitResult flux_limit(const EpsilonFamily& fam, std::span<const SurfacePatch> patches, const EpsilonLadder& ladder,
                           std::optional<double> tol, const Weight& weight) {
  FluxLimitResult out;
  out.net.ladder = ladder;
  for (int k = 0; k < ladder.count(); ++k) {
    const double eps = ladder[k];
    QuadratureOptions opts;
    opts.tol = tol ? *tol : default_tolerance(eps);
    auto r = integrate_form(fam(eps), patches, opts, weight);
    out.net.values.push_back(r.value);
    out.net.noise.push_back(r.err_est);
  }
  out.ext = extrapolate(out.net);
  return out;
}

}  // namespace gencon
