#include "gencon/colombeau.hpp"

#include "gencon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gencon {

CompactRegion::CompactRegion(Vec lo, Vec hi, int grid) : lower(std::move(lo)), upper(std::move(hi)), grid_per_axis(grid) {
  if (lower.size() != upper.size() || lower.empty()) throw ShapeError("region bounds must have equal nonzero length");
  for (std::size_t a = 0; a < lower.size(); ++a)
    if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(lower[a] < upper[a]))
      throw ShapeError("region bounds must be finite with lower < upper");
  if (grid_per_axis < 9) throw ShapeError("region lattice needs at least 9 points per axis");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double local_size(const KForm& f, const ChartPoint& p, int deriv_order) {
  double m = 0.0;
  auto take = [&m](const KForm::Coefficients& cs) {
    for (const auto& c : cs) {
      double n = c.norm();
      if (!std::isfinite(n)) return false;
      m = std::max(m, n);
    }
    return true;
  };
  if (!take(f.coefficients(p))) return kInf;
  if (deriv_order >= 1) {
    for (const auto& d : f.derivatives(p))
      if (!take(d)) return kInf;
  }
  if (deriv_order >= 2) {
    const double h = fd_step(p);
    for (int i = 0; i < f.dim(); ++i) {
      ChartPoint pp = p, pm = p;
      pp[i] += h;
      pm[i] -= h;
      auto dp = f.derivatives(pp), dm = f.derivatives(pm);
      for (std::size_t j = 0; j < dp.size(); ++j)
        for (std::size_t k = 0; k < dp[j].size(); ++k) {
          double n = ((dp[j][k].matrix() - dm[j][k].matrix()) / (2.0 * h)).norm();
          if (!std::isfinite(n)) return kInf;
          m = std::max(m, n);
        }
    }
  }
  return m;
}

}  // namespace

double sup_norm(const KForm& f, const CompactRegion& K, int deriv_order) {
  if (deriv_order < 0 || deriv_order > 2) throw ShapeError("derivative order must be 0..2");
  if (K.dim() != f.dim()) throw ShapeError("region dimension does not match the form's chart");
  const int m = K.dim();
  const int g = K.grid_per_axis;
  Vec h(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) h[a] = (K.upper[a] - K.lower[a]) / (g - 1);

  struct Sample {
    double value;
    std::size_t index;
    ChartPoint p;
  };
  std::vector<Sample> best;
  constexpr std::size_t kStarts = 8;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::size_t flat = 0;
  double sup = 0.0;
  while (true) {
    ChartPoint p(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) p[a] = K.lower[a] + h[a] * idx[a];
    double v = local_size(f, p, deriv_order);
    if (!std::isfinite(v)) return kInf;
    sup = std::max(sup, v);
    best.push_back({v, flat, p});
    std::sort(best.begin(), best.end(), [](const Sample& x, const Sample& y) {
      return x.value != y.value ? x.value > y.value : x.index < y.index;
    });
    if (best.size() > kStarts) best.pop_back();
    ++flat;
    int a = 0;
    for (; a < m; ++a) {
      if (++idx[a] < g) break;
      idx[a] = 0;
    }
    if (a == m) break;
  }

  // Compass ascent from the best lattice points, confined to K.
  for (const auto& s : best) {
    ChartPoint p = s.p;
    double v = s.value;
    Vec step = h;
    for (auto& x : step) x *= 0.5;
    int evals = 0;
    for (int halvings = 0; halvings < 64 && evals < 4000;) {
      bool moved = false;
      for (int a = 0; a < m && !moved; ++a)
        for (double sgn : {1.0, -1.0}) {
          ChartPoint q = p;
          q[a] = std::clamp(q[a] + sgn * step[a], K.lower[a], K.upper[a]);
          if (q[a] == p[a]) continue;
          double w = local_size(f, q, deriv_order);
          ++evals;
          if (!std::isfinite(w)) return kInf;
          if (w > v) {
            p = q;
            v = w;
            moved = true;
            break;
          }
        }
      if (!moved) {
        for (auto& x : step) x *= 0.5;
        ++halvings;
      }
    }
    sup = std::max(sup, v);
  }
  return sup;
}

double decay_slope(const std::vector<double>& eps, const std::vector<double>& sups) {
  const std::size_t n = eps.size();
  if (sups.size() != n || n < 4) throw ShapeError("slope fit needs matching ladders of length >= 4");
  for (double s : sups)
    if (!std::isfinite(s)) throw NumericalError("family blows up non-polynomially on ladder");
  const std::size_t start = n / 2;
  bool all_zero = true;
  for (std::size_t k = start; k < n; ++k) all_zero = all_zero && sups[k] == 0.0;
  if (all_zero || sups.back() == 0.0) return kInf;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(n - start);
  for (std::size_t k = start; k < n; ++k) {
    double x = std::log(eps[k]);
    double y = std::log(std::max(sups[k], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

ModerateResult moderate_from_sups(const std::vector<double>& eps, std::vector<double> sups) {
  ModerateResult r;
  r.slope = decay_slope(eps, sups);
  r.verdict = r.slope >= -kModerateMaxOrder;
  r.order = std::isinf(r.slope) ? 0.0 : std::max(0.0, -r.slope);
  r.sups = std::move(sups);
  return r;
}

NegligibleResult negligible_from_sups(const std::vector<double>& eps, std::vector<double> sups, int max_order) {
  if (max_order < 0 || max_order > 8) throw ShapeError("maximum negligibility order must be 0..8");
  NegligibleResult r;
  r.slope = decay_slope(eps, sups);
  r.verdict = r.slope >= max_order - 0.5;
  r.negligible_up_to = std::isinf(r.slope) ? max_order
                                           : std::min(max_order, static_cast<int>(std::floor(r.slope + 0.5)));
  r.sups = std::move(sups);
  return r;
}

namespace {

std::vector<double> ladder_sups(const EpsilonFamily& fam, const CompactRegion& K, int deriv_order,
                                const EpsilonLadder& ladder) {
  std::vector<double> s;
  for (double e : ladder.values()) {
    double v = sup_norm(fam(e), K, deriv_order);
    if (!std::isfinite(v)) throw NumericalError("family blows up non-polynomially on ladder");
    s.push_back(v);
  }
  return s;
}

}  // namespace

ModerateResult classify_moderate(const EpsilonFamily& fam, const CompactRegion& K, int deriv_order,
                                 const EpsilonLadder& ladder) {
  if (deriv_order < 0 || deriv_order > 2) throw ShapeError("derivative order must be 0..2");
  return moderate_from_sups(ladder.values(), ladder_sups(fam, K, deriv_order, ladder));
}

NegligibleResult classify_negligible(const EpsilonFamily& fam, const CompactRegion& K, int max_order,
                                     const EpsilonLadder& ladder) {
  if (max_order < 0 || max_order > 8) throw ShapeError("maximum negligibility order must be 0..8");
  return negligible_from_sups(ladder.values(), ladder_sups(fam, K, 0, ladder), max_order);
}

ShadowResult shadow_pairing(const EpsilonFamily& fam, const TestFunction& test, std::span<const SurfacePatch> patches,
                            const EpsilonLadder& ladder, std::optional<double> tol) {
  if (!test) throw ShapeError("shadow pairing needs a test function");
  ShadowResult out;
  out.net.ladder = ladder;
  for (int k = 0; k < ladder.count(); ++k) {
    const double eps = ladder[k];
    KForm f = fam(eps);
    for (const auto& p : patches)
      if (f.degree() != p.dim) throw ShapeError("form degree must equal the region dimension");
    QuadratureOptions opts;
    opts.tol = tol ? *tol : default_tolerance(eps);
    auto r = integrate_form(f, patches, opts, test);
    out.net.values.push_back(r.value);
    out.net.noise.push_back(r.err_est);
  }
  Extrapolation ext;
  try {
    ext = extrapolate(out.net);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("no distributional shadow detected: ") + e.what());
  }
  out.limit = ext.limit;
  out.err_est = ext.err_est;
  out.order = ext.order;
  return out;
}

ShadowResult shadow_pairing(const EpsilonFamily& fam, const TestFunction& test, const SurfacePatch& patch,
                            const EpsilonLadder& ladder, std::optional<double> tol) {
  return shadow_pairing(fam, test, std::span<const SurfacePatch>(&patch, 1), ladder, tol);
}

ShadowResult shadow_pairing(const EpsilonFamily& fam, const TestFunction& test, const CompactRegion& region,
                            const EpsilonLadder& ladder, std::optional<double> tol) {
  SurfacePatch box = box_patch(region.lower, region.upper);
  return shadow_pairing(fam, test, box, ladder, tol);
}

}  // namespace gencon
