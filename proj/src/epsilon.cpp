#include "gencon/epsilon.hpp"

#include "gencon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace gencon {

EpsilonLadder::EpsilonLadder(double eps0, double ratio, int count) : eps0_(eps0), ratio_(ratio), count_(count) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw ShapeError("ladder eps0 must be positive");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ShapeError("ladder ratio must lie in (0,1)");
  if (count < 8) throw ShapeError("ladder needs at least 8 samples");
  if (!(eps0 * std::pow(ratio, count - 1) > 0.0)) throw ShapeError("ladder underflows");
}

double EpsilonLadder::operator[](int k) const {
  if (k < 0 || k >= count_) throw ShapeError("ladder index out of range");
  return eps0_ * std::pow(ratio_, k);
}

std::vector<double> EpsilonLadder::values() const {
  std::vector<double> v(static_cast<std::size_t>(count_));
  for (int k = 0; k < count_; ++k) v[k] = (*this)[k];
  return v;
}

namespace {

constexpr double kPMin = 0.05;
constexpr double kPMax = 12.0;

struct Fit {
  cplx limit{};
  cplx coeff{};
  double rss = 0.0;
};

// Linear least squares for (L, c) in v ~ L + c (eps/eps_ref)^p, values centred on `shift`.
Fit fit_fixed_p(const std::vector<double>& eps, const std::vector<cplx>& v, cplx shift, double p) {
  const double ref = eps.front();
  const std::size_t n = eps.size();
  std::vector<double> x(n);
  double s1 = 0, s2 = 0;
  cplx tv{}, txv{};
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = std::pow(eps[k] / ref, p);
    s1 += x[k];
    s2 += x[k] * x[k];
    tv += v[k] - shift;
    txv += x[k] * (v[k] - shift);
  }
  const double s0 = static_cast<double>(n);
  const double det = s0 * s2 - s1 * s1;
  Fit f;
  if (!(det > 0.0)) {
    f.limit = shift + tv / s0;
    f.rss = std::numeric_limits<double>::infinity();
    return f;
  }
  cplx l = (s2 * tv - s1 * txv) / det;
  f.coeff = (s0 * txv - s1 * tv) / det;
  for (std::size_t k = 0; k < n; ++k) f.rss += std::norm(v[k] - shift - l - f.coeff * x[k]);
  f.limit = l + shift;
  return f;
}

struct PowerFit {
  Fit fit;
  double p = 0.0;
};

PowerFit fit_power(const std::vector<double>& eps, const std::vector<cplx>& v) {
  const cplx shift = v.back();
  constexpr int kGrid = 400;
  std::vector<double> grid(kGrid), rss(kGrid);
  int best = 0;
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = kPMin * std::pow(kPMax / kPMin, static_cast<double>(i) / (kGrid - 1));
    rss[i] = fit_fixed_p(eps, v, shift, grid[i]).rss;
    if (rss[i] < rss[best]) best = i;
  }
  double a = grid[std::max(0, best - 1)];
  double b = grid[std::min(kGrid - 1, best + 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fit_fixed_p(eps, v, shift, c).rss, fd = fit_fixed_p(eps, v, shift, d).rss;
  for (int it = 0; it < 80 && (b - a) > 1e-12 * b; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = fit_fixed_p(eps, v, shift, c).rss;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = fit_fixed_p(eps, v, shift, d).rss;
    }
  }
  PowerFit out;
  out.p = 0.5 * (a + b);
  out.fit = fit_fixed_p(eps, v, shift, out.p);
  if (rss[best] < out.fit.rss) {
    out.p = grid[best];
    out.fit = fit_fixed_p(eps, v, shift, out.p);
  }
  return out;
}

std::string residual_report(const std::vector<double>& eps, const std::vector<cplx>& v, const PowerFit& pf) {
  std::ostringstream os;
  os << "p=" << pf.p << ", residuals=[";
  const double ref = eps.front();
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (k) os << ", ";
    os << std::abs(v[k] - pf.fit.limit - pf.fit.coeff * std::pow(eps[k] / ref, pf.p));
  }
  os << "]";
  return os.str();
}

}  // namespace

Extrapolation extrapolate(const std::vector<double>& eps, const std::vector<cplx>& values,
                          const std::vector<double>& noise) {
  const std::size_t n = eps.size();
  if (values.size() != n) throw ShapeError("ladder and values differ in length");
  if (!noise.empty() && noise.size() != n) throw ShapeError("noise vector has wrong length");
  if (n < 6) throw ShapeError("extrapolation needs at least 6 ladder points");
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(values[k].real()) || !std::isfinite(values[k].imag()))
      throw NumericalError("extrapolation: non-finite sample at eps=" + std::to_string(eps[k]));
    if (k > 0 && !(eps[k] < eps[k - 1])) throw ShapeError("ladder must be strictly decreasing");
  }

  const std::size_t w = std::max<std::size_t>(6, n / 2);
  const std::size_t start = n - w;
  std::vector<double> we(eps.begin() + static_cast<std::ptrdiff_t>(start), eps.end());
  std::vector<cplx> wv(values.begin() + static_cast<std::ptrdiff_t>(start), values.end());

  double scale = 0.0, spread = 0.0, noise_max = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    scale = std::max(scale, std::abs(wv[i]));
    for (std::size_t j = i + 1; j < w; ++j) spread = std::max(spread, std::abs(wv[i] - wv[j]));
    if (!noise.empty()) noise_max = std::max(noise_max, noise[start + i]);
  }
  const double floor = std::max(64.0 * std::numeric_limits<double>::epsilon() * scale, 2.0 * noise_max);

  Extrapolation out;
  if (spread <= floor) {
    out.constant = true;
    out.limit = wv.back();
    out.order = 0.0;
    out.err_est = std::max(spread, noise_max);
    return out;
  }

  PowerFit pf = fit_power(we, wv);
  const double rms = std::sqrt(pf.fit.rss / static_cast<double>(w));
  const bool at_lower = pf.p <= kPMin * (1.0 + 1e-6);
  if (!std::isfinite(pf.fit.limit.real()) || !std::isfinite(pf.fit.limit.imag()) || at_lower ||
      rms > std::max(0.1 * spread, 4.0 * noise_max)) {
    throw NumericalError("extrapolation did not converge: " + residual_report(we, wv, pf));
  }

  // Same fit on the window shifted one sample toward larger eps.
  double shift_diff = 0.0;
  {
    std::size_t s2 = start > 0 ? start - 1 : start;
    std::size_t e2 = start > 0 ? n - 1 : n - 1;
    std::vector<double> se(eps.begin() + static_cast<std::ptrdiff_t>(s2), eps.begin() + static_cast<std::ptrdiff_t>(e2));
    std::vector<cplx> sv(values.begin() + static_cast<std::ptrdiff_t>(s2), values.begin() + static_cast<std::ptrdiff_t>(e2));
    if (se.size() >= 4) {
      PowerFit ps = fit_power(se, sv);
      shift_diff = std::abs(ps.fit.limit - pf.fit.limit);
    }
  }

  out.limit = pf.fit.limit;
  out.order = pf.p;
  out.residual_rms = rms;
  out.err_est = std::max({shift_diff, rms, noise_max});
  return out;
}

Extrapolation extrapolate(const GeneralizedNumber& gn) {
  if (static_cast<int>(gn.values.size()) != gn.ladder.count()) throw ShapeError("net length does not match ladder");
  return extrapolate(gn.ladder.values(), gn.values, gn.noise);
}

void write_ladder_csv(std::ostream& os, const std::vector<double>& eps, const std::vector<cplx>& values) {
  if (eps.size() != values.size()) throw ShapeError("ladder and values differ in length");
  os << "epsilon,value_re,value_im\n";
  char buf[128];
  for (std::size_t k = 0; k < eps.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", eps[k], values[k].real(), values[k].imag());
    os << buf;
  }
}

void write_ladder_csv(const std::string& path, const std::vector<double>& eps, const std::vector<cplx>& values) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_ladder_csv(f, eps, values);
}

void read_ladder_csv(const std::string& path, std::vector<double>& eps, std::vector<cplx>& values) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::string line;
  std::getline(f, line);
  if (line != "epsilon,value_re,value_im") throw Error("unexpected CSV header in " + path);
  eps.clear();
  values.clear();
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double e = 0, re = 0, im = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &e, &re, &im) != 3) throw Error("malformed CSV row: " + line);
    eps.push_back(e);
    values.emplace_back(re, im);
  }
}

}  // namespace gencon
