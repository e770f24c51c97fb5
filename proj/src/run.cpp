#include "gencon/run.hpp"

#include "gencon/characteristic.hpp"
#include "gencon/colombeau.hpp"
#include "gencon/connection.hpp"
#include "gencon/holonomy.hpp"
#include "gencon/quadrature.hpp"
#include "gencon/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace gencon {

using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("invalid number for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw UsageError("invalid integer for " + key + ": '" + v + "'");
  return static_cast<int>(x);
}

/// "kind:key=value,flag,..." split into kind, keyed values and bare flags.
struct Spec {
  std::string kind;
  std::map<std::string, std::string> values;
  std::vector<std::string> flags;

  double number(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : to_double(kind + "." + key, it->second);
  }
  bool has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
};

Spec parse_spec(const std::string& text) {
  Spec s;
  const auto colon = text.find(':');
  s.kind = trim(text.substr(0, colon));
  if (colon == std::string::npos) return s;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      s.flags.push_back(item);
    else
      s.values[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return s;
}

ordered_json cjson(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json ladder_json(const std::vector<double>& eps, const std::vector<cplx>& values) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < eps.size(); ++i) arr.push_back({{"epsilon", eps[i]}, {"value", cjson(values[i])}});
  return arr;
}

ordered_json matrix_json(const Mat2& m, int n) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < n; ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < n; ++c) row.push_back(cjson(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

ordered_json params_json(const RunConfig& c) {
  ordered_json p;
  p["alpha"] = c.alpha;
  p["eps0"] = c.ladder.eps0();
  p["ratio"] = c.ladder.ratio();
  p["count"] = c.ladder.count();
  p["tol"] = c.tol ? ordered_json(*c.tol) : ordered_json(nullptr);
  p["step"] = c.step;
  p["patch"] = c.patch;
  p["loop"] = c.loop;
  p["region"] = c.region;
  p["a"] = c.a;
  p["piece"] = c.piece;
  p["test"] = c.test;
  p["k"] = c.k;
  p["deriv"] = c.deriv;
  p["perturb"] = c.perturb;
  p["samples"] = c.samples;
  return p;
}

ordered_json base_report(const RunConfig& cfg) {
  ordered_json r;
  r["command"] = cfg.command;
  r["scenario"] = cfg.scenario;
  r["params"] = params_json(cfg);
  r["ladder"] = ordered_json::array();
  r["limit"] = nullptr;
  r["order"] = nullptr;
  r["err_est"] = nullptr;
  r["verdict"] = nullptr;
  r["diagnostics"] = ordered_json::object();
  return r;
}

Scenario scenario_of(const RunConfig& cfg) {
  try {
    return make_scenario(cfg.scenario, cfg.alpha, parse_regular_part(cfg.a));
  } catch (const ShapeError& e) {
    throw UsageError(e.what());
  }
}

std::vector<SurfacePatch> patches_of(const RunConfig& cfg, const Scenario& s, bool* open = nullptr) {
  if (open) *open = false;
  if (cfg.patch.empty()) return s.default_patches;
  const Spec sp = parse_spec(cfg.patch);
  if (open) *open = sp.has_flag("open");
  const int m = s.potential.dim;
  Vec center(static_cast<std::size_t>(m), 0.0);
  const char* axes[] = {"cx", "cy", "cz", "cw"};
  for (int i = 0; i < m && i < 4; ++i) center[static_cast<std::size_t>(i)] = sp.number(axes[i], 0.0);
  const double R = sp.number("R", 1.0);
  if (!(R > 0)) throw UsageError("patch radius must be positive");
  if (sp.kind == "disk") return {disk_patch(m, center, R)};
  if (sp.kind == "sphere") {
    if (m < 3) throw UsageError("sphere patch needs a chart of dimension >= 3");
    return sphere_patches(m, center, R, sp.has_flag("inward") ? SphereOrientation::Inward : SphereOrientation::Outward);
  }
  if (sp.kind == "ball") {
    if (m != 4) throw UsageError("ball patch needs a four-dimensional chart");
    return {ball4_patch(center, R)};
  }
  if (sp.kind == "box") return {box_patch(s.default_region.lower, s.default_region.upper)};
  throw UsageError("unknown patch '" + cfg.patch + "' (disk | sphere | ball | box)");
}

ParamCurve loop_of(const RunConfig& cfg, const Scenario& s) {
  if (cfg.loop.empty()) return s.default_loops.at(0);
  const Spec sp = parse_spec(cfg.loop);
  if (sp.kind != "circle") throw UsageError("unknown loop '" + cfg.loop + "' (circle)");
  const int m = s.potential.dim;
  Vec center(static_cast<std::size_t>(m), 0.0);
  const char* axes[] = {"cx", "cy", "cz", "cw"};
  for (int i = 0; i < m && i < 4; ++i) center[static_cast<std::size_t>(i)] = sp.number(axes[i], 0.0);
  const double R = sp.number("R", 1.0);
  if (!(R > 0)) throw UsageError("loop radius must be positive");
  return ParamCurve::circle(m, center, R);
}

CompactRegion region_of(const RunConfig& cfg, const Scenario& s) {
  if (cfg.region.empty() || cfg.region == "box") return s.default_region;
  const Spec sp = parse_spec(cfg.region);
  if (sp.kind != "box") throw UsageError("unknown region '" + cfg.region + "' (box)");
  const int m = s.potential.dim;
  const double lo = sp.number("lo", -1.0), hi = sp.number("hi", 1.0);
  const double grid = sp.number("grid", 17);
  try {
    return CompactRegion(Vec(static_cast<std::size_t>(m), lo), Vec(static_cast<std::size_t>(m), hi), static_cast<int>(grid));
  } catch (const ShapeError& e) {
    throw UsageError(e.what());
  }
}

/// The (0,0) entry of a form as a complex scalar form (the diagonal part for su(2)).
KForm scalar_component(const KForm& f) {
  if (f.tag().n == 1) return f;
  auto take = [](const KForm::Coefficients& c) {
    KForm::Coefficients out;
    out.reserve(c.size());
    for (const auto& v : c) out.push_back(LieValue::scalar(v(0, 0)));
    return out;
  };
  KForm::DCoeffFn dc;
  if (f.has_analytic_derivative())
    dc = [f, take](const ChartPoint& p) {
      auto d = f.derivatives(p);
      std::vector<KForm::Coefficients> out;
      for (const auto& di : d) out.push_back(take(di));
      return out;
    };
  return KForm(f.degree(), f.dim(), AlgebraTag::scalar(), [f, take](const ChartPoint& p) { return take(f.coefficients(p)); },
               dc);
}

EpsilonFamily piece_family(const RunConfig& cfg, const Scenario& s) {
  std::vector<EpsilonFamily> chosen;
  if (cfg.piece.empty() || cfg.piece == "total") {
    for (const auto& p : s.pieces) chosen.push_back(p.family);
  } else {
    for (const auto& p : s.pieces)
      if (p.name == cfg.piece) chosen.push_back(p.family);
    if (chosen.empty()) {
      std::string names;
      for (const auto& p : s.pieces) names += " " + p.name;
      throw UsageError("unknown piece '" + cfg.piece + "' for " + s.name + " (total" + names + ")");
    }
  }
  return {[chosen](double eps) {
            std::vector<KForm> forms;
            for (const auto& f : chosen) forms.push_back(scalar_component(f(eps)));
            if (forms.size() == 1) return forms[0];
            const KForm& f0 = forms[0];
            KForm::DCoeffFn dc;
            const bool analytic =
                std::all_of(forms.begin(), forms.end(), [](const KForm& f) { return f.has_analytic_derivative(); });
            if (analytic)
              dc = [forms](const ChartPoint& p) {
                auto d = forms[0].derivatives(p);
                for (std::size_t j = 1; j < forms.size(); ++j) {
                  const auto dj = forms[j].derivatives(p);
                  for (std::size_t i = 0; i < d.size(); ++i)
                    for (std::size_t q = 0; q < d[i].size(); ++q) d[i][q] += dj[i][q];
                }
                return d;
              };
            return KForm(f0.degree(), f0.dim(), f0.tag(),
                         [forms](const ChartPoint& p) {
                           auto c = forms[0].coefficients(p);
                           for (std::size_t j = 1; j < forms.size(); ++j) {
                             const auto cj = forms[j].coefficients(p);
                             for (std::size_t q = 0; q < c.size(); ++q) c[q] += cj[q];
                           }
                           return c;
                         },
                         dc);
          },
          s.name + " " + (cfg.piece.empty() ? "total" : cfg.piece)};
}

TestFunction test_of(const RunConfig& cfg) {
  const Spec sp = parse_spec(cfg.test);
  if (sp.kind == "one") return [](const ChartPoint&) { return 1.0; };
  if (sp.kind == "gaussian") {
    const double s = sp.number("s", 1.0);
    if (!(s > 0)) throw UsageError("gaussian width must be positive");
    return [s](const ChartPoint& p) {
      double r2 = 0.0;
      for (double x : p) r2 += x * x;
      return std::exp(-r2 / (s * s));
    };
  }
  throw UsageError("unknown test function '" + cfg.test + "' (one | gaussian[:s=..])");
}

std::vector<std::string> patch_labels(const std::vector<SurfacePatch>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.label);
  return out;
}

void write_csv_if(const RunConfig& cfg, const std::vector<double>& eps, const std::vector<cplx>& values) {
  if (!cfg.csv.empty()) write_ladder_csv(cfg.csv, eps, values);
}

void fill_extrapolation(ordered_json& r, const Extrapolation& e) {
  r["limit"] = cjson(e.limit);
  r["order"] = e.order;
  r["err_est"] = e.err_est;
  r["diagnostics"]["constant_tail"] = e.constant;
  r["diagnostics"]["residual_rms"] = e.residual_rms;
}

ordered_json run_flux(const RunConfig& cfg, bool shadow) {
  const Scenario s = scenario_of(cfg);
  const auto patches = patches_of(cfg, s);
  const EpsilonFamily fam = piece_family(cfg, s);
  ordered_json r = base_report(cfg);
  GeneralizedNumber net;
  Extrapolation ext;
  if (shadow) {
    const auto res = shadow_pairing(fam, test_of(cfg), patches, cfg.ladder, cfg.tol);
    net = res.net;
    ext.limit = res.limit;
    ext.order = res.order;
    ext.err_est = res.err_est;
    r["limit"] = cjson(res.limit);
    r["order"] = res.order;
    r["err_est"] = res.err_est;
    r["diagnostics"]["test"] = cfg.test;
  } else {
    const auto res = flux_limit(fam, patches, cfg.ladder, cfg.tol);
    net = res.net;
    fill_extrapolation(r, res.ext);
  }
  const auto eps = net.ladder.values();
  r["ladder"] = ladder_json(eps, net.values);
  r["diagnostics"]["patches"] = patch_labels(patches);
  r["diagnostics"]["piece"] = cfg.piece.empty() ? "total" : cfg.piece;
  r["diagnostics"]["component"] = s.potential.tag.n == 1 ? "scalar" : "diag";
  r["diagnostics"]["quadrature_noise"] = net.noise;
  write_csv_if(cfg, eps, net.values);
  return r;
}

ordered_json run_holonomy(const RunConfig& cfg) {
  const Scenario s = scenario_of(cfg);
  const ParamCurve loop = loop_of(cfg, s);
  TransportOptions opts;
  opts.step = cfg.step;
  if (cfg.step < 0) throw UsageError("step must be positive");
  const HolonomyNet net = holonomy_net(s.potential, loop, cfg.ladder, opts);
  ordered_json r = base_report(cfg);
  std::vector<cplx> vals;
  for (const auto& g : net.values) vals.push_back(g(0, 0));
  r["ladder"] = ladder_json(net.eps, vals);
  r["limit"] = cjson(net.limit(0, 0));
  r["err_est"] = net.err_est;
  const int n = s.potential.tag.n;
  r["diagnostics"]["g_end"] = matrix_json(net.limit.matrix(), n);
  r["diagnostics"]["algebra"] = s.potential.tag.name();
  r["diagnostics"]["steps"] = cfg.step > 0 ? static_cast<int>(std::ceil((loop.b - loop.a) / cfg.step - 1e-9)) : 4096;
  if (!cfg.trace.empty()) {
    TransportOptions t = opts;
    t.keep_trace = true;
    const auto res = transport(s.potential, net.eps.back(), loop, GroupElement::identity(s.potential.tag), t);
    write_trace_csv(cfg.trace, res.trace);
    r["diagnostics"]["trace_epsilon"] = net.eps.back();
  }
  write_csv_if(cfg, net.eps, vals);
  return r;
}

ordered_json run_classify(const RunConfig& cfg) {
  const Scenario s = scenario_of(cfg);
  const CompactRegion K = region_of(cfg, s);
  if (cfg.deriv < 0 || cfg.deriv > 2) throw UsageError("deriv must be 0, 1 or 2");
  const ModerateResult m = classify_moderate(s.potential.family, K, cfg.deriv, cfg.ladder);
  ordered_json r = base_report(cfg);
  const auto eps = cfg.ladder.values();
  std::vector<cplx> vals(m.sups.begin(), m.sups.end());
  r["ladder"] = ladder_json(eps, vals);
  r["order"] = m.order;
  r["verdict"] = m.verdict;
  r["diagnostics"]["slope"] = m.slope;
  r["diagnostics"]["classification"] = "moderate";
  r["diagnostics"]["max_order"] = kModerateMaxOrder;
  write_csv_if(cfg, eps, vals);
  return r;
}

ordered_json run_chern(const RunConfig& cfg) {
  const Scenario s = scenario_of(cfg);
  bool open = false;
  const auto patches = patches_of(cfg, s, &open);
  const int dim = patches.at(0).dim;
  if (cfg.k < 1 || cfg.k > 2) throw UsageError("k must be 1 or 2");
  if (dim != 2 * cfg.k) throw UsageError("c_" + std::to_string(cfg.k) + " needs a patch of dimension " + std::to_string(2 * cfg.k));
  ChernOptions opts;
  opts.require_closed = !open;
  opts.tol = cfg.tol;
  const ChernNumberResult res = chern_number(s.potential, patches, cfg.ladder, opts);
  ordered_json r = base_report(cfg);
  const auto eps = res.net.ladder.values();
  r["ladder"] = ladder_json(eps, res.net.values);
  fill_extrapolation(r, res.ext);
  r["diagnostics"]["patches"] = patch_labels(patches);
  r["diagnostics"]["closed"] = !open;
  write_csv_if(cfg, eps, res.net.values);
  return r;
}

std::vector<Vec> random_points(const CompactRegion& K, int count, std::mt19937_64& gen) {
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Vec p(K.lower.size());
    for (std::size_t d = 0; d < p.size(); ++d) p[d] = std::uniform_real_distribution<double>(K.lower[d], K.upper[d])(gen);
    pts.push_back(p);
  }
  return pts;
}

Vec random_vec(int m, std::mt19937_64& gen) {
  Vec v(static_cast<std::size_t>(m));
  for (auto& x : v) x = std::uniform_real_distribution<double>(-1.0, 1.0)(gen);
  return v;
}

ordered_json run_decompose(const RunConfig& cfg) {
  const Scenario s = scenario_of(cfg);
  const CompactRegion K = region_of(cfg, s);
  const int m = s.potential.dim;
  std::mt19937_64 gen(20240611);
  const auto pts = random_points(K, cfg.samples, gen);
  std::vector<Vec> us, vs;
  for (int i = 0; i < cfg.samples; ++i) {
    us.push_back(random_vec(m, gen));
    vs.push_back(random_vec(m, gen));
  }
  const auto eps = cfg.ladder.values();
  std::vector<cplx> vals;
  double worst = 0.0, worst_bracket = 0.0;
  for (double e : eps) {
    const KForm A = s.potential.at(e);
    std::vector<KForm> pieces;
    for (const auto& p : s.pieces) pieces.push_back(p.family(e));
    double res = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const LieValue F = curvature(A, pts[i], us[i], vs[i]);
      LieValue sum = LieValue::zero(s.potential.tag);
      for (const auto& p : pieces) sum += evaluate(p, pts[i], std::vector<Vec>{us[i], vs[i]});
      res = std::max(res, (F - sum).norm() / std::max(1.0, F.norm()));
      if (s.potential.tag == AlgebraTag::su2()) {
        const auto b = bracket_split_identities(A, A, pts[i], us[i], vs[i]);
        worst_bracket = std::max({worst_bracket, std::abs(b.d_lhs - b.d_rhs), std::abs(b.t_lhs - b.t_rhs)});
      }
    }
    vals.emplace_back(res, 0.0);
    worst = std::max(worst, res);
  }
  ordered_json r = base_report(cfg);
  r["ladder"] = ladder_json(eps, vals);
  r["err_est"] = worst;
  r["verdict"] = worst <= 1e-8;
  std::vector<std::string> names;
  for (const auto& p : s.pieces) names.push_back(p.name);
  r["diagnostics"]["pieces"] = names;
  r["diagnostics"]["metric"] = "max |F - sum(pieces)| / max(1, |F|)";
  r["diagnostics"]["tolerance"] = 1e-8;
  if (s.potential.tag == AlgebraTag::su2()) r["diagnostics"]["bracket_split_max"] = worst_bracket;
  write_csv_if(cfg, eps, vals);
  return r;
}

/// Reconstructed connection plus eps^p times a defect that violates equivariance.
BundleFamily perturbed_family(const Scenario& s, int p) {
  const GaugePotential A = s.potential;
  return {[A, p](double eps) {
            BundleForm w = reconstruct_bundle_form(A, eps);
            if (p <= 0) return w;
            const double c = std::pow(eps, p);
            const LieValue dir = basis(A.tag)[0];
            auto base = w.eval;
            w.eval = [base, c, dir](const ChartPoint& x, const GroupElement& g, const BundleTangent& t) {
              return base(x, g, t) + dir * (c * t.base[0] * g(0, 0).real());
            };
            return w;
          },
          s.name + " reconstructed"};
}

std::vector<AxiomSample> axiom_samples(const Scenario& s, const CompactRegion& K, int count) {
  std::mt19937_64 gen(20240611);
  const auto pts = random_points(K, count, gen);
  const auto lattice = group_lattice(s.potential.tag);
  const int nb = s.potential.tag.real_dim();
  std::vector<AxiomSample> out;
  for (int i = 0; i < count; ++i) {
    const auto& g = lattice[static_cast<std::size_t>(i * 7 + 3) % lattice.size()];
    out.push_back({pts[static_cast<std::size_t>(i)], g,
                   {random_vec(s.potential.dim, gen), from_coordinates(s.potential.tag, random_vec(nb, gen))}});
  }
  return out;
}

ordered_json run_axioms(const RunConfig& cfg) {
  const Scenario s = scenario_of(cfg);
  const auto samples = axiom_samples(s, region_of(cfg, s), std::min(cfg.samples, 32));
  const auto lattice = group_lattice(s.potential.tag);
  const AxiomResiduals res = check_axioms(perturbed_family(s, cfg.perturb), cfg.ladder, samples, lattice);
  const NegligibleResult n = negligible_from_sups(res.eps, res.res_ii, 8);
  const double worst_i = *std::max_element(res.res_i.begin(), res.res_i.end());
  ordered_json r = base_report(cfg);
  std::vector<cplx> vals(res.res_ii.begin(), res.res_ii.end());
  r["ladder"] = ladder_json(res.eps, vals);
  r["order"] = n.negligible_up_to;
  r["err_est"] = worst_i;
  r["verdict"] = worst_i <= 1e-12 && n.negligible_up_to >= 1;
  r["diagnostics"]["res_i"] = res.res_i;
  r["diagnostics"]["res_ii_slope"] = n.slope;
  r["diagnostics"]["group_lattice"] = lattice.size();
  write_csv_if(cfg, res.eps, vals);
  return r;
}

ordered_json run_canonicalize(const RunConfig& cfg) {
  const Scenario s = scenario_of(cfg);
  const CompactRegion K = region_of(cfg, s);
  const auto samples = axiom_samples(s, K, std::min(cfg.samples, 32));
  const auto lattice = group_lattice(s.potential.tag);
  const BundleFamily fam = perturbed_family(s, cfg.perturb);
  const auto eps = cfg.ladder.values();
  std::vector<cplx> dist;
  double worst_axiom = 0.0;
  for (double e : eps) {
    const BundleForm w = fam(e);
    const BundleForm c = canonicalize(w);
    dist.emplace_back(bundle_distance(w, c, samples), 0.0);
    worst_axiom = std::max({worst_axiom, vertical_residual(c, samples), equivariance_residual(c, samples, lattice)});
  }
  std::vector<ChartPoint> base;
  for (const auto& sm : samples) base.push_back(sm.x);
  const auto threshold = canonicalization_threshold(fam, cfg.ladder, base);
  std::vector<double> d;
  for (cplx z : dist) d.push_back(z.real());
  const NegligibleResult n = negligible_from_sups(eps, d, 8);
  ordered_json r = base_report(cfg);
  r["ladder"] = ladder_json(eps, dist);
  r["order"] = n.slope;
  r["err_est"] = worst_axiom;
  r["verdict"] = worst_axiom <= 1e-12;
  r["diagnostics"]["negligible_up_to"] = n.negligible_up_to;
  r["diagnostics"]["largest_valid_epsilon"] = threshold ? ordered_json(*threshold) : ordered_json(nullptr);
  write_csv_if(cfg, eps, dist);
  return r;
}

ordered_json run_list(const RunConfig& cfg) {
  ordered_json r = base_report(cfg);
  ordered_json list = ordered_json::array();
  for (const auto& name : scenario_names()) {
    const Scenario s = make_scenario(name, cfg.alpha);
    std::vector<std::string> pieces;
    for (const auto& p : s.pieces) pieces.push_back(p.name);
    list.push_back({{"name", name},
                    {"description", s.description},
                    {"algebra", s.potential.tag.name()},
                    {"chart_dim", s.potential.dim},
                    {"pieces", pieces}});
  }
  r["diagnostics"]["scenarios"] = list;
  return r;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"command", "scenario", "alpha", "eps0",   "ratio", "count",   "tol",
                                             "step",    "out",      "trace", "csv",    "patch", "loop",    "region",
                                             "a",       "piece",    "test",  "k",      "deriv", "perturb", "samples"};
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto ladder = [&](double eps0, double ratio, int count) {
    try {
      cfg.ladder = EpsilonLadder(eps0, ratio, count);
    } catch (const ShapeError& e) {
      throw UsageError(e.what());
    }
  };
  if (key == "command") {
    if (std::find(kCommands.begin(), kCommands.end(), v) == kCommands.end())
      throw UsageError("unknown command '" + v + "'");
    cfg.command = v;
  } else if (key == "scenario") {
    cfg.scenario = v;
  } else if (key == "alpha") {
    cfg.alpha = to_double(key, v);
  } else if (key == "eps0") {
    ladder(to_double(key, v), cfg.ladder.ratio(), cfg.ladder.count());
  } else if (key == "ratio") {
    ladder(cfg.ladder.eps0(), to_double(key, v), cfg.ladder.count());
  } else if (key == "count") {
    ladder(cfg.ladder.eps0(), cfg.ladder.ratio(), to_int(key, v));
  } else if (key == "tol") {
    if (v.empty() || v == "auto") {
      cfg.tol.reset();
    } else {
      const double t = to_double(key, v);
      if (!(t > 0)) throw UsageError("tol must be positive");
      cfg.tol = t;
    }
  } else if (key == "step") {
    cfg.step = to_double(key, v);
    if (cfg.step < 0) throw UsageError("step must be positive (0 selects the default)");
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "trace") {
    cfg.trace = v;
  } else if (key == "csv") {
    cfg.csv = v;
  } else if (key == "patch") {
    cfg.patch = v;
  } else if (key == "loop") {
    cfg.loop = v;
  } else if (key == "region") {
    cfg.region = v;
  } else if (key == "a") {
    try {
      parse_regular_part(v);
    } catch (const ShapeError& e) {
      throw UsageError(e.what());
    }
    cfg.a = v;
  } else if (key == "piece") {
    cfg.piece = v;
  } else if (key == "test") {
    cfg.test = v;
  } else if (key == "k") {
    cfg.k = to_int(key, v);
  } else if (key == "deriv") {
    cfg.deriv = to_int(key, v);
  } else if (key == "perturb") {
    cfg.perturb = to_int(key, v);
  } else if (key == "samples") {
    cfg.samples = to_int(key, v);
    if (cfg.samples < 1) throw UsageError("samples must be positive");
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text, RunConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  // Ladder keys are applied together so their order in the file does not matter.
  std::optional<std::string> eps0, ratio, count;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "eps0")
      eps0 = value;
    else if (key == "ratio")
      ratio = value;
    else if (key == "count")
      count = value;
    else
      apply_setting(cfg, key, value);
  }
  if (eps0 || ratio || count) {
    const double e = eps0 ? to_double("eps0", *eps0) : cfg.ladder.eps0();
    const double r = ratio ? to_double("ratio", *ratio) : cfg.ladder.ratio();
    const int c = count ? to_int("count", *count) : cfg.ladder.count();
    try {
      cfg.ladder = EpsilonLadder(e, r, c);
    } catch (const ShapeError& err) {
      throw UsageError(err.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "command = " << c.command << "\n";
  os << "scenario = " << c.scenario << "\n";
  os << "alpha = " << fmt(c.alpha) << "\n";
  os << "eps0 = " << fmt(c.ladder.eps0()) << "\n";
  os << "ratio = " << fmt(c.ladder.ratio()) << "\n";
  os << "count = " << c.ladder.count() << "\n";
  os << "tol = " << (c.tol ? fmt(*c.tol) : std::string("auto")) << "\n";
  os << "step = " << fmt(c.step) << "\n";
  os << "out = " << c.out << "\n";
  os << "trace = " << c.trace << "\n";
  os << "csv = " << c.csv << "\n";
  os << "patch = " << c.patch << "\n";
  os << "loop = " << c.loop << "\n";
  os << "region = " << c.region << "\n";
  os << "a = " << c.a << "\n";
  os << "piece = " << c.piece << "\n";
  os << "test = " << c.test << "\n";
  os << "k = " << c.k << "\n";
  os << "deriv = " << c.deriv << "\n";
  os << "perturb = " << c.perturb << "\n";
  os << "samples = " << c.samples << "\n";
  return os.str();
}

std::vector<std::string> config_warnings(const RunConfig& cfg) {
  std::vector<std::string> w;
  if (cfg.scenario == "su2_singular" && std::abs(2 * cfg.alpha - std::round(2 * cfg.alpha)) <= 1e-9)
    w.push_back("2*alpha is an integer: the limit holonomy is central and the singularity is removable");
  return w;
}

ordered_json run(const RunConfig& cfg) {
  ordered_json r;
  if (cfg.command == "flux")
    r = run_flux(cfg, false);
  else if (cfg.command == "shadow")
    r = run_flux(cfg, true);
  else if (cfg.command == "holonomy")
    r = run_holonomy(cfg);
  else if (cfg.command == "classify")
    r = run_classify(cfg);
  else if (cfg.command == "chern")
    r = run_chern(cfg);
  else if (cfg.command == "decompose")
    r = run_decompose(cfg);
  else if (cfg.command == "axioms")
    r = run_axioms(cfg);
  else if (cfg.command == "canonicalize")
    r = run_canonicalize(cfg);
  else if (cfg.command == "list-scenarios")
    r = run_list(cfg);
  else
    throw UsageError("unknown command '" + cfg.command + "'");
  const auto warnings = config_warnings(cfg);
  if (!warnings.empty()) r["diagnostics"]["warnings"] = warnings;
  return r;
}

ordered_json error_report(const RunConfig& cfg, const std::string& kind, const std::string& message) {
  ordered_json r = base_report(cfg);
  r["diagnostics"]["error"] = kind;
  r["diagnostics"]["message"] = message;
  return r;
}

std::string dump_report(const ordered_json& report) { return report.dump(2) + "\n"; }

}  // namespace gencon
