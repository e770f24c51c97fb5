#pragma once

// Horizontal lifts, loop holonomy and transport in associated bundles.

#include "gencon/connection.hpp"
#include "gencon/epsilon.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gencon {

struct ParamCurve {
  std::function<ChartPoint(double)> map;
  std::function<Vec(double)> velocity;
  double a = 0.0, b = 1.0;
  /// Smooth pieces of a concatenation; transport integrates them one by one.
  std::vector<ParamCurve> pieces;

  /// Circle of radius r in the (ax, ay) plane, t in [0, 2pi], counter-clockwise.
  static ParamCurve circle(int chart_dim, const Vec& center, double radius, int ax = 0, int ay = 1);

  ParamCurve reversed() const;
  /// This curve followed by `next`, parameterized on [a, b + (next.b - next.a)].
  ParamCurve then(const ParamCurve& next) const;
  /// s in [s0, s1] -> this(phi(s)), with phi increasing onto [a, b].
  ParamCurve reparameterized(std::function<double(double)> phi, std::function<double(double)> dphi, double s0,
                             double s1) const;
  bool closed(double tol = 1e-12) const;
};

/// Largest relative mismatch between velocity and central differences of map at t.
double velocity_defect(const ParamCurve& c, double t);

struct TransportOptions {
  double step = 0.0;  ///< parameter step; 0 selects (b - a) / 4096
  bool keep_trace = false;
  /// Optional chart membership test; leaving the chart is an error.
  std::function<bool(const ChartPoint&)> in_chart;
};

struct TransportResult {
  GroupElement g_end;
  std::vector<std::pair<double, GroupElement>> trace;
  int steps = 0;
  double max_defect = 0.0;    ///< constraint defect after projection, max over steps
  double max_drift = 0.0;     ///< constraint defect before projection, max over steps
};

/// Integrates g' = -A(gamma'(t)) g with RK4 and projection onto the group.
TransportResult transport(const KForm& A, const ParamCurve& curve, const GroupElement& g0,
                          const TransportOptions& opts = {});
TransportResult transport(const GaugePotential& A, double eps, const ParamCurve& curve, const GroupElement& g0,
                          const TransportOptions& opts = {});

GroupElement holonomy(const KForm& A, const ParamCurve& loop, const TransportOptions& opts = {});
GroupElement holonomy(const GaugePotential& A, double eps, const ParamCurve& loop, const TransportOptions& opts = {});

struct HolonomyNet {
  std::vector<double> eps;
  std::vector<GroupElement> values;
  GroupElement limit;
  double err_est = 0.0;
};

/// Holonomy per ladder entry; the limit extrapolates log(g) coordinate-wise.
HolonomyNet holonomy_net(const GaugePotential& A, const ParamCurve& loop, const EpsilonLadder& ladder,
                         const TransportOptions& opts = {});

/// CSV rows `t,g00_re,g00_im,...` for a transport trace.
void write_trace_csv(const std::string& path, const std::vector<std::pair<double, GroupElement>>& trace);

enum class Representation { Defining, Trivial };

/// xi1 = rho(g1 g0^-1) xi0.
std::vector<cplx> parallel_transport_vector(Representation rep, const GroupElement& g0, const GroupElement& g1,
                                            const std::vector<cplx>& xi0);

/// Gamma[i][A][B] = (B, A) entry of A(d_i) at p (defining representation).
using ConnectionCoefficients = std::vector<std::vector<std::vector<cplx>>>;
ConnectionCoefficients connection_coefficients(const KForm& A, const ChartPoint& p);
ConnectionCoefficients connection_coefficients(const GaugePotential& A, double eps, const ChartPoint& p);

/// Section of the associated bundle with its partial derivatives partials[i][B].
struct Section {
  std::function<std::vector<cplx>(const ChartPoint&)> value;
  std::function<std::vector<std::vector<cplx>>(const ChartPoint&)> partials;
};

/// (nabla_X V)^B = X^i d_i V^B + Gamma^B_{iA} V^A X^i.
std::vector<cplx> covariant_derivative(const KForm& A, const Section& V, const std::function<Vec(const ChartPoint&)>& X,
                                       const ChartPoint& p);
std::vector<cplx> covariant_derivative(const GaugePotential& A, double eps, const Section& V,
                                       const std::function<Vec(const ChartPoint&)>& X, const ChartPoint& p);

}  // namespace gencon
