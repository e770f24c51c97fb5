#pragma once

// Gauge potentials, curvature, gauge transformations and connection forms on
// trivial bundles U x G with left-trivialized tangents (v, B).

#include "gencon/epsilon.hpp"
#include "gencon/forms.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gencon {

/// eps-net of g-valued 1-forms on a base chart.
struct GaugePotential {
  EpsilonFamily family;
  AlgebraTag tag;
  int dim = 0;

  /// Family member at eps; checks degree, dimension and tag.
  KForm at(double eps) const;
};

/// F(u, v) = dA(u, v) + [A(u), A(v)].
LieValue curvature(const KForm& A, const ChartPoint& p, const Vec& u, const Vec& v);
LieValue curvature(const GaugePotential& A, double eps, const ChartPoint& p, const Vec& u, const Vec& v);

/// Curvature as a 2-form. With an AD expansion of depth >= 2 whose basis closes
/// under the bracket, the result keeps exact derivatives.
KForm curvature_form(const KForm& A);

/// dF + [A ^ F] evaluated on three vectors.
LieValue bianchi_residual(const KForm& A, const ChartPoint& p, const Vec& u, const Vec& v, const Vec& w);

/// Smooth map into the group together with its partial derivatives d_i g.
struct GaugeMap {
  std::function<GroupElement(const ChartPoint&)> value;
  std::function<std::vector<Mat2>(const ChartPoint&)> differential;
};

/// A~ = ad(g^-1) A + g^-1 dg.
KForm gauge_transform(const KForm& A, const GaugeMap& g);
GaugePotential gauge_transform(const GaugePotential& A, const GaugeMap& g);

struct Su2Split {
  KForm diag;   ///< a_D, the (0,0) entry (imaginary valued)
  KForm trans;  ///< a_T, the (0,1) entry
};

/// a = [[a_D, a_T], [-conj(a_T), -a_D]].
Su2Split su2_split(const KForm& a);
KForm su2_join(const KForm& diag, const KForm& trans);

struct BracketSplit {
  cplx d_lhs, d_rhs;  ///< diagonal part of [a, b](u, v) and -2i Im(a_T ^ conj b_T)(u, v)
  cplx t_lhs, t_rhs;  ///< off-diagonal part and 2(a_D ^ b_T - a_T ^ b_D)(u, v)
};

/// Both sides of the diagonal/transverse identities for the graded bracket
/// [a, b](u, v) = [a(u), b(v)] - [a(v), b(u)].
BracketSplit bracket_split_identities(const KForm& a, const KForm& b, const ChartPoint& p, const Vec& u, const Vec& v);

// ----------------------------------------------------------------- bundles

/// Tangent (v, B) at (x, g): d/dt (x + t v, g exp(t B)).
struct BundleTangent {
  Vec base;
  LieValue fiber;
};

struct BundleForm {
  AlgebraTag tag;
  int base_dim = 0;
  std::function<LieValue(const ChartPoint&, const GroupElement&, const BundleTangent&)> eval;

  LieValue operator()(const ChartPoint& x, const GroupElement& g, const BundleTangent& t) const { return eval(x, g, t); }
};

struct BundleFamily {
  std::function<BundleForm(double)> make;
  std::string meta;

  BundleForm operator()(double eps) const { return make(eps); }
};

/// omega_(x,g)(v, B) = ad(g^-1) A_x(v) + B.
BundleForm reconstruct_bundle_form(const KForm& A);
BundleForm reconstruct_bundle_form(const GaugePotential& A, double eps);
BundleFamily reconstruct_bundle_family(const GaugePotential& A);

struct AxiomSample {
  ChartPoint x;
  GroupElement g;
  BundleTangent t;
};

struct AxiomResiduals {
  std::vector<double> eps;
  std::vector<double> res_i;   ///< sup |omega(0, B) - B|
  std::vector<double> res_ii;  ///< sup |omega_(x,gh)(v, ad(h^-1)B) - ad(h^-1) omega_(x,g)(v, B)|
};

double vertical_residual(const BundleForm& w, std::span<const AxiomSample> samples);
double equivariance_residual(const BundleForm& w, std::span<const AxiomSample> samples,
                             std::span<const GroupElement> lattice);
AxiomResiduals check_axioms(const BundleFamily& fam, const EpsilonLadder& ladder, std::span<const AxiomSample> samples,
                            std::span<const GroupElement> lattice);

/// Classical connection sharing the horizontal spaces of w along the identity
/// section, extended by equivariance. When `validate_at` is given, the fiber
/// block is checked there eagerly; otherwise degeneracy is reported on use.
BundleForm canonicalize(const BundleForm& w, std::span<const ChartPoint> validate_at = {});

/// Largest ladder eps at which canonicalize succeeds at every base sample.
std::optional<double> canonicalization_threshold(const BundleFamily& fam, const EpsilonLadder& ladder,
                                                 std::span<const ChartPoint> base_samples);

/// sup over samples of |a - b| on the sample tangents.
double bundle_distance(const BundleForm& a, const BundleForm& b, std::span<const AxiomSample> samples);

/// d omega(X, Y) + [omega(X), omega(Y)] with X, Y extended as left-invariant fields.
LieValue bundle_curvature(const BundleForm& w, const ChartPoint& x, const GroupElement& g, const BundleTangent& X,
                          const BundleTangent& Y);

/// Real coordinates of a value in an arbitrary list of values (least squares);
/// nullopt when the value is not in their real span.
std::optional<std::vector<double>> coordinates_in(std::span<const LieValue> basis, const LieValue& v);

}  // namespace gencon
