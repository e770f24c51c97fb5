#pragma once

// Moderateness and negligibility of eps-nets, and distributional shadows.

#include "gencon/epsilon.hpp"
#include "gencon/quadrature.hpp"

#include <functional>
#include <vector>

namespace gencon {

/// Axis-aligned box in chart coordinates with a sampling lattice.
struct CompactRegion {
  Vec lower, upper;
  int grid_per_axis = 17;

  CompactRegion() = default;
  CompactRegion(Vec lower, Vec upper, int grid_per_axis = 17);
  int dim() const { return static_cast<int>(lower.size()); }
};

inline constexpr double kModerateMaxOrder = 40.0;

struct ModerateResult {
  double order = 0.0;
  bool verdict = false;
  double slope = 0.0;
  std::vector<double> sups;
};

struct NegligibleResult {
  int negligible_up_to = 0;  ///< negative when even boundedness is not certified
  bool verdict = false;
  double slope = 0.0;
  std::vector<double> sups;
};

/// Sup over K of the largest coefficient norm and of its partial derivatives
/// up to deriv_order (<= 2). Lattice maximum refined by local compass ascent.
double sup_norm(const KForm& f, const CompactRegion& K, int deriv_order = 0);

/// Least-squares slope of log S against log eps over the smaller-eps half.
/// +inf when S vanishes on the tail; throws on non-finite samples.
double decay_slope(const std::vector<double>& eps, const std::vector<double>& sups);

ModerateResult moderate_from_sups(const std::vector<double>& eps, std::vector<double> sups);
NegligibleResult negligible_from_sups(const std::vector<double>& eps, std::vector<double> sups, int max_order);

ModerateResult classify_moderate(const EpsilonFamily& fam, const CompactRegion& K, int deriv_order,
                                 const EpsilonLadder& ladder = {});
NegligibleResult classify_negligible(const EpsilonFamily& fam, const CompactRegion& K, int max_order,
                                     const EpsilonLadder& ladder = {});

using TestFunction = std::function<double(const ChartPoint&)>;

struct ShadowResult {
  GeneralizedNumber net;
  cplx limit{};
  double err_est = 0.0;
  double order = 0.0;
};

/// Pairs each net member (a top-degree form on the patch) with `test` and
/// extrapolates the integrals to eps -> 0.
ShadowResult shadow_pairing(const EpsilonFamily& fam, const TestFunction& test, std::span<const SurfacePatch> patches,
                            const EpsilonLadder& ladder = {}, std::optional<double> tol = std::nullopt);
ShadowResult shadow_pairing(const EpsilonFamily& fam, const TestFunction& test, const SurfacePatch& patch,
                            const EpsilonLadder& ladder = {}, std::optional<double> tol = std::nullopt);
/// Region variant: the box itself is the integration domain (form degree = box dimension).
ShadowResult shadow_pairing(const EpsilonFamily& fam, const TestFunction& test, const CompactRegion& region,
                            const EpsilonLadder& ladder = {}, std::optional<double> tol = std::nullopt);

}  // namespace gencon
