#pragma once

// Closed-form singular gauge fields with eps-regularization.

#include "gencon/colombeau.hpp"
#include "gencon/connection.hpp"
#include "gencon/holonomy.hpp"

#include <string>
#include <vector>

namespace gencon {

/// Named analytic curvature piece; the pieces of a scenario sum to its curvature.
struct CurvaturePiece {
  std::string name;
  EpsilonFamily family;
};

struct Scenario {
  std::string name;
  std::string description;
  double alpha = 0.0;
  GaugePotential potential;
  std::vector<CurvaturePiece> pieces;
  CompactRegion default_region;
  std::vector<SurfacePatch> default_patches;
  std::vector<ParamCurve> default_loops;
};

/// U(1) on R^4: A = i alpha (x dy - y dx) / (x^2 + y^2 + eps^2).
Scenario flat_wire(double alpha);

/// U(1) on R^3: A = i alpha/2 (z/s - 1)(x dy - y dx)/(x^2 + y^2 + eps^2), s^2 = r^2 + eps^2,
/// with pieces F1 (monopole), F2, F3 (wire). The default sphere is oriented inward.
Scenario dirac_monopole(double alpha);

enum class RegularPart { Zero, Polynomial, Gaussian };

/// Smooth su(2)-valued 1-form on R^4 from a small menu.
KForm su2_regular_form(RegularPart a);
RegularPart parse_regular_part(const std::string& name);
std::string regular_part_name(RegularPart a);

/// SU(2) on R^4: omega = 2 alpha e3 A_eps + a with A_eps the wire potential in the
/// (x1, x2) plane; the singular surface is {x1 = x2 = 0}. Pieces F1 and F2.
Scenario su2_singular(double alpha, RegularPart a = RegularPart::Polynomial);

std::vector<std::string> scenario_names();
/// Throws ShapeError("unknown scenario ...").
Scenario make_scenario(const std::string& name, double alpha, RegularPart a = RegularPart::Polynomial);

}  // namespace gencon
