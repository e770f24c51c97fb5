#pragma once

// Epsilon ladders, sampled nets of numbers and their extrapolation to eps -> 0.

#include "gencon/forms.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gencon {

/// eps_k = eps0 * ratio^k for k = 0..count-1.
class EpsilonLadder {
 public:
  EpsilonLadder() = default;
  EpsilonLadder(double eps0, double ratio, int count);

  double eps0() const { return eps0_; }
  double ratio() const { return ratio_; }
  int count() const { return count_; }
  double operator[](int k) const;
  std::vector<double> values() const;

  friend bool operator==(const EpsilonLadder&, const EpsilonLadder&) = default;

 private:
  double eps0_ = 0.0625;
  double ratio_ = 0.5;
  int count_ = 14;
};

/// A net of complex numbers sampled on a ladder. `noise` optionally holds an
/// absolute error bound per sample (e.g. a quadrature estimate).
struct GeneralizedNumber {
  EpsilonLadder ladder;
  std::vector<cplx> values;
  std::vector<double> noise;
};

struct Extrapolation {
  cplx limit{};
  double order = 0.0;  ///< fitted exponent p of L + c eps^p (0 for a constant tail)
  double err_est = 0.0;
  bool constant = false;
  double residual_rms = 0.0;
};

/// Fits L + c eps^p on the tail max(6, n/2) samples by variable projection over p.
/// Throws NumericalError when the fit does not describe a convergent net.
Extrapolation extrapolate(const GeneralizedNumber& gn);
Extrapolation extrapolate(const std::vector<double>& eps, const std::vector<cplx>& values,
                          const std::vector<double>& noise = {});

/// A net eps -> KForm (0-forms serve as scalar functions).
struct EpsilonFamily {
  std::function<KForm(double)> make;
  std::string meta;

  KForm operator()(double eps) const { return make(eps); }
};

/// CSV with header `epsilon,value_re,value_im`.
void write_ladder_csv(std::ostream& os, const std::vector<double>& eps, const std::vector<cplx>& values);
void write_ladder_csv(const std::string& path, const std::vector<double>& eps, const std::vector<cplx>& values);
/// Reads a file written by write_ladder_csv.
void read_ladder_csv(const std::string& path, std::vector<double>& eps, std::vector<cplx>& values);

}  // namespace gencon
