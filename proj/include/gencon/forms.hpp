#pragma once

// Lie-algebra-valued differential k-forms on chart domains of R^m.
//
// A form is stored by its coefficients on increasing multi-indices
// I = (i1 < ... < ik), so that f = sum_I f_I dx^{i1} ^ ... ^ dx^{ik} and
// dx^1 ^ dx^2 (e_1, e_2) = 1 (determinant convention).

#include "gencon/liealg.hpp"
#include "gencon/patch.hpp"
#include "gencon/smooth_field.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace gencon {

inline constexpr int kMaxDegree = 4;
inline constexpr int kMaxChartDim = 7;

/// Increasing multi-indices of length k drawn from {0..m-1}, lexicographic.
const std::vector<std::vector<int>>& multi_indices(int m, int k);
/// Position of an increasing multi-index within multi_indices(m, k).
int multi_index_position(int m, std::span<const int> idx);

/// Real-coefficient expansion f_I = sum_b field[I * nb + b] * basis[b].
struct FormExpansion {
  std::vector<LieValue> basis;
  SmoothField field;
};

class KForm {
 public:
  using Coefficients = std::vector<LieValue>;
  using CoeffFn = std::function<Coefficients(const ChartPoint&)>;
  /// Result indexed [direction][multi-index].
  using DCoeffFn = std::function<std::vector<Coefficients>(const ChartPoint&)>;

  KForm(int degree, int dim, AlgebraTag tag, CoeffFn coeff, DCoeffFn dcoeff = {});

  /// Form backed by an AD field; derivatives come from the dual levels.
  static KForm from_field(int degree, int dim, AlgebraTag tag, std::vector<LieValue> basis, SmoothField field);
  static KForm constant(int degree, int dim, Coefficients coeffs);
  static KForm zero(int degree, int dim, AlgebraTag tag);

  int degree() const { return impl_->degree; }
  int dim() const { return impl_->dim; }
  const AlgebraTag& tag() const { return impl_->tag; }
  /// Number of coefficients, C(dim, degree).
  int size() const;

  Coefficients coefficients(const ChartPoint& p) const;
  bool has_analytic_derivative() const { return static_cast<bool>(impl_->dcoeff); }
  /// Partial derivatives of every coefficient; analytic when available,
  /// otherwise 4th-order central differences with one Richardson step.
  std::vector<Coefficients> derivatives(const ChartPoint& p) const;
  std::vector<Coefficients> finite_difference_derivatives(const ChartPoint& p) const;

  /// Non-null when the form carries an AD expansion.
  const FormExpansion* expansion() const { return impl_->expansion.get(); }

  /// Same form with the analytic derivative dropped (forces finite differences).
  KForm without_derivative() const;

 private:
  struct Impl {
    int degree;
    int dim;
    AlgebraTag tag;
    CoeffFn coeff;
    DCoeffFn dcoeff;
    std::shared_ptr<const FormExpansion> expansion;
  };
  explicit KForm(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Finite-difference step used for a point p.
double fd_step(const ChartPoint& p);

LieValue evaluate(const KForm& f, const ChartPoint& p, std::span<const Vec> vectors);
LieValue exterior_derivative(const KForm& f, const ChartPoint& p, std::span<const Vec> vectors);
/// df as a form; exact derivatives of df are kept when the expansion has depth >= 2.
KForm exterior_derivative(const KForm& f);

enum class Pairing { Bracket, Multiply, TracePair };
using PairFn = std::function<LieValue(const LieValue&, const LieValue&)>;

LieValue pair_values(Pairing pairing, const LieValue& a, const LieValue& b);

/// Antisymmetrized pairing of a j-form block and a k-form block:
///   1/(j! k!) sum_sigma sign(sigma) pair(left(v_sigma(1..j)), right(v_sigma(j+1..j+k)))
/// computed as the equivalent sum over (j,k)-shuffles.
LieValue shuffle_sum(int j, int k, std::span<const Vec> vectors,
                     const std::function<LieValue(std::span<const Vec>)>& left,
                     const std::function<LieValue(std::span<const Vec>)>& right, const PairFn& pair);

LieValue wedge_pair(const KForm& f, const KForm& g, Pairing pairing, const ChartPoint& p, std::span<const Vec> vectors);

/// f evaluated at patch(q) on the pushed-forward parameter vectors.
LieValue pullback(const KForm& f, const SurfacePatch& patch, const Vec& q, std::span<const Vec> param_vectors);

/// Determinant of the square matrix whose columns are cols restricted to rows.
double minor_det(std::span<const Vec> cols, std::span<const int> rows);

}  // namespace gencon
