#pragma once

// Matrix Lie algebras u(1), su(2), gl(n,C) (n <= 2) and their groups.

#include <Eigen/Core>

#include <complex>
#include <string>
#include <vector>

namespace gencon {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

/// Structural constraint tolerance (absolute, per entry).
inline constexpr double kStructTol = 1e-12;

struct AlgebraTag {
  enum class Kind { U1, SU2, GLnC };
  Kind kind = Kind::GLnC;
  int n = 1;

  static AlgebraTag u1() { return {Kind::U1, 1}; }
  static AlgebraTag su2() { return {Kind::SU2, 2}; }
  static AlgebraTag gl(int n);
  /// Complex scalars, used as the value type of ordinary differential forms.
  static AlgebraTag scalar() { return {Kind::GLnC, 1}; }

  /// Real dimension of the algebra.
  int real_dim() const;
  std::string name() const;

  friend bool operator==(const AlgebraTag&, const AlgebraTag&) = default;
};

class LieValue {
 public:
  LieValue() = default;

  /// Validated construction: throws ShapeError if the matrix violates the tag.
  LieValue(AlgebraTag tag, const Mat2& entries);

  /// Construction that projects onto the tag's subspace instead of validating.
  static LieValue projected(AlgebraTag tag, const Mat2& entries);
  static LieValue zero(AlgebraTag tag);
  static LieValue scalar(cplx z);
  /// i*theta in u(1).
  static LieValue u1(double theta);
  /// x1*e1 + x2*e2 + x3*e3 with e_k = i*sigma_k/2.
  static LieValue su2(double x1, double x2, double x3);

  const AlgebraTag& tag() const { return tag_; }
  int n() const { return tag_.n; }
  /// Only the leading n x n block is meaningful; the rest is zero.
  const Mat2& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

  double norm() const;  ///< Frobenius norm
  cplx trace() const;
  /// Real coordinates in basis(tag()).
  std::vector<double> coordinates() const;

  LieValue operator+(const LieValue& o) const;
  LieValue operator-(const LieValue& o) const;
  LieValue operator-() const;
  LieValue operator*(double s) const;
  friend LieValue operator*(double s, const LieValue& a) { return a * s; }
  LieValue& operator+=(const LieValue& o);

 private:
  LieValue(AlgebraTag tag, const Mat2& entries, int) : tag_(tag), m_(entries) {}

  AlgebraTag tag_ = AlgebraTag::scalar();
  Mat2 m_ = Mat2::Zero();
};

class GroupElement {
 public:
  GroupElement() = default;
  /// Validated construction.
  GroupElement(AlgebraTag tag, const Mat2& entries);

  static GroupElement identity(AlgebraTag tag);
  /// Nearest group element: unit phase for U(1), normalized quaternion for SU(2).
  static GroupElement projected(AlgebraTag tag, const Mat2& entries);

  const AlgebraTag& tag() const { return tag_; }
  int n() const { return tag_.n; }
  const Mat2& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& o) const;
  /// Distance from the group manifold (0 for exact U(1)/SU(2) elements).
  double constraint_defect() const;

 private:
  GroupElement(AlgebraTag tag, const Mat2& entries, int) : tag_(tag), m_(entries) {}
  friend GroupElement exp(const LieValue&);

  AlgebraTag tag_ = AlgebraTag::scalar();
  Mat2 m_ = Mat2::Identity();
};

/// Real basis of the algebra (u(1): {i}; su(2): {i sigma_k / 2}; gl: E_rc, i E_rc).
std::vector<LieValue> basis(AlgebraTag tag);
/// Inverse of LieValue::coordinates.
LieValue from_coordinates(AlgebraTag tag, const std::vector<double>& coords);

LieValue bracket(const LieValue& a, const LieValue& b);
/// g a g^{-1}
LieValue adjoint(const GroupElement& g, const LieValue& a);
GroupElement exp(const LieValue& a);
/// Principal logarithm; throws NumericalError("log branch point") at -I in SU(2).
LieValue log(const GroupElement& g);

/// Operator-norm distance between two n x n blocks.
double operator_distance(const Mat2& a, const Mat2& b, int n);

/// Fixed lattice of the group: 32 phases for U(1), 50 Halton points for SU(2).
std::vector<GroupElement> group_lattice(AlgebraTag tag);

}  // namespace gencon
