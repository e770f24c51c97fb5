#include "gencon/liealg.hpp"

#include "gencon/errors.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gencon {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_same(const AlgebraTag& a, const AlgebraTag& b) {
  if (!(a == b)) throw ShapeError("algebra mismatch: " + a.name() + " vs " + b.name());
}

bool outside_block_zero(const Mat2& m, int n) {
  if (n == 2) return true;
  return std::abs(m(0, 1)) <= kStructTol && std::abs(m(1, 0)) <= kStructTol &&
         std::abs(m(1, 1)) <= kStructTol;
}

Mat2 block(const Mat2& m, int n) {
  Mat2 out = Mat2::Zero();
  out.topLeftCorner(n, n) = m.topLeftCorner(n, n);
  return out;
}

Mat2 project_algebra(const AlgebraTag& tag, const Mat2& m) {
  switch (tag.kind) {
    case AlgebraTag::Kind::U1: {
      Mat2 out = Mat2::Zero();
      out(0, 0) = cplx(0.0, m(0, 0).imag());
      return out;
    }
    case AlgebraTag::Kind::SU2: {
      Mat2 x = 0.5 * (m - m.adjoint());
      cplx half_tr = 0.5 * x.trace();
      x(0, 0) -= half_tr;
      x(1, 1) -= half_tr;
      return x;
    }
    case AlgebraTag::Kind::GLnC:
      return block(m, tag.n);
  }
  return m;
}

// sin(t)/t, cos-like expansions near zero.
template <class T>
T sinc(T t) {
  if (std::abs(t) < 1e-4) {
    T t2 = t * t;
    return T(1.0) - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}

cplx sinhc(cplx d) {
  if (std::abs(d) < 1e-4) {
    cplx d2 = d * d;
    return 1.0 + d2 / 6.0 + d2 * d2 / 120.0;
  }
  return std::sinh(d) / d;
}

double radical_inverse(int index, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

AlgebraTag AlgebraTag::gl(int n) {
  if (n < 1 || n > 2) throw ShapeError("gl(n,C) supports n in {1,2}");
  return {Kind::GLnC, n};
}

int AlgebraTag::real_dim() const {
  switch (kind) {
    case Kind::U1: return 1;
    case Kind::SU2: return 3;
    case Kind::GLnC: return 2 * n * n;
  }
  return 0;
}

std::string AlgebraTag::name() const {
  switch (kind) {
    case Kind::U1: return "u1";
    case Kind::SU2: return "su2";
    case Kind::GLnC: return "gl" + std::to_string(n) + "c";
  }
  return "?";
}

// ---------------------------------------------------------------- LieValue

LieValue::LieValue(AlgebraTag tag, const Mat2& entries) : tag_(tag), m_(entries) {
  bool ok = outside_block_zero(entries, tag.n);
  switch (tag.kind) {
    case AlgebraTag::Kind::U1:
      ok = ok && std::abs(entries(0, 0).real()) <= kStructTol;
      break;
    case AlgebraTag::Kind::SU2: {
      Mat2 h = entries + entries.adjoint();
      ok = ok && h.cwiseAbs().maxCoeff() <= kStructTol && std::abs(entries.trace()) <= kStructTol;
      break;
    }
    case AlgebraTag::Kind::GLnC:
      break;
  }
  if (!ok) throw ShapeError("matrix violates " + tag.name() + " constraints");
  m_ = project_algebra(tag, entries);
}

LieValue LieValue::projected(AlgebraTag tag, const Mat2& entries) {
  return LieValue(tag, project_algebra(tag, entries), 0);
}

LieValue LieValue::zero(AlgebraTag tag) { return LieValue(tag, Mat2::Zero(), 0); }

LieValue LieValue::scalar(cplx z) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = z;
  return LieValue(AlgebraTag::scalar(), m, 0);
}

LieValue LieValue::u1(double theta) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = cplx(0.0, theta);
  return LieValue(AlgebraTag::u1(), m, 0);
}

LieValue LieValue::su2(double x1, double x2, double x3) {
  Mat2 m;
  m << cplx(0.0, 0.5 * x3), cplx(0.5 * x2, 0.5 * x1),
       cplx(-0.5 * x2, 0.5 * x1), cplx(0.0, -0.5 * x3);
  return LieValue(AlgebraTag::su2(), m, 0);
}

double LieValue::norm() const { return m_.norm(); }
cplx LieValue::trace() const { return m_.trace(); }

std::vector<double> LieValue::coordinates() const {
  switch (tag_.kind) {
    case AlgebraTag::Kind::U1:
      return {m_(0, 0).imag()};
    case AlgebraTag::Kind::SU2:
      return {2.0 * m_(0, 1).imag(), 2.0 * m_(0, 1).real(), 2.0 * m_(0, 0).imag()};
    case AlgebraTag::Kind::GLnC: {
      std::vector<double> c;
      for (int r = 0; r < tag_.n; ++r)
        for (int col = 0; col < tag_.n; ++col) {
          c.push_back(m_(r, col).real());
          c.push_back(m_(r, col).imag());
        }
      return c;
    }
  }
  return {};
}

LieValue LieValue::operator+(const LieValue& o) const {
  require_same(tag_, o.tag_);
  return LieValue(tag_, m_ + o.m_, 0);
}

LieValue LieValue::operator-(const LieValue& o) const {
  require_same(tag_, o.tag_);
  return LieValue(tag_, m_ - o.m_, 0);
}

LieValue LieValue::operator-() const { return LieValue(tag_, -m_, 0); }
LieValue LieValue::operator*(double s) const { return LieValue(tag_, s * m_, 0); }

LieValue& LieValue::operator+=(const LieValue& o) {
  require_same(tag_, o.tag_);
  m_ += o.m_;
  return *this;
}

// ------------------------------------------------------------ GroupElement

GroupElement::GroupElement(AlgebraTag tag, const Mat2& entries) : tag_(tag), m_(block(entries, tag.n)) {
  bool ok = outside_block_zero(entries, tag.n);
  switch (tag.kind) {
    case AlgebraTag::Kind::U1:
      ok = ok && std::abs(std::abs(entries(0, 0)) - 1.0) <= kStructTol;
      break;
    case AlgebraTag::Kind::SU2:
      ok = ok && constraint_defect() <= kStructTol;
      break;
    case AlgebraTag::Kind::GLnC: {
      cplx det = tag.n == 1 ? entries(0, 0) : entries.determinant();
      ok = ok && std::abs(det) > 0.0;
      break;
    }
  }
  if (!ok) throw ShapeError("matrix is not an element of the " + tag.name() + " group");
}

GroupElement GroupElement::identity(AlgebraTag tag) {
  Mat2 m = Mat2::Zero();
  for (int i = 0; i < tag.n; ++i) m(i, i) = 1.0;
  return GroupElement(tag, m, 0);
}

GroupElement GroupElement::projected(AlgebraTag tag, const Mat2& entries) {
  switch (tag.kind) {
    case AlgebraTag::Kind::U1: {
      Mat2 m = Mat2::Zero();
      m(0, 0) = entries(0, 0) / std::abs(entries(0, 0));
      return GroupElement(tag, m, 0);
    }
    case AlgebraTag::Kind::SU2: {
      cplx a = 0.5 * (entries(0, 0) + std::conj(entries(1, 1)));
      cplx b = 0.5 * (entries(0, 1) - std::conj(entries(1, 0)));
      double s = std::sqrt(std::norm(a) + std::norm(b));
      a /= s;
      b /= s;
      Mat2 m;
      m << a, b, -std::conj(b), std::conj(a);
      return GroupElement(tag, m, 0);
    }
    case AlgebraTag::Kind::GLnC:
      return GroupElement(tag, block(entries, tag.n), 0);
  }
  return GroupElement(tag, entries, 0);
}

GroupElement GroupElement::inverse() const {
  switch (tag_.kind) {
    case AlgebraTag::Kind::U1:
    case AlgebraTag::Kind::SU2:
      return GroupElement(tag_, m_.adjoint(), 0);
    case AlgebraTag::Kind::GLnC:
      if (tag_.n == 1) {
        Mat2 m = Mat2::Zero();
        m(0, 0) = 1.0 / m_(0, 0);
        return GroupElement(tag_, m, 0);
      }
      return GroupElement(tag_, m_.inverse(), 0);
  }
  return *this;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  require_same(tag_, o.tag_);
  return GroupElement(tag_, m_ * o.m_, 0);
}

double GroupElement::constraint_defect() const {
  switch (tag_.kind) {
    case AlgebraTag::Kind::U1:
      return std::abs(std::abs(m_(0, 0)) - 1.0);
    case AlgebraTag::Kind::SU2: {
      Mat2 u = m_ * m_.adjoint() - Mat2::Identity();
      return std::max(u.cwiseAbs().maxCoeff(), std::abs(m_.determinant() - 1.0));
    }
    case AlgebraTag::Kind::GLnC:
      return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------- algebra

std::vector<LieValue> basis(AlgebraTag tag) {
  switch (tag.kind) {
    case AlgebraTag::Kind::U1:
      return {LieValue::u1(1.0)};
    case AlgebraTag::Kind::SU2:
      return {LieValue::su2(1, 0, 0), LieValue::su2(0, 1, 0), LieValue::su2(0, 0, 1)};
    case AlgebraTag::Kind::GLnC: {
      std::vector<LieValue> out;
      for (int r = 0; r < tag.n; ++r)
        for (int c = 0; c < tag.n; ++c) {
          Mat2 m = Mat2::Zero();
          m(r, c) = 1.0;
          out.push_back(LieValue::projected(tag, m));
          m(r, c) = kI;
          out.push_back(LieValue::projected(tag, m));
        }
      return out;
    }
  }
  return {};
}

LieValue from_coordinates(AlgebraTag tag, const std::vector<double>& coords) {
  if (static_cast<int>(coords.size()) != tag.real_dim())
    throw ShapeError("coordinate count does not match " + tag.name());
  LieValue out = LieValue::zero(tag);
  auto b = basis(tag);
  for (std::size_t i = 0; i < coords.size(); ++i) out += b[i] * coords[i];
  return out;
}

LieValue bracket(const LieValue& a, const LieValue& b) {
  require_same(a.tag(), b.tag());
  return LieValue::projected(a.tag(), a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

LieValue adjoint(const GroupElement& g, const LieValue& a) {
  require_same(g.tag(), a.tag());
  return LieValue::projected(a.tag(), g.matrix() * a.matrix() * g.inverse().matrix());
}

GroupElement exp(const LieValue& a) {
  const AlgebraTag& tag = a.tag();
  const Mat2& x = a.matrix();
  Mat2 m = Mat2::Zero();
  switch (tag.kind) {
    case AlgebraTag::Kind::U1:
      m(0, 0) = std::polar(1.0, x(0, 0).imag());
      break;
    case AlgebraTag::Kind::SU2: {
      // x^2 = -theta^2 I with theta^2 = det(x) >= 0.
      double theta = std::sqrt(std::max(0.0, x.determinant().real()));
      m = std::cos(theta) * Mat2::Identity() + sinc(theta) * x;
      break;
    }
    case AlgebraTag::Kind::GLnC:
      if (tag.n == 1) {
        m(0, 0) = std::exp(x(0, 0));
      } else {
        cplx tau = 0.5 * x.trace();
        Mat2 nil = x - tau * Mat2::Identity();
        cplx delta = std::sqrt(-nil.determinant());
        m = std::exp(tau) * (std::cosh(delta) * Mat2::Identity() + sinhc(delta) * nil);
      }
      break;
  }
  return GroupElement(tag, m, 0);
}

LieValue log(const GroupElement& g) {
  const AlgebraTag& tag = g.tag();
  const Mat2& m = g.matrix();
  switch (tag.kind) {
    case AlgebraTag::Kind::U1: {
      double phase = std::arg(m(0, 0));
      if (phase <= -std::numbers::pi) phase = std::numbers::pi;
      return LieValue::u1(phase);
    }
    case AlgebraTag::Kind::SU2: {
      double c = 0.5 * m.trace().real();
      if (c + 1.0 < 1e-10) throw NumericalError("log branch point");
      // m = cos(theta) I + sin(theta) u with u^2 = -I; atan2 keeps small angles accurate.
      Mat2 skew = 0.5 * (m - m.adjoint());
      double s = std::sqrt(std::max(0.0, skew.determinant().real()));
      double theta = std::atan2(s, c);
      Mat2 x = s > 0.0 ? Mat2(skew * (theta / s)) : Mat2(skew);
      return LieValue::projected(tag, x);
    }
    case AlgebraTag::Kind::GLnC: {
      if (tag.n == 1) {
        if (std::abs(m(0, 0)) == 0.0) throw NumericalError("log branch point");
        Mat2 x = Mat2::Zero();
        x(0, 0) = std::log(m(0, 0));
        return LieValue::projected(tag, x);
      }
      cplx tau = 0.5 * m.trace();
      cplx delta = std::sqrt(tau * tau - m.determinant());
      cplx l1 = tau + delta, l2 = tau - delta;
      if (std::abs(l1) == 0.0 || std::abs(l2) == 0.0) throw NumericalError("log branch point");
      Mat2 id = Mat2::Identity();
      Mat2 x;
      if (std::abs(l1 - l2) > 1e-8 * std::max(1.0, std::abs(tau))) {
        x = (std::log(l1) * (m - l2 * id) - std::log(l2) * (m - l1 * id)) / (l1 - l2);
      } else {
        x = std::log(tau) * id + (m - tau * id) / tau;
      }
      return LieValue::projected(tag, x);
    }
  }
  return LieValue::zero(tag);
}

double operator_distance(const Mat2& a, const Mat2& b, int n) {
  Mat2 d = block(a - b, n);
  if (n == 1) return std::abs(d(0, 0));
  Mat2 h = d.adjoint() * d;
  double t = h.trace().real();
  double det = h.determinant().real();
  return std::sqrt(std::max(0.0, 0.5 * (t + std::sqrt(std::max(0.0, t * t - 4.0 * det)))));
}

std::vector<GroupElement> group_lattice(AlgebraTag tag) {
  std::vector<GroupElement> out;
  const double two_pi = 2.0 * std::numbers::pi;
  switch (tag.kind) {
    case AlgebraTag::Kind::U1:
      for (int k = 0; k < 32; ++k) out.push_back(exp(LieValue::u1(two_pi * k / 32.0)));
      break;
    case AlgebraTag::Kind::SU2:
      for (int k = 1; k <= 50; ++k) {
        double u1 = radical_inverse(k, 2), u2 = radical_inverse(k, 3), u3 = radical_inverse(k, 5);
        double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
        cplx a(s1 * std::sin(two_pi * u2), s1 * std::cos(two_pi * u2));
        cplx b(s2 * std::sin(two_pi * u3), s2 * std::cos(two_pi * u3));
        Mat2 m;
        m << a, b, -std::conj(b), std::conj(a);
        out.push_back(GroupElement::projected(tag, m));
      }
      break;
    case AlgebraTag::Kind::GLnC:
      throw ShapeError("group lattice is only defined for compact groups");
  }
  return out;
}

}  // namespace gencon
