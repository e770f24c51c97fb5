#pragma once

// A map R^in -> R^out held at several dual-number levels so that exact
// derivatives of order up to `depth` are available.

#include "gencon/dual.hpp"
#include "gencon/errors.hpp"

#include <functional>
#include <memory>
#include <span>
#include <tuple>
#include <vector>

namespace gencon {

class SmoothField {
 public:
  template <class T>
  using Fn = std::function<void(std::span<const T>, std::span<T>)>;

  SmoothField() = default;

  /// Wrap a generic callable `f(std::span<const T> x, std::span<T> out)`.
  /// `depth` is the number of derivative levels the callable supports (<= 3).
  template <class F>
  static SmoothField from(int in, int out, F f, int depth = 3) {
    SmoothField s;
    s.in_ = in;
    s.out_ = out;
    s.depth_ = depth;
    std::get<Fn<D0>>(s.fns_) = f;
    if (depth >= 1) std::get<Fn<D1>>(s.fns_) = f;
    if (depth >= 2) std::get<Fn<D2>>(s.fns_) = f;
    if (depth >= 3) std::get<Fn<D3>>(s.fns_) = f;
    return s;
  }

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  /// Highest derivative order available exactly.
  int depth() const { return depth_; }
  bool valid() const { return static_cast<bool>(std::get<Fn<D0>>(fns_)); }

  template <class T>
  const Fn<T>& fn() const {
    if (dual_depth<T>::value > depth_) throw ShapeError("smooth field: derivative level not available");
    return std::get<Fn<T>>(fns_);
  }

  void value(std::span<const double> x, std::span<double> out) const { fn<D0>()(x, out); }

 private:
  int in_ = 0;
  int out_ = 0;
  int depth_ = 0;
  std::tuple<Fn<D0>, Fn<D1>, Fn<D2>, Fn<D3>> fns_;
};

/// Value and partial derivative along `dir` of `f` at a point of type T,
/// using the next dual level.
template <class T>
void field_partial(const SmoothField& f, std::span<const T> x, int dir, std::span<T> val, std::span<T> der) {
  using U = Dual<T>;
  std::vector<U> xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = U(x[i], static_cast<int>(i) == dir ? T(1.0) : T(0.0));
  std::vector<U> ys(static_cast<std::size_t>(f.out_dim()));
  f.fn<U>()(std::span<const U>(xs), std::span<U>(ys));
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (!val.empty()) val[k] = ys[k].v;
    der[k] = ys[k].d;
  }
}

}  // namespace gencon
