#pragma once

#include <vector>

#include "periscope/geometry.hpp"

namespace periscope {

/// Truncated bivariate Taylor series in the offsets (d1, d2) from an
/// expansion point: sum of c(i, j) d1^i d2^j over i + j <= order.
///
/// Arithmetic between jets of different orders truncates to the lower order.
class Jet {
 public:
  explicit Jet(int order = 0, double constant = 0.0);

  /// The coordinate function x_axis expanded about `value`.
  static Jet variable(int order, int axis, double value);

  int order() const { return order_; }
  double value() const { return c_[0]; }

  double operator()(int i, int j) const;
  double& operator()(int i, int j);

  Vec2 gradient() const;
  Mat2 hessian() const;

  Jet derivative(int axis) const;
  Jet truncated(int order) const;

  double evaluate(const Vec2& offset) const;

  /// Substitutes d1 := dx, d2 := dy; both must have zero constant term.
  Jet compose(const Jet& dx, const Jet& dy) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);

 private:
  int index(int i, int j) const { return i * (order_ + 1) + j; }

  /// sum_k coeffs[k] (self - self.value())^k, coeffs[k] = f^(k)(a0) / k!.
  Jet apply_series(const std::vector<double>& coeffs) const;

  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);
  friend Jet pow(const Jet& a, double p);

  int order_;
  std::vector<double> c_;
};

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double p);
Jet tan(const Jet& a);

}  // namespace periscope
