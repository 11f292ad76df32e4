#include "periscope/jet.hpp"

#include <algorithm>
#include <cmath>

namespace periscope {

Jet::Jet(int order, double constant) : order_(order), c_((order + 1) * (order + 1), 0.0) {
  if (order < 0) throw Error(ErrorCode::invalid_argument, "jet order must be >= 0");
  c_[0] = constant;
}

Jet Jet::variable(int order, int axis, double value) {
  Jet j(order, value);
  if (order >= 1) {
    if (axis == 0) j(1, 0) = 1.0;
    else j(0, 1) = 1.0;
  }
  return j;
}

double Jet::operator()(int i, int j) const {
  if (i < 0 || j < 0 || i + j > order_) return 0.0;
  return c_[index(i, j)];
}

double& Jet::operator()(int i, int j) { return c_[index(i, j)]; }

Vec2 Jet::gradient() const { return {(*this)(1, 0), (*this)(0, 1)}; }

Mat2 Jet::hessian() const {
  Mat2 h;
  h(0, 0) = 2.0 * (*this)(2, 0);
  h(1, 1) = 2.0 * (*this)(0, 2);
  h(0, 1) = h(1, 0) = (*this)(1, 1);
  return h;
}

Jet Jet::derivative(int axis) const {
  Jet out(std::max(order_ - 1, 0));
  for (int i = 0; i <= out.order_; ++i) {
    for (int j = 0; i + j <= out.order_; ++j) {
      out(i, j) = axis == 0 ? (i + 1) * (*this)(i + 1, j) : (j + 1) * (*this)(i, j + 1);
    }
  }
  if (order_ == 0) out.c_[0] = 0.0;
  return out;
}

Jet Jet::truncated(int order) const {
  Jet out(order);
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j) out(i, j) = (*this)(i, j);
  return out;
}

double Jet::evaluate(const Vec2& d) const {
  // Horner in d2 inside Horner in d1.
  double acc = 0.0;
  for (int i = order_; i >= 0; --i) {
    double inner = 0.0;
    for (int j = order_ - i; j >= 0; --j) inner = inner * d.y() + (*this)(i, j);
    acc = acc * d.x() + inner;
  }
  return acc;
}

Jet Jet::compose(const Jet& dx, const Jet& dy) const {
  const int k = std::min(dx.order_, dy.order_);
  std::vector<Jet> px{Jet(k, 1.0)}, py{Jet(k, 1.0)};
  for (int i = 1; i <= order_; ++i) {
    px.push_back(px.back() * dx);
    py.push_back(py.back() * dy);
  }
  Jet out(k);
  for (int i = 0; i <= order_; ++i) {
    for (int j = 0; i + j <= order_; ++j) {
      const double c = (*this)(i, j);
      if (c != 0.0) out += c * (px[i] * py[j]);
    }
  }
  return out;
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& v : out.c_) v = -v;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (int i = 0; i <= order_; ++i)
    for (int j = 0; i + j <= order_; ++j) (*this)(i, j) += o(i, j);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (int i = 0; i <= order_; ++i)
    for (int j = 0; i + j <= order_; ++j) (*this)(i, j) -= o(i, j);
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator+=(double s) { c_[0] += s; return *this; }
Jet& Jet::operator-=(double s) { c_[0] -= s; return *this; }
Jet& Jet::operator*=(double s) { for (double& v : c_) v *= s; return *this; }
Jet& Jet::operator/=(double s) { for (double& v : c_) v /= s; return *this; }

Jet operator*(const Jet& a, const Jet& b) {
  const int k = std::min(a.order_, b.order_);
  Jet out(k);
  for (int i1 = 0; i1 <= k; ++i1) {
    for (int j1 = 0; i1 + j1 <= k; ++j1) {
      const double ca = a(i1, j1);
      if (ca == 0.0) continue;
      for (int i2 = 0; i1 + j1 + i2 <= k; ++i2) {
        for (int j2 = 0; i1 + j1 + i2 + j2 <= k; ++j2) {
          out(i1 + i2, j1 + j2) += ca * b(i2, j2);
        }
      }
    }
  }
  return out;
}

Jet Jet::apply_series(const std::vector<double>& coeffs) const {
  Jet delta = *this;
  delta.c_[0] = 0.0;
  Jet out(order_, coeffs[0]);
  Jet power(order_, 1.0);
  for (int k = 1; k <= order_ && k < static_cast<int>(coeffs.size()); ++k) {
    power = power * delta;
    out += coeffs[k] * power;
  }
  return out;
}

Jet exp(const Jet& a) {
  std::vector<double> c(a.order() + 1);
  const double e = std::exp(a.value());
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    c[k] = e / fact;
  }
  return a.apply_series(c);
}

Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw Error(ErrorCode::domain_error, "log of a non-positive value");
  std::vector<double> c(a.order() + 1);
  c[0] = std::log(a0);
  for (int k = 1; k <= a.order(); ++k) c[k] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(a0, k));
  return a.apply_series(c);
}

Jet sin(const Jet& a) {
  std::vector<double> c(a.order() + 1);
  const double s = std::sin(a.value()), co = std::cos(a.value());
  const double cyc[4] = {s, co, -s, -co};
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    c[k] = cyc[k % 4] / fact;
  }
  return a.apply_series(c);
}

Jet cos(const Jet& a) {
  std::vector<double> c(a.order() + 1);
  const double s = std::sin(a.value()), co = std::cos(a.value());
  const double cyc[4] = {co, -s, -co, s};
  double fact = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) fact *= k;
    c[k] = cyc[k % 4] / fact;
  }
  return a.apply_series(c);
}

Jet pow(const Jet& a, double p) {
  const double a0 = a.value();
  const bool integral = p == std::floor(p) && p >= 0.0;
  if (integral) {
    Jet out(a.order(), 1.0);
    for (int k = 0; k < static_cast<int>(p); ++k) out = out * a;
    return out;
  }
  if (!(a0 > 0.0)) throw Error(ErrorCode::domain_error, "fractional power of a non-positive value");
  // Binomial series: c_k = C(p, k) a0^(p - k).
  std::vector<double> c(a.order() + 1);
  double binom = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) binom *= (p - (k - 1)) / k;
    c[k] = binom * std::pow(a0, p - k);
  }
  return a.apply_series(c);
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet operator/(double s, const Jet& a) {
  if (a.value() == 0.0) throw Error(ErrorCode::domain_error, "division by a jet with zero value");
  const double a0 = a.value();
  std::vector<double> c(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) c[k] = s * ((k % 2) ? -1.0 : 1.0) / std::pow(a0, k + 1);
  return a.apply_series(c);
}

Jet operator/(const Jet& a, const Jet& b) { return a * (1.0 / b); }

Jet tan(const Jet& a) { return sin(a) / cos(a); }

}  // namespace periscope
