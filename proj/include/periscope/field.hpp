#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "periscope/domain.hpp"
#include "periscope/expression.hpp"
#include "periscope/jet.hpp"

namespace periscope {

class PlaneMap;

/// Value, gradient and Hessian at one point.
struct FieldSample {
  double value;
  Vec2 gradient;
  Mat2 hessian;
};

/// Twice-differentiable scalar function on the plane.
class ScalarField {
 public:
  class Impl;

  static constexpr int kMaxPolynomialDegree = 8;

  ScalarField();  // identically zero

  /// sum c(i, j) (x1 - center1)^i (x2 - center2)^j; the jet order is the degree.
  static ScalarField polynomial(const Jet& coefficients, const Vec2& center = Vec2::Zero());
  static ScalarField constant(double value);
  static ScalarField linear(const Vec2& slope, double offset = 0.0);
  /// q |x - center|^2 / 2.
  static ScalarField quadratic(const Mat2& q, const Vec2& center = Vec2::Zero());
  static ScalarField expression(const Expression& e);
  /// Polynomial kind when the expression is a polynomial of degree <= 8.
  static ScalarField parse(const std::string& text);
  /// Natural bicubic spline through values[j * nx + i] at lo + (i hx, j hy).
  static ScalarField grid(const Vec2& lo, const Vec2& hi, int nx, int ny, std::vector<double> values);
  /// scale F(M x + t) + <b, x> + q |x|^2 / 2 + k.
  static ScalarField affine(const ScalarField& base, double scale, const Vec2& linear, double quadratic,
                            double constant, const Mat2& arg_matrix = Mat2::Identity(),
                            const Vec2& arg_offset = Vec2::Zero());
  static ScalarField sum(std::vector<ScalarField> terms);
  /// Second mirror of a two-mirror periscope: Phi2(x + grad G(x)) =
  /// Phi1(x) + (|grad G|^2 - c^2) / (2c) with Phi1 = G / c + h, evaluated by
  /// inverting x -> x + grad G(x) starting from samples of `source`.
  static ScalarField second_mirror(const ScalarField& potential, double c, double h, const Domain& source);
  /// Potential of `gradient` vanishing at `base`, by axis-aligned line
  /// integration averaged over both path orders.
  static ScalarField potential(const PlaneMap& gradient, const Vec2& base);

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  Mat2 hessian(const Vec2& x) const;
  FieldSample sample(const Vec2& x) const;
  /// Taylor expansion about x. Kinds without a closed form support order <= 2.
  Jet expand(const Vec2& x, int order) const;

  std::string kind() const;
  /// Maximum Taylor order expand() supports (large for closed forms).
  int max_order() const;

  ScalarField operator-() const;
  ScalarField scaled(double s) const;
  ScalarField plus_constant(double k) const;
  ScalarField plus_linear(const Vec2& b) const;

  nlohmann::json to_json() const;
  static ScalarField from_json(const nlohmann::json& j);

  const Impl& impl() const { return *impl_; }

 private:
  explicit ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

class ScalarField::Impl {
 public:
  virtual ~Impl() = default;
  virtual std::string kind() const = 0;
  virtual double value(const Vec2& x) const = 0;
  virtual FieldSample sample(const Vec2& x) const = 0;
  virtual Vec2 gradient(const Vec2& x) const { return sample(x).gradient; }
  virtual Mat2 hessian(const Vec2& x) const { return sample(x).hessian; }
  virtual Jet expand(const Vec2& x, int order) const;
  virtual int max_order() const { return 2; }
  virtual nlohmann::json to_json() const = 0;
};

/// Decimal text that parses back to the identical double.
std::string exact_decimal(double v);
double parse_decimal(const nlohmann::json& j);

}  // namespace periscope
