#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "periscope/domain.hpp"
#include "periscope/field.hpp"

namespace periscope {

/// Differentiable map of planar domains with Jacobian and Taylor access.
class PlaneMap {
 public:
  class Impl;

  PlaneMap();  // identity on the unit disc

  static PlaneMap identity(const Domain& source);
  static PlaneMap linear(const Mat2& m, const Vec2& offset, const Domain& source);
  static PlaneMap translation(const Vec2& a, const Domain& source);
  static PlaneMap rotation(double angle, const Domain& source);
  /// (x1, x2) -> (f1(x), f2(x)).
  static PlaneMap analytic(const ScalarField& f1, const ScalarField& f2, const Domain& source);
  /// x -> grad G(x), or x -> x + grad G(x) when `displacement` is set.
  static PlaneMap gradient_of(const ScalarField& potential, bool displacement, const Domain& source);
  /// outer(inner(x)); the source is inner's.
  static PlaneMap compose(const PlaneMap& outer, const PlaneMap& inner);
  /// First piece whose domain contains x is used.
  static PlaneMap piecewise(std::vector<std::pair<Domain, PlaneMap>> pieces);

  Vec2 operator()(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;
  /// Taylor expansions of both components about x.
  std::pair<Jet, Jet> expand(const Vec2& x, int order) const;
  int max_order() const;

  const Domain& source() const;
  PlaneMap with_source(const Domain& source) const;
  std::string kind() const;

  nlohmann::json to_json() const;
  static PlaneMap from_json(const nlohmann::json& j);

  const Impl& impl() const { return *impl_; }

 private:
  explicit PlaneMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

class PlaneMap::Impl {
 public:
  explicit Impl(Domain source) : source(std::move(source)) {}
  virtual ~Impl() = default;
  virtual std::string kind() const = 0;
  virtual Vec2 apply(const Vec2& x) const = 0;
  virtual Mat2 jacobian(const Vec2& x) const = 0;
  virtual std::pair<Jet, Jet> expand(const Vec2& x, int order) const = 0;
  virtual int max_order() const = 0;
  virtual nlohmann::json to_json() const = 0;
  virtual std::shared_ptr<const Impl> with_source(const Domain& d) const = 0;

  Domain source;
};

}  // namespace periscope
