#include "periscope/plane_map.hpp"

#include <limits>

#include "periscope/error.hpp"

namespace periscope {

using nlohmann::json;

namespace {

json vec_json(const Vec2& v) { return json::array({exact_decimal(v.x()), exact_decimal(v.y())}); }
Vec2 vec_from(const json& j) { return {parse_decimal(j.at(0)), parse_decimal(j.at(1))}; }

class LinearImpl final : public PlaneMap::Impl {
 public:
  LinearImpl(Mat2 m, Vec2 offset, Domain source) : Impl(std::move(source)), m_(m), b_(offset) {}
  std::string kind() const override { return "linear"; }
  Vec2 apply(const Vec2& x) const override { return m_ * x + b_; }
  Mat2 jacobian(const Vec2&) const override { return m_; }
  std::pair<Jet, Jet> expand(const Vec2& x, int order) const override {
    const Vec2 y = apply(x);
    Jet a(order, y.x()), b(order, y.y());
    if (order >= 1) {
      a(1, 0) = m_(0, 0);
      a(0, 1) = m_(0, 1);
      b(1, 0) = m_(1, 0);
      b(0, 1) = m_(1, 1);
    }
    return {a, b};
  }
  int max_order() const override { return 64; }
  json to_json() const override {
    return {{"kind", "linear"},
            {"matrix", json::array({exact_decimal(m_(0, 0)), exact_decimal(m_(0, 1)), exact_decimal(m_(1, 0)),
                                    exact_decimal(m_(1, 1))})},
            {"offset", vec_json(b_)},
            {"source", source.to_json()}};
  }
  std::shared_ptr<const Impl> with_source(const Domain& d) const override {
    return std::make_shared<LinearImpl>(m_, b_, d);
  }

 private:
  Mat2 m_;
  Vec2 b_;
};

class AnalyticImpl final : public PlaneMap::Impl {
 public:
  AnalyticImpl(ScalarField f1, ScalarField f2, Domain source)
      : Impl(std::move(source)), f1_(std::move(f1)), f2_(std::move(f2)) {}
  std::string kind() const override { return "analytic"; }
  Vec2 apply(const Vec2& x) const override { return {f1_.value(x), f2_.value(x)}; }
  Mat2 jacobian(const Vec2& x) const override {
    Mat2 j;
    j.row(0) = f1_.gradient(x).transpose();
    j.row(1) = f2_.gradient(x).transpose();
    return j;
  }
  std::pair<Jet, Jet> expand(const Vec2& x, int order) const override {
    return {f1_.expand(x, order), f2_.expand(x, order)};
  }
  int max_order() const override { return std::min(f1_.max_order(), f2_.max_order()); }
  json to_json() const override {
    return {{"kind", "analytic"}, {"f1", f1_.to_json()}, {"f2", f2_.to_json()}, {"source", source.to_json()}};
  }
  std::shared_ptr<const Impl> with_source(const Domain& d) const override {
    return std::make_shared<AnalyticImpl>(f1_, f2_, d);
  }

 private:
  ScalarField f1_, f2_;
};

class GradientImpl final : public PlaneMap::Impl {
 public:
  GradientImpl(ScalarField g, bool displacement, Domain source)
      : Impl(std::move(source)), g_(std::move(g)), displacement_(displacement) {}
  std::string kind() const override { return "gradient"; }
  Vec2 apply(const Vec2& x) const override {
    const Vec2 g = g_.gradient(x);
    return displacement_ ? Vec2(x + g) : g;
  }
  Mat2 jacobian(const Vec2& x) const override {
    const Mat2 h = g_.hessian(x);
    return displacement_ ? Mat2(h + Mat2::Identity()) : h;
  }
  std::pair<Jet, Jet> expand(const Vec2& x, int order) const override {
    const Jet g = g_.expand(x, order + 1);
    Jet a = g.derivative(0), b = g.derivative(1);
    if (displacement_) {
      a += Jet::variable(order, 0, x.x());
      b += Jet::variable(order, 1, x.y());
    }
    return {a, b};
  }
  int max_order() const override { return g_.max_order() - 1; }
  json to_json() const override {
    return {{"kind", "gradient"},
            {"potential", g_.to_json()},
            {"displacement", displacement_},
            {"source", source.to_json()}};
  }
  std::shared_ptr<const Impl> with_source(const Domain& d) const override {
    return std::make_shared<GradientImpl>(g_, displacement_, d);
  }

 private:
  ScalarField g_;
  bool displacement_;
};

class ComposeImpl final : public PlaneMap::Impl {
 public:
  ComposeImpl(PlaneMap outer, PlaneMap inner, Domain source)
      : Impl(std::move(source)), outer_(std::move(outer)), inner_(std::move(inner)) {}
  std::string kind() const override { return "compose"; }
  Vec2 apply(const Vec2& x) const override { return outer_(inner_(x)); }
  Mat2 jacobian(const Vec2& x) const override { return outer_.jacobian(inner_(x)) * inner_.jacobian(x); }
  std::pair<Jet, Jet> expand(const Vec2& x, int order) const override {
    auto [a, b] = inner_.expand(x, order);
    const Vec2 y(a.value(), b.value());
    auto [p, q] = outer_.expand(y, order);
    a -= y.x();
    b -= y.y();
    return {p.compose(a, b), q.compose(a, b)};
  }
  int max_order() const override { return std::min(outer_.max_order(), inner_.max_order()); }
  json to_json() const override {
    return {{"kind", "compose"}, {"outer", outer_.to_json()}, {"inner", inner_.to_json()},
            {"source", source.to_json()}};
  }
  std::shared_ptr<const Impl> with_source(const Domain& d) const override {
    return std::make_shared<ComposeImpl>(outer_, inner_, d);
  }

 private:
  PlaneMap outer_, inner_;
};

Domain bounding_rectangle(const std::vector<std::pair<Domain, PlaneMap>>& pieces) {
  Box box = pieces.front().first.bounds();
  for (const auto& [d, m] : pieces) {
    const Box b = d.bounds();
    box.lo = box.lo.cwiseMin(b.lo);
    box.hi = box.hi.cwiseMax(b.hi);
  }
  if (box.hi.y() == box.lo.y()) return Domain::interval(box.lo.x(), box.hi.x());
  return Domain::rectangle(box.lo, box.hi);
}

class PiecewiseImpl final : public PlaneMap::Impl {
 public:
  PiecewiseImpl(std::vector<std::pair<Domain, PlaneMap>> pieces, Domain source)
      : Impl(std::move(source)), pieces_(std::move(pieces)) {}
  std::string kind() const override { return "piecewise"; }
  Vec2 apply(const Vec2& x) const override { return piece(x)(x); }
  Mat2 jacobian(const Vec2& x) const override { return piece(x).jacobian(x); }
  std::pair<Jet, Jet> expand(const Vec2& x, int order) const override { return piece(x).expand(x, order); }
  int max_order() const override {
    int m = 64;
    for (const auto& p : pieces_) m = std::min(m, p.second.max_order());
    return m;
  }
  json to_json() const override {
    json pieces = json::array();
    for (const auto& [d, m] : pieces_) pieces.push_back({{"domain", d.to_json()}, {"map", m.to_json()}});
    return {{"kind", "piecewise"}, {"pieces", pieces}, {"source", source.to_json()}};
  }
  std::shared_ptr<const Impl> with_source(const Domain& d) const override {
    return std::make_shared<PiecewiseImpl>(pieces_, d);
  }

 private:
  const PlaneMap& piece(const Vec2& x) const {
    for (const auto& [d, m] : pieces_)
      if (d.contains(x)) return m;
    // Outside every piece: fall back to the piece with the nearest center.
    const PlaneMap* best = &pieces_.front().second;
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& [d, m] : pieces_) {
      const double r = (d.center() - x).squaredNorm();
      if (r < dist) {
        dist = r;
        best = &m;
      }
    }
    return *best;
  }

  std::vector<std::pair<Domain, PlaneMap>> pieces_;
};

}  // namespace

PlaneMap::PlaneMap() : PlaneMap(identity(Domain())) {}

PlaneMap PlaneMap::identity(const Domain& source) { return linear(Mat2::Identity(), Vec2::Zero(), source); }

PlaneMap PlaneMap::linear(const Mat2& m, const Vec2& offset, const Domain& source) {
  return PlaneMap(std::make_shared<LinearImpl>(m, offset, source));
}

PlaneMap PlaneMap::translation(const Vec2& a, const Domain& source) { return linear(Mat2::Identity(), a, source); }

PlaneMap PlaneMap::rotation(double angle, const Domain& source) {
  Mat2 r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return linear(r, Vec2::Zero(), source);
}

PlaneMap PlaneMap::analytic(const ScalarField& f1, const ScalarField& f2, const Domain& source) {
  return PlaneMap(std::make_shared<AnalyticImpl>(f1, f2, source));
}

PlaneMap PlaneMap::gradient_of(const ScalarField& potential, bool displacement, const Domain& source) {
  return PlaneMap(std::make_shared<GradientImpl>(potential, displacement, source));
}

PlaneMap PlaneMap::compose(const PlaneMap& outer, const PlaneMap& inner) {
  return PlaneMap(std::make_shared<ComposeImpl>(outer, inner, inner.source()));
}

PlaneMap PlaneMap::piecewise(std::vector<std::pair<Domain, PlaneMap>> pieces) {
  if (pieces.empty()) throw Error(ErrorCode::invalid_argument, "piecewise map needs at least one piece");
  Domain source = bounding_rectangle(pieces);
  return PlaneMap(std::make_shared<PiecewiseImpl>(std::move(pieces), std::move(source)));
}

Vec2 PlaneMap::operator()(const Vec2& x) const { return impl_->apply(x); }
Mat2 PlaneMap::jacobian(const Vec2& x) const { return impl_->jacobian(x); }
std::pair<Jet, Jet> PlaneMap::expand(const Vec2& x, int order) const {
  if (order > max_order()) {
    throw Error(ErrorCode::invalid_argument,
                "map kind '" + kind() + "' supports Taylor order <= " + std::to_string(max_order()));
  }
  return impl_->expand(x, order);
}
int PlaneMap::max_order() const { return impl_->max_order(); }
const Domain& PlaneMap::source() const { return impl_->source; }
PlaneMap PlaneMap::with_source(const Domain& source) const { return PlaneMap(impl_->with_source(source)); }
std::string PlaneMap::kind() const { return impl_->kind(); }
json PlaneMap::to_json() const { return impl_->to_json(); }

PlaneMap PlaneMap::from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const Domain source = j.contains("source") ? Domain::from_json(j.at("source")) : Domain();
    if (kind == "linear") {
      const auto& m = j.at("matrix");
      Mat2 a;
      a << parse_decimal(m.at(0)), parse_decimal(m.at(1)), parse_decimal(m.at(2)), parse_decimal(m.at(3));
      return linear(a, vec_from(j.at("offset")), source);
    }
    if (kind == "analytic") {
      return analytic(ScalarField::from_json(j.at("f1")), ScalarField::from_json(j.at("f2")), source);
    }
    if (kind == "gradient") {
      return gradient_of(ScalarField::from_json(j.at("potential")), j.at("displacement").get<bool>(), source);
    }
    if (kind == "compose") return compose(from_json(j.at("outer")), from_json(j.at("inner"))).with_source(source);
    if (kind == "piecewise") {
      std::vector<std::pair<Domain, PlaneMap>> pieces;
      for (const auto& p : j.at("pieces")) pieces.emplace_back(Domain::from_json(p.at("domain")), from_json(p.at("map")));
      return piecewise(std::move(pieces)).with_source(source);
    }
    throw Error(ErrorCode::schema_error, "unknown map kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_error, std::string("malformed map: ") + e.what());
  }
}

}  // namespace periscope
