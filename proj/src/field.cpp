#include "periscope/field.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "periscope/calculus.hpp"
#include "periscope/plane_map.hpp"

namespace periscope {

using nlohmann::json;

std::string exact_decimal(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_decimal(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::schema_error, "bad decimal '" + s + "'");
    return v;
  }
  throw Error(ErrorCode::schema_error, "expected a decimal string or number");
}

namespace {

json vec_json(const Vec2& v) { return json::array({exact_decimal(v.x()), exact_decimal(v.y())}); }
Vec2 vec_from(const json& j) { return {parse_decimal(j.at(0)), parse_decimal(j.at(1))}; }
json mat_json(const Mat2& m) {
  return json::array({exact_decimal(m(0, 0)), exact_decimal(m(0, 1)), exact_decimal(m(1, 0)), exact_decimal(m(1, 1))});
}
Mat2 mat_from(const json& j) {
  Mat2 m;
  m << parse_decimal(j.at(0)), parse_decimal(j.at(1)), parse_decimal(j.at(2)), parse_decimal(j.at(3));
  return m;
}

// ---------------------------------------------------------------- polynomial

class PolynomialImpl final : public ScalarField::Impl {
 public:
  PolynomialImpl(Jet c, Vec2 center) : c_(std::move(c)), center_(center) {}

  std::string kind() const override { return "polynomial"; }

  double value(const Vec2& x) const override { return c_.evaluate(x - center_); }

  FieldSample sample(const Vec2& x) const override {
    const int n = c_.order();
    const Vec2 d = x - center_;
    std::array<double, ScalarField::kMaxPolynomialDegree + 3> px{}, py{};
    px[0] = py[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      px[k] = px[k - 1] * d.x();
      py[k] = py[k - 1] * d.y();
    }
    FieldSample s{0.0, Vec2::Zero(), Mat2::Zero()};
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        const double c = c_(i, j);
        if (c == 0.0) continue;
        s.value += c * px[i] * py[j];
        if (i >= 1) s.gradient.x() += c * i * px[i - 1] * py[j];
        if (j >= 1) s.gradient.y() += c * j * px[i] * py[j - 1];
        if (i >= 2) s.hessian(0, 0) += c * i * (i - 1) * px[i - 2] * py[j];
        if (j >= 2) s.hessian(1, 1) += c * j * (j - 1) * px[i] * py[j - 2];
        if (i >= 1 && j >= 1) s.hessian(0, 1) += c * i * j * px[i - 1] * py[j - 1];
      }
    }
    s.hessian(1, 0) = s.hessian(0, 1);
    return s;
  }

  Jet expand(const Vec2& x, int order) const override {
    const Vec2 d = x - center_;
    const Jet X = Jet::variable(order, 0, d.x());
    const Jet Y = Jet::variable(order, 1, d.y());
    std::vector<Jet> px{Jet(order, 1.0)}, py{Jet(order, 1.0)};
    for (int k = 1; k <= c_.order(); ++k) {
      px.push_back(px.back() * X);
      py.push_back(py.back() * Y);
    }
    Jet out(order);
    for (int i = 0; i <= c_.order(); ++i)
      for (int j = 0; i + j <= c_.order(); ++j)
        if (c_(i, j) != 0.0) out += c_(i, j) * (px[i] * py[j]);
    return out;
  }

  int max_order() const override { return 64; }

  json to_json() const override {
    json coeffs = json::array();
    for (int i = 0; i <= c_.order(); ++i)
      for (int j = 0; i + j <= c_.order(); ++j)
        if (c_(i, j) != 0.0) coeffs.push_back(json::array({i, j, exact_decimal(c_(i, j))}));
    return {{"kind", "polynomial"}, {"degree", c_.order()}, {"center", vec_json(center_)}, {"coefficients", coeffs}};
  }

  const Jet& coefficients() const { return c_; }
  const Vec2& center() const { return center_; }

 private:
  Jet c_;
  Vec2 center_;
};

// ---------------------------------------------------------------- expression

class ExpressionImpl final : public ScalarField::Impl {
 public:
  explicit ExpressionImpl(Expression e) : e_(std::move(e)) {}
  std::string kind() const override { return "expression"; }
  double value(const Vec2& x) const override { return e_.evaluate(x); }
  FieldSample sample(const Vec2& x) const override {
    const Jet j = e_.expand(x, 2);
    return {j.value(), j.gradient(), j.hessian()};
  }
  Jet expand(const Vec2& x, int order) const override { return e_.expand(x, order); }
  int max_order() const override { return 64; }
  json to_json() const override { return {{"kind", "expression"}, {"source", e_.source()}}; }

 private:
  Expression e_;
};

// ---------------------------------------------------------------- grid

std::vector<double> natural_spline(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  // Tridiagonal system h/6 M[i-1] + 2h/3 M[i] + h/6 M[i+1] = (y[i+1] - 2y[i] + y[i-1]) / h.
  std::vector<double> diag(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    diag[i] = 2.0 * h / 3.0;
    rhs[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h;
  }
  const double off = h / 6.0;
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double w = off / diag[i - 1];
    diag[i] -= w * off;
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (rhs[i] - (i + 2 < n ? off * m[i + 1] : 0.0)) / diag[i];
    if (i == 1) break;
  }
  return m;
}

std::string base64_encode(const std::vector<double>& v) {
  static const char* kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::vector<unsigned char> bytes(v.size() * 8);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t u;
    std::memcpy(&u, &v[i], 8);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>((u >> (8 * b)) & 0xff);
  }
  std::string out;
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    const unsigned b0 = bytes[i];
    const unsigned b1 = i + 1 < bytes.size() ? bytes[i + 1] : 0;
    const unsigned b2 = i + 2 < bytes.size() ? bytes[i + 2] : 0;
    const unsigned triple = (b0 << 16) | (b1 << 8) | b2;
    out += kAlphabet[(triple >> 18) & 63];
    out += kAlphabet[(triple >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(triple >> 6) & 63] : '=';
    out += i + 2 < bytes.size() ? kAlphabet[triple & 63] : '=';
  }
  return out;
}

std::vector<double> base64_decode(const std::string& s) {
  auto decode = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> bytes;
  unsigned buf = 0;
  int bits = 0;
  for (char c : s) {
    if (c == '=') break;
    const int v = decode(c);
    if (v < 0) throw Error(ErrorCode::schema_error, "invalid base64 character");
    buf = (buf << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      bytes.push_back(static_cast<unsigned char>((buf >> bits) & 0xff));
    }
  }
  if (bytes.size() % 8 != 0) throw Error(ErrorCode::schema_error, "grid block is not a whole number of doubles");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    std::memcpy(&out[i], &u, 8);
  }
  return out;
}

class GridImpl final : public ScalarField::Impl {
 public:
  GridImpl(Vec2 lo, Vec2 hi, int nx, int ny, std::vector<double> values)
      : lo_(lo), hi_(hi), nx_(nx), ny_(ny), f_(std::move(values)) {
    if (nx < 2 || ny < 2 || static_cast<int>(f_.size()) != nx * ny || !(hi.x() > lo.x()) || !(hi.y() > lo.y())) {
      throw Error(ErrorCode::invalid_argument, "grid needs nx, ny >= 2, matching values and hi > lo");
    }
    hx_ = (hi.x() - lo.x()) / (nx - 1);
    hy_ = (hi.y() - lo.y()) / (ny - 1);
    fxx_.assign(f_.size(), 0.0);
    fyy_.assign(f_.size(), 0.0);
    fxxyy_.assign(f_.size(), 0.0);
    for (int j = 0; j < ny; ++j) {
      std::vector<double> row(f_.begin() + j * nx, f_.begin() + (j + 1) * nx);
      const auto m = natural_spline(row, hx_);
      for (int i = 0; i < nx; ++i) fxx_[j * nx + i] = m[i];
    }
    for (int i = 0; i < nx; ++i) {
      std::vector<double> col(ny), colxx(ny);
      for (int j = 0; j < ny; ++j) {
        col[j] = f_[j * nx + i];
        colxx[j] = fxx_[j * nx + i];
      }
      const auto m = natural_spline(col, hy_);
      const auto mm = natural_spline(colxx, hy_);
      for (int j = 0; j < ny; ++j) {
        fyy_[j * nx + i] = m[j];
        fxxyy_[j * nx + i] = mm[j];
      }
    }
  }

  std::string kind() const override { return "grid"; }

  double value(const Vec2& x) const override { return derivative(x, 0, 0); }

  FieldSample sample(const Vec2& x) const override {
    FieldSample s;
    s.value = derivative(x, 0, 0);
    s.gradient = {derivative(x, 1, 0), derivative(x, 0, 1)};
    s.hessian(0, 0) = derivative(x, 2, 0);
    s.hessian(1, 1) = derivative(x, 0, 2);
    s.hessian(0, 1) = s.hessian(1, 0) = derivative(x, 1, 1);
    return s;
  }

  Jet expand(const Vec2& x, int order) const override {
    Jet out(order);
    static const double kFact[4] = {1.0, 1.0, 2.0, 6.0};
    for (int p = 0; p <= std::min(order, 3); ++p)
      for (int q = 0; q <= 3 && p + q <= order; ++q) out(p, q) = derivative(x, p, q) / (kFact[p] * kFact[q]);
    return out;
  }

  int max_order() const override { return 64; }

  json to_json() const override {
    return {{"kind", "grid"}, {"lo", vec_json(lo_)}, {"hi", vec_json(hi_)}, {"nx", nx_}, {"ny", ny_},
            {"values", base64_encode(f_)}};
  }

 private:
  // Weights of (y_i, y_i+1, M_i, M_i+1) for the m-th derivative at local t.
  static std::array<double, 4> weights(double t, double h, int m) {
    const double a = 1.0 - t, b = t;
    switch (m) {
      case 0: return {a, b, (a * a * a - a) * h * h / 6.0, (b * b * b - b) * h * h / 6.0};
      case 1: return {-1.0 / h, 1.0 / h, -(3.0 * a * a - 1.0) * h / 6.0, (3.0 * b * b - 1.0) * h / 6.0};
      case 2: return {0.0, 0.0, a, b};
      default: return {0.0, 0.0, -1.0 / h, 1.0 / h};
    }
  }

  double derivative(const Vec2& x, int p, int q) const {
    if (p > 3 || q > 3) return 0.0;
    const int i = std::clamp(static_cast<int>(std::floor((x.x() - lo_.x()) / hx_)), 0, nx_ - 2);
    const int j = std::clamp(static_cast<int>(std::floor((x.y() - lo_.y()) / hy_)), 0, ny_ - 2);
    const double t = (x.x() - (lo_.x() + i * hx_)) / hx_;
    const double s = (x.y() - (lo_.y() + j * hy_)) / hy_;
    const auto wx = weights(t, hx_, p);
    const auto wy = weights(s, hy_, q);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      if (wx[a] == 0.0) continue;
      const int ii = i + (a % 2);
      const bool mx = a >= 2;
      for (int b = 0; b < 4; ++b) {
        if (wy[b] == 0.0) continue;
        const int jj = j + (b % 2);
        const bool my = b >= 2;
        const std::size_t k = static_cast<std::size_t>(jj * nx_ + ii);
        const double v = mx ? (my ? fxxyy_[k] : fxx_[k]) : (my ? fyy_[k] : f_[k]);
        acc += wx[a] * wy[b] * v;
      }
    }
    return acc;
  }

  Vec2 lo_, hi_;
  int nx_, ny_;
  double hx_ = 1.0, hy_ = 1.0;
  std::vector<double> f_, fxx_, fyy_, fxxyy_;
};

// ---------------------------------------------------------------- affine / sum

class AffineImpl final : public ScalarField::Impl {
 public:
  AffineImpl(ScalarField base, double s, Vec2 b, double q, double k, Mat2 m, Vec2 t)
      : base_(std::move(base)), s_(s), b_(b), q_(q), k_(k), m_(m), t_(t) {}

  std::string kind() const override { return "affine"; }

  double value(const Vec2& x) const override {
    return s_ * base_.value(m_ * x + t_) + b_.dot(x) + 0.5 * q_ * x.squaredNorm() + k_;
  }

  FieldSample sample(const Vec2& x) const override {
    const FieldSample f = base_.sample(m_ * x + t_);
    FieldSample out;
    out.value = s_ * f.value + b_.dot(x) + 0.5 * q_ * x.squaredNorm() + k_;
    out.gradient = s_ * (m_.transpose() * f.gradient) + b_ + q_ * x;
    out.hessian = s_ * (m_.transpose() * f.hessian * m_) + q_ * Mat2::Identity();
    return out;
  }

  Vec2 gradient(const Vec2& x) const override {
    return s_ * (m_.transpose() * base_.gradient(m_ * x + t_)) + b_ + q_ * x;
  }

  Mat2 hessian(const Vec2& x) const override {
    return s_ * (m_.transpose() * base_.hessian(m_ * x + t_) * m_) + q_ * Mat2::Identity();
  }

  Jet expand(const Vec2& x, int order) const override {
    const Jet inner = base_.expand(m_ * x + t_, order);
    Jet d1(order), d2(order);
    if (order >= 1) {
      d1(1, 0) = m_(0, 0);
      d1(0, 1) = m_(0, 1);
      d2(1, 0) = m_(1, 0);
      d2(0, 1) = m_(1, 1);
    }
    Jet out = s_ * inner.compose(d1, d2);
    const Jet X = Jet::variable(order, 0, x.x()), Y = Jet::variable(order, 1, x.y());
    out += b_.x() * X + b_.y() * Y + 0.5 * q_ * (X * X + Y * Y) + k_;
    return out;
  }

  int max_order() const override { return base_.max_order(); }

  json to_json() const override {
    return {{"kind", "affine"},       {"base", base_.to_json()},          {"scale", exact_decimal(s_)},
            {"linear", vec_json(b_)}, {"quadratic", exact_decimal(q_)},   {"constant", exact_decimal(k_)},
            {"arg_matrix", mat_json(m_)}, {"arg_offset", vec_json(t_)}};
  }

 private:
  ScalarField base_;
  double s_;
  Vec2 b_;
  double q_, k_;
  Mat2 m_;
  Vec2 t_;
};

class SumImpl final : public ScalarField::Impl {
 public:
  explicit SumImpl(std::vector<ScalarField> terms) : terms_(std::move(terms)) {}
  std::string kind() const override { return "sum"; }
  double value(const Vec2& x) const override {
    double v = 0.0;
    for (const auto& t : terms_) v += t.value(x);
    return v;
  }
  FieldSample sample(const Vec2& x) const override {
    FieldSample s{0.0, Vec2::Zero(), Mat2::Zero()};
    for (const auto& t : terms_) {
      const FieldSample f = t.sample(x);
      s.value += f.value;
      s.gradient += f.gradient;
      s.hessian += f.hessian;
    }
    return s;
  }
  Vec2 gradient(const Vec2& x) const override {
    Vec2 g = Vec2::Zero();
    for (const auto& t : terms_) g += t.gradient(x);
    return g;
  }
  Mat2 hessian(const Vec2& x) const override {
    Mat2 h = Mat2::Zero();
    for (const auto& t : terms_) h += t.hessian(x);
    return h;
  }
  Jet expand(const Vec2& x, int order) const override {
    Jet out(order);
    for (const auto& t : terms_) out += t.expand(x, order);
    return out;
  }
  int max_order() const override {
    int m = 64;
    for (const auto& t : terms_) m = std::min(m, t.max_order());
    return m;
  }
  json to_json() const override {
    json terms = json::array();
    for (const auto& t : terms_) terms.push_back(t.to_json());
    return {{"kind", "sum"}, {"terms", terms}};
  }

 private:
  std::vector<ScalarField> terms_;
};

// ---------------------------------------------------------------- second mirror

class SecondMirrorImpl final : public ScalarField::Impl {
 public:
  SecondMirrorImpl(ScalarField g, double c, double h, Domain source)
      : g_(std::move(g)), c_(c), h_(h), source_(std::move(source)),
        map_(PlaneMap::gradient_of(g_, true, source_)) {
    if (!(c > 0.0)) throw Error(ErrorCode::invalid_argument, "path constant must be positive");
    for (const auto& p : grid_points(source_, 17)) lookup_.emplace_back(p, map_(p));
    for (const auto& p : source_.outline(64)) lookup_.emplace_back(p, map_(p));
    // Bucket the image bounding box so the starting guess is an O(1) lookup.
    lo_ = hi_ = lookup_.front().second;
    for (const auto& [pre, img] : lookup_) {
      lo_ = lo_.cwiseMin(img);
      hi_ = hi_.cwiseMax(img);
    }
    hi_ = hi_.cwiseMax(lo_ + Vec2::Constant(1e-12));
    for (int j = 0; j < kBuckets; ++j) {
      for (int i = 0; i < kBuckets; ++i) {
        const Vec2 q = lo_ + Vec2((i + 0.5) / kBuckets * (hi_ - lo_).x(), (j + 0.5) / kBuckets * (hi_ - lo_).y());
        double best = INFINITY;
        Vec2 guess = lookup_.front().first;
        for (const auto& [pre, img] : lookup_) {
          const double d = (img - q).squaredNorm();
          if (d < best) {
            best = d;
            guess = pre;
          }
        }
        buckets_[j * kBuckets + i] = guess;
      }
    }
  }

  std::string kind() const override { return "second_mirror"; }

  double value(const Vec2& y) const override {
    Vec2 x;
    if (!preimage(y, x)) return std::numeric_limits<double>::quiet_NaN();
    const FieldSample s = g_.sample(x);
    return s.value / c_ + h_ + (s.gradient.squaredNorm() - c_ * c_) / (2.0 * c_);
  }

  FieldSample sample(const Vec2& y) const override {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Vec2 x;
    if (!preimage(y, x)) return {nan, Vec2::Constant(nan), Mat2::Constant(nan)};
    const FieldSample s = g_.sample(x);
    FieldSample out;
    out.value = s.value / c_ + h_ + (s.gradient.squaredNorm() - c_ * c_) / (2.0 * c_);
    // Differentiating the defining identity gives grad Phi2(y) = g(x) / c.
    out.gradient = s.gradient / c_;
    out.hessian = s.hessian * (Mat2::Identity() + s.hessian).inverse() / c_;
    out.hessian = 0.5 * (out.hessian + out.hessian.transpose());
    return out;
  }

  json to_json() const override {
    return {{"kind", "second_mirror"}, {"potential", g_.to_json()}, {"c", exact_decimal(c_)},
            {"h", exact_decimal(h_)},   {"source", source_.to_json()}};
  }

 private:
  bool preimage(const Vec2& y, Vec2& x) const {
    const Vec2 u = (y - lo_).cwiseQuotient(hi_ - lo_) * kBuckets;
    const int i = std::clamp(static_cast<int>(std::floor(u.x())), 0, kBuckets - 1);
    const int j = std::clamp(static_cast<int>(std::floor(u.y())), 0, kBuckets - 1);
    const Vec2 guess = buckets_[j * kBuckets + i];
    try {
      x = invert_map(map_, y, guess);
      return true;
    } catch (const Error&) {
    }
    // Slow path: the nearest sampled image point.
    Vec2 near = guess;
    double best = INFINITY;
    for (const auto& [pre, img] : lookup_) {
      const double d = (img - y).squaredNorm();
      if (d < best) {
        best = d;
        near = pre;
      }
    }
    try {
      x = invert_map(map_, y, near);
      return true;
    } catch (const Error&) {
      return false;
    }
  }

  ScalarField g_;
  double c_, h_;
  Domain source_;
  PlaneMap map_;
  std::vector<std::pair<Vec2, Vec2>> lookup_;
  static constexpr int kBuckets = 24;
  Vec2 lo_, hi_;
  std::array<Vec2, kBuckets * kBuckets> buckets_;
};

// ---------------------------------------------------------------- potential

class PotentialImpl final : public ScalarField::Impl {
 public:
  PotentialImpl(PlaneMap g, Vec2 base) : g_(std::move(g)), base_(base) {}

  std::string kind() const override { return "potential"; }

  double value(const Vec2& x) const override {
    using boost::math::quadrature::gauss_kronrod;
    auto along_x = [&](double y, double a, double b) {
      if (a == b) return 0.0;
      return gauss_kronrod<double, 15>::integrate([&](double t) { return g_(Vec2(t, y)).x(); }, a, b, 3, 1e-13);
    };
    auto along_y = [&](double xx, double a, double b) {
      if (a == b) return 0.0;
      return gauss_kronrod<double, 15>::integrate([&](double t) { return g_(Vec2(xx, t)).y(); }, a, b, 3, 1e-13);
    };
    const double first = along_x(base_.y(), base_.x(), x.x()) + along_y(x.x(), base_.y(), x.y());
    const double second = along_y(base_.x(), base_.y(), x.y()) + along_x(x.y(), base_.x(), x.x());
    return 0.5 * (first + second);
  }

  FieldSample sample(const Vec2& x) const override {
    const Mat2 j = g_.jacobian(x);
    return {value(x), g_(x), 0.5 * (j + j.transpose())};
  }

  Vec2 gradient(const Vec2& x) const override { return g_(x); }

  Mat2 hessian(const Vec2& x) const override {
    const Mat2 j = g_.jacobian(x);
    return 0.5 * (j + j.transpose());
  }

  json to_json() const override {
    return {{"kind", "potential"}, {"gradient", g_.to_json()}, {"base", vec_json(base_)}};
  }

 private:
  PlaneMap g_;
  Vec2 base_;
};

}  // namespace

Jet ScalarField::Impl::expand(const Vec2& x, int order) const {
  if (order > 2) {
    throw Error(ErrorCode::invalid_argument, "field kind '" + kind() + "' supports Taylor order <= 2 only");
  }
  const FieldSample s = sample(x);
  Jet out(order, s.value);
  if (order >= 1) {
    out(1, 0) = s.gradient.x();
    out(0, 1) = s.gradient.y();
  }
  if (order >= 2) {
    out(2, 0) = 0.5 * s.hessian(0, 0);
    out(0, 2) = 0.5 * s.hessian(1, 1);
    out(1, 1) = s.hessian(0, 1);
  }
  return out;
}

ScalarField::ScalarField() : ScalarField(constant(0.0)) {}

ScalarField ScalarField::polynomial(const Jet& coefficients, const Vec2& center) {
  if (coefficients.order() > kMaxPolynomialDegree) {
    throw Error(ErrorCode::invalid_argument, "polynomial degree exceeds " + std::to_string(kMaxPolynomialDegree));
  }
  return ScalarField(std::make_shared<PolynomialImpl>(coefficients, center));
}

ScalarField ScalarField::constant(double value) { return polynomial(Jet(0, value)); }

ScalarField ScalarField::linear(const Vec2& slope, double offset) {
  Jet j(1, offset);
  j(1, 0) = slope.x();
  j(0, 1) = slope.y();
  return polynomial(j);
}

ScalarField ScalarField::quadratic(const Mat2& q, const Vec2& center) {
  Jet j(2);
  j(2, 0) = 0.5 * q(0, 0);
  j(0, 2) = 0.5 * q(1, 1);
  j(1, 1) = 0.5 * (q(0, 1) + q(1, 0));
  return polynomial(j, center);
}

ScalarField ScalarField::expression(const Expression& e) {
  return ScalarField(std::make_shared<ExpressionImpl>(e));
}

ScalarField ScalarField::parse(const std::string& text) {
  const Expression e = Expression::parse(text);
  if (e.is_polynomial()) {
    const int probe = kMaxPolynomialDegree + 4;
    const Jet j = e.expand(Vec2::Zero(), probe);
    int degree = 0;
    bool too_high = false;
    for (int i = 0; i <= probe; ++i)
      for (int k = 0; i + k <= probe; ++k)
        if (j(i, k) != 0.0) {
          if (i + k > kMaxPolynomialDegree) too_high = true;
          degree = std::max(degree, i + k);
        }
    if (!too_high) return polynomial(j.truncated(degree));
  }
  return expression(e);
}

ScalarField ScalarField::grid(const Vec2& lo, const Vec2& hi, int nx, int ny, std::vector<double> values) {
  return ScalarField(std::make_shared<GridImpl>(lo, hi, nx, ny, std::move(values)));
}

ScalarField ScalarField::affine(const ScalarField& base, double scale, const Vec2& linear, double quadratic,
                                double constant, const Mat2& arg_matrix, const Vec2& arg_offset) {
  const auto* poly = dynamic_cast<const PolynomialImpl*>(base.impl_.get());
  const double det = arg_matrix.determinant();
  if (poly != nullptr && det != 0.0) {
    // Fold into a polynomial about the preimage of the old center.
    const Vec2 center = arg_matrix.inverse() * (poly->center() - arg_offset);
    const int degree = std::max(poly->coefficients().order(), quadratic != 0.0 ? 2 : (linear.isZero() ? 0 : 1));
    Jet d1(degree), d2(degree);
    if (degree >= 1) {
      d1(1, 0) = arg_matrix(0, 0);
      d1(0, 1) = arg_matrix(0, 1);
      d2(1, 0) = arg_matrix(1, 0);
      d2(0, 1) = arg_matrix(1, 1);
    }
    Jet c = Jet(degree) + scale * poly->coefficients().compose(d1, d2);
    // <b, x> + q |x|^2 / 2 + k re-expanded about `center`.
    c(0, 0) += linear.dot(center) + 0.5 * quadratic * center.squaredNorm() + constant;
    if (degree >= 1) {
      c(1, 0) += linear.x() + quadratic * center.x();
      c(0, 1) += linear.y() + quadratic * center.y();
    }
    if (degree >= 2) {
      c(2, 0) += 0.5 * quadratic;
      c(0, 2) += 0.5 * quadratic;
    }
    if (degree <= kMaxPolynomialDegree) return polynomial(c, center);
  }
  return ScalarField(std::make_shared<AffineImpl>(base, scale, linear, quadratic, constant, arg_matrix, arg_offset));
}

ScalarField ScalarField::sum(std::vector<ScalarField> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms.front();
  return ScalarField(std::make_shared<SumImpl>(std::move(terms)));
}

ScalarField ScalarField::second_mirror(const ScalarField& potential, double c, double h, const Domain& source) {
  return ScalarField(std::make_shared<SecondMirrorImpl>(potential, c, h, source));
}

ScalarField ScalarField::potential(const PlaneMap& gradient, const Vec2& base) {
  return ScalarField(std::make_shared<PotentialImpl>(gradient, base));
}

double ScalarField::value(const Vec2& x) const { return impl_->value(x); }
Vec2 ScalarField::gradient(const Vec2& x) const { return impl_->gradient(x); }
Mat2 ScalarField::hessian(const Vec2& x) const { return impl_->hessian(x); }
FieldSample ScalarField::sample(const Vec2& x) const { return impl_->sample(x); }
Jet ScalarField::expand(const Vec2& x, int order) const { return impl_->expand(x, order); }
std::string ScalarField::kind() const { return impl_->kind(); }
int ScalarField::max_order() const { return impl_->max_order(); }

ScalarField ScalarField::operator-() const { return scaled(-1.0); }
ScalarField ScalarField::scaled(double s) const { return affine(*this, s, Vec2::Zero(), 0.0, 0.0); }
ScalarField ScalarField::plus_constant(double k) const { return affine(*this, 1.0, Vec2::Zero(), 0.0, k); }
ScalarField ScalarField::plus_linear(const Vec2& b) const { return affine(*this, 1.0, b, 0.0, 0.0); }

json ScalarField::to_json() const { return impl_->to_json(); }

ScalarField ScalarField::from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "polynomial") {
      const int degree = j.at("degree").get<int>();
      if (degree < 0 || degree > kMaxPolynomialDegree) throw Error(ErrorCode::schema_error, "polynomial degree out of range");
      Jet c(degree);
      for (const auto& t : j.at("coefficients")) {
        const int a = t.at(0).get<int>(), b = t.at(1).get<int>();
        if (a < 0 || b < 0 || a + b > degree) throw Error(ErrorCode::schema_error, "coefficient index out of range");
        c(a, b) = parse_decimal(t.at(2));
      }
      return polynomial(c, vec_from(j.at("center")));
    }
    if (kind == "expression") return expression(Expression::parse(j.at("source").get<std::string>()));
    if (kind == "grid") {
      return grid(vec_from(j.at("lo")), vec_from(j.at("hi")), j.at("nx").get<int>(), j.at("ny").get<int>(),
                  base64_decode(j.at("values").get<std::string>()));
    }
    if (kind == "affine") {
      return ScalarField(std::make_shared<AffineImpl>(
          from_json(j.at("base")), parse_decimal(j.at("scale")), vec_from(j.at("linear")),
          parse_decimal(j.at("quadratic")), parse_decimal(j.at("constant")), mat_from(j.at("arg_matrix")),
          vec_from(j.at("arg_offset"))));
    }
    if (kind == "sum") {
      std::vector<ScalarField> terms;
      for (const auto& t : j.at("terms")) terms.push_back(from_json(t));
      return ScalarField(std::make_shared<SumImpl>(std::move(terms)));
    }
    if (kind == "second_mirror") {
      return second_mirror(from_json(j.at("potential")), parse_decimal(j.at("c")), parse_decimal(j.at("h")),
                           Domain::from_json(j.at("source")));
    }
    if (kind == "potential") return potential(PlaneMap::from_json(j.at("gradient")), vec_from(j.at("base")));
    throw Error(ErrorCode::schema_error, "unknown field kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_error, std::string("malformed field: ") + e.what());
  }
}

}  // namespace periscope
