#include "periscope/ellipse.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "periscope/error.hpp"

namespace periscope {

namespace {

void check_angle(double alpha) {
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi)) {
    throw Error(ErrorCode::invalid_argument, "pencil angle must lie in [0, pi]");
  }
}

}  // namespace

EllipseConfig::EllipseConfig(double focal) : c(focal) {
  if (!(focal >= 0.0 && focal < 1.0)) throw Error(ErrorCode::invalid_argument, "focal half-distance must be in [0, 1)");
}

double sines_residual(const EllipseConfig& cfg, double alpha, double beta) {
  return std::abs(std::sin(alpha + beta) - cfg.c * (std::sin(alpha) + std::sin(beta)));
}

double pencil_map_angle(const EllipseConfig& cfg, double alpha) {
  check_angle(alpha);
  // tan(beta / 2) = k / tan(alpha / 2), written with atan2 so both ends are limits.
  const double beta = 2.0 * std::atan2(cfg.mobius_coefficient() * std::cos(0.5 * alpha), std::sin(0.5 * alpha));
  const double res = sines_residual(cfg, alpha, beta);
  if (!(res <= 1e-12)) {
    std::ostringstream os;
    os << "sines residual " << res << " at alpha = " << alpha;
    throw Error(ErrorCode::numerical_failure, os.str());
  }
  return beta;
}

Vec2 ellipse_point(const EllipseConfig& cfg, double alpha) {
  check_angle(alpha);
  const double v = (1.0 - cfg.c * cfg.c) / (1.0 - cfg.c * std::cos(alpha));
  return cfg.focus_a() + v * Vec2(std::cos(alpha), std::sin(alpha));
}

double pencil_map_geometric(const EllipseConfig& cfg, double alpha) {
  const Vec2 p = ellipse_point(cfg, alpha);
  // x^2 + y^2 / (1 - c^2) = 1.
  const Vec2 normal(p.x(), p.y() / (1.0 - cfg.c * cfg.c));
  const Vec2 out = reflect(Vec2(std::cos(alpha), std::sin(alpha)), normal).normalized();
  const Vec2 to_b = cfg.focus_b() - p;
  const double miss = std::abs(out.x() * to_b.y() - out.y() * to_b.x());
  if (!(miss <= 1e-10) || out.dot(to_b) < 0.0) {
    std::ostringstream os;
    os << "reflected ray misses the second focus by " << miss << " at alpha = " << alpha;
    throw Error(ErrorCode::geometric_inconsistency, os.str());
  }
  return std::atan2(p.y(), cfg.c - p.x());
}

MobiusFit mobius_fit(const EllipseConfig& cfg, int samples) {
  if (samples < 3) throw Error(ErrorCode::invalid_argument, "need at least 3 samples");
  MobiusFit fit;
  fit.expected = cfg.mobius_coefficient();
  for (const auto& row : pencil_table(cfg, samples)) {
    fit.coefficient += row.xy;
    fit.max_deviation = std::max(fit.max_deviation, std::abs(row.xy - fit.expected));
  }
  fit.coefficient /= samples;
  return fit;
}

std::vector<PencilRow> pencil_table(const EllipseConfig& cfg, int samples) {
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "need at least one sample");
  std::vector<PencilRow> rows;
  rows.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const double alpha = std::numbers::pi * (k + 0.5) / samples;
    const double beta = pencil_map_angle(cfg, alpha);
    rows.push_back({alpha, beta, std::tan(0.5 * alpha) * std::tan(0.5 * beta)});
  }
  return rows;
}

}  // namespace periscope
