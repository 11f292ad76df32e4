#include "periscope/verifier.hpp"

#include <cmath>
#include <limits>

namespace periscope {

using nlohmann::json;

std::string_view to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::ok: return "ok";
    case TraceStatus::escaped: return "escaped";
    case TraceStatus::superfluous: return "superfluous";
    default: return "max-bounces";
  }
}

namespace {

json point_json(const Vec3& p) { return json::array({p.x(), p.y(), p.z()}); }

bool near_boundary(const Domain& d, const Vec2& p) {
  const double eps = 1e-7 * d.scale();
  return d.contains(p, eps) && !d.contains(p, -eps);
}

// A failed ray is excused only where two different patch domains meet (cell
// edges, touching beams): there the mirror assignment is genuinely ambiguous.
bool is_ambiguous(const MirrorSystem& system, const TraceResult& r, const Vec2& expected_exit) {
  std::vector<Vec2> probes{r.entry_label, expected_exit};
  for (const auto& v : r.vertices) probes.push_back(horizontal(v));
  const auto& patches = system.patches;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const Domain& a = patches[i].base_domain();
    for (const auto& p : probes) {
      if (!near_boundary(a, p)) continue;
      for (std::size_t j = 0; j < patches.size(); ++j) {
        const Domain& b = patches[j].base_domain();
        if (j != i && b.contains(p, 1e-7 * b.scale()) && b.to_json() != a.to_json()) return true;
      }
    }
  }
  return false;
}

}  // namespace

json TraceResult::to_json() const {
  json verts = json::array();
  for (const auto& v : vertices) verts.push_back(point_json(v));
  json extra = json::array();
  for (const auto& h : superfluous_hits) extra.push_back({{"patch", h.patch_id}, {"point", point_json(h.point)}});
  json j = {{"entry_label", {entry_label.x(), entry_label.y()}},
            {"vertices", verts},
            {"patches", patch_indices},
            {"exit_label", {exit_label.x(), exit_label.y()}},
            {"exit_direction", point_json(exit_direction)},
            {"superfluous_hits", extra},
            {"status", to_string(status)},
            {"boundary_ambiguous", boundary_ambiguous}};
  j["path_length_shift"] = std::isfinite(path_length_shift) ? json(path_length_shift) : json(nullptr);
  if (!message.empty()) j["message"] = message;
  return j;
}

TraceResult trace_ray(const MirrorSystem& system, const Vec2& x, const TraceOptions& opts) {
  const double z_floor = system.z_min() - 1.0;
  const double z_ceil = system.z_max() + 1.0;
  const double eps = 1e-9 * system.diameter();

  TraceResult r;
  r.entry_label = x;
  Ray ray(lift(x, z_floor), kUp);
  double t_min = 0.0;
  double length = 0.0;
  bool capped = false;

  for (int segment = 0;; ++segment) {
    std::optional<PatchHit> best;
    int best_index = -1;
    for (std::size_t i = 0; i < system.patches.size(); ++i) {
      std::optional<PatchHit> hit;
      try {
        hit = intersect_ray_patch(ray, system.patches[i], t_min);
      } catch (const Error& e) {
        throw Error(ErrorCode::numerical_failure, "patch '" + system.patches[i].id() + "', segment " +
                                                      std::to_string(segment) + ": " + e.what());
      }
      if (hit && (!best || hit->t < best->t)) {
        best = hit;
        best_index = static_cast<int>(i);
      }
    }
    if (!best) break;
    if (r.bounces() >= opts.max_bounces) {
      capped = true;
      break;
    }
    const auto& patch = system.patches[best_index];
    r.vertices.push_back(best->point);
    r.patch_indices.push_back(best_index);
    if (r.bounces() > system.expected_reflections) r.superfluous_hits.push_back({patch.id(), best->point});
    length += best->t;
    ray = Ray(best->point, reflect(ray.direction, best->normal));
    t_min = eps;
  }

  r.exit_direction = ray.direction;
  if (ray.direction.z() > 0.0 && ray.origin.z() <= z_ceil) {
    const double t = (z_ceil - ray.origin.z()) / ray.direction.z();
    r.exit_label = horizontal(ray.at(t));
    r.path_length_shift = length + t - (z_ceil - z_floor);
  } else {
    r.exit_label = horizontal(ray.origin);
    r.path_length_shift = std::numeric_limits<double>::quiet_NaN();
  }

  if (capped) {
    r.status = TraceStatus::max_bounces;
  } else if (!r.superfluous_hits.empty()) {
    r.status = TraceStatus::superfluous;
  } else if (r.bounces() == system.expected_reflections && (r.exit_direction - kUp).norm() <= 1e-10) {
    r.status = TraceStatus::ok;
  } else {
    r.status = TraceStatus::escaped;
  }
  return r;
}

std::vector<Vec2> verification_labels(const Domain& entry, int samples) {
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "samples must be >= 1");
  std::vector<Vec2> labels = halton_points(entry, samples);
  for (const auto& p : entry.boundary_points(16)) labels.push_back(p);
  return labels;
}

VerificationReport verify_system(const MirrorSystem& system, const PlaneMap& expected, int samples, double tol) {
  VerificationReport rep;
  rep.tolerance = tol;
  rep.expected_reflections = system.expected_reflections;
  const auto labels = verification_labels(system.entry_domain, samples);
  rep.sample_count = static_cast<int>(labels.size());

  const double map_tol = tol * std::max(1.0, system.exit_domain.scale());
  std::map<std::vector<int>, std::pair<double, double>> tau_range;
  double tau_sum = 0.0;
  int ok_count = 0;
  for (const auto& x : labels) {
    TraceResult r;
    try {
      r = trace_ray(system, x);
    } catch (const Error& e) {
      r.entry_label = x;
      r.status = TraceStatus::escaped;
      r.message = e.what();
    }
    rep.reflection_histogram[r.bounces()] += 1;
    rep.superfluous_hit_count += static_cast<int>(r.superfluous_hits.size());
    const Vec2 want = expected(x);
    const bool ok = r.status == TraceStatus::ok;
    const double err = ok ? (r.exit_label - want).norm() : INFINITY;
    if (err > map_tol && is_ambiguous(system, r, want)) {
      r.boundary_ambiguous = true;
      rep.boundary_ambiguous.push_back(std::move(r));
    } else if (ok) {
      ++ok_count;
      rep.max_map_error = std::max(rep.max_map_error, err);
      auto [it, fresh] = tau_range.try_emplace(r.patch_indices, r.path_length_shift, r.path_length_shift);
      if (!fresh) {
        it->second.first = std::min(it->second.first, r.path_length_shift);
        it->second.second = std::max(it->second.second, r.path_length_shift);
      }
      tau_sum += r.path_length_shift;
    } else {
      rep.failures.push_back(std::move(r));
    }
  }
  for (const auto& [sig, range] : tau_range)
    rep.path_constant_spread = std::max(rep.path_constant_spread, range.second - range.first);
  rep.mean_path_length_shift = ok_count > 0 ? tau_sum / ok_count : 0.0;
  const double spread_tol = tol * std::max(1.0, std::abs(rep.mean_path_length_shift));
  rep.passed = ok_count > 0 && rep.failures.empty() && rep.max_map_error <= map_tol &&
               rep.path_constant_spread <= spread_tol;
  return rep;
}

json VerificationReport::to_json() const {
  json hist = json::object();
  for (const auto& [k, v] : reflection_histogram) hist[std::to_string(k)] = v;
  json fail = json::array();
  for (const auto& f : failures) fail.push_back(f.to_json());
  json amb = json::array();
  for (const auto& f : boundary_ambiguous) amb.push_back(f.to_json());
  return {{"passed", passed},
          {"sample_count", sample_count},
          {"expected_reflections", expected_reflections},
          {"tolerance", tolerance},
          {"max_map_error", max_map_error},
          {"path_constant_spread", path_constant_spread},
          {"mean_path_length_shift", mean_path_length_shift},
          {"reflection_histogram", hist},
          {"superfluous_hit_count", superfluous_hit_count},
          {"failures", fail},
          {"boundary_ambiguous", amb}};
}

std::pair<double, double> measure_time_shift(const MirrorSystem& system, int samples) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  const auto labels = halton_points(system.entry_domain, samples);
  for (const auto& x : labels) {
    const TraceResult r = trace_ray(system, x);
    if (r.status != TraceStatus::ok) {
      throw Error(ErrorCode::trace_failure, "ray at (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                                                ") ended with status " + std::string(to_string(r.status)));
    }
    lo = std::min(lo, r.path_length_shift);
    hi = std::max(hi, r.path_length_shift);
    sum += r.path_length_shift;
  }
  if (labels.empty()) return {0.0, 0.0};
  return {sum / labels.size(), hi - lo};
}

}  // namespace periscope
