#include "periscope/export.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace periscope {

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

namespace {

std::vector<Vec2> grid_vertices(const Domain& d, int m, std::vector<bool>& inside) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(m) * m);
  inside.assign(static_cast<std::size_t>(m) * m, true);
  const Box b = d.bounds();
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double u = -1.0 + 2.0 * i / (m - 1), v = -1.0 + 2.0 * j / (m - 1);
      if (d.kind() == Domain::Kind::disc) {
        const Vec2 q(u * std::sqrt(1.0 - 0.5 * v * v), v * std::sqrt(1.0 - 0.5 * u * u));
        pts.push_back(d.disc_center() + d.disc_radius() * q);
      } else if (d.dimension() == 1) {
        const double len = b.hi.x() - b.lo.x();
        pts.emplace_back(b.lo.x() + 0.5 * (u + 1.0) * len, 0.5 * v * len);
      } else {
        const Vec2 p = b.lo + Vec2(0.5 * (u + 1.0) * (b.hi.x() - b.lo.x()), 0.5 * (v + 1.0) * (b.hi.y() - b.lo.y()));
        pts.push_back(p);
        inside[pts.size() - 1] = d.contains(p, 1e-12 * d.scale());
      }
    }
  }
  return pts;
}

}  // namespace

std::string patch_obj(const MirrorPatch& patch, int m) {
  if (m < 2) throw Error(ErrorCode::invalid_argument, "mesh resolution must be >= 2");
  const Domain& d = patch.base_domain();
  std::vector<bool> inside;
  const auto pts = grid_vertices(d, m, inside);
  const bool flat = d.dimension() == 1;
  std::vector<int> index(pts.size(), 0);
  std::ostringstream os;
  os << "o " << patch.id() << "\n";
  int next = 1;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!inside[k]) continue;
    const double z = patch.height().value(flat ? Vec2(pts[k].x(), 0.0) : pts[k]);
    if (!std::isfinite(z)) continue;
    index[k] = next++;
    os << "v " << format_number(pts[k].x()) << " " << format_number(pts[k].y()) << " " << format_number(z) << "\n";
  }
  for (int j = 0; j + 1 < m; ++j) {
    for (int i = 0; i + 1 < m; ++i) {
      const int a = index[j * m + i], b = index[j * m + i + 1], c = index[(j + 1) * m + i + 1],
                e = index[(j + 1) * m + i];
      if (a && b && c && e) os << "f " << a << " " << b << " " << c << " " << e << "\n";
    }
  }
  return os.str();
}

std::string trace_csv(const MirrorSystem& system, const std::vector<TraceResult>& traces) {
  const double z_floor = system.z_min() - 1.0;
  const double z_ceil = system.z_max() + 1.0;
  std::ostringstream os;
  os << "ray_id,bounce_index,x,y,z\n";
  auto row = [&](std::size_t id, std::size_t k, const Vec3& p) {
    os << id << "," << k << "," << format_number(p.x()) << "," << format_number(p.y()) << "," << format_number(p.z())
       << "\n";
  };
  for (std::size_t id = 0; id < traces.size(); ++id) {
    const auto& r = traces[id];
    row(id, 0, lift(r.entry_label, z_floor));
    for (std::size_t k = 0; k < r.vertices.size(); ++k) row(id, k + 1, r.vertices[k]);
    const Vec3 from = r.vertices.empty() ? lift(r.entry_label, z_floor) : r.vertices.back();
    const Vec3& dir = r.exit_direction;
    Vec3 end = from + dir;
    if (dir.z() > 0.0 && from.z() < z_ceil) end = from + (z_ceil - from.z()) / dir.z() * dir;
    if (dir.z() < 0.0 && from.z() > z_floor) end = from + (z_floor - from.z()) / dir.z() * dir;
    row(id, r.vertices.size() + 1, end);
  }
  return os.str();
}

std::string pencil_csv(const std::vector<PencilRow>& rows) {
  std::ostringstream os;
  os << "alpha,beta,xy\n";
  for (const auto& r : rows) os << format_number(r.alpha) << "," << format_number(r.beta) << "," << format_number(r.xy) << "\n";
  return os.str();
}

}  // namespace periscope
