// periscope: synthesize, realize and check mirror systems from the command line.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or input error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "periscope/calculus.hpp"
#include "periscope/composer.hpp"
#include "periscope/decomposition.hpp"
#include "periscope/ellipse.hpp"
#include "periscope/export.hpp"
#include "periscope/scene.hpp"
#include "periscope/two_mirror.hpp"
#include "periscope/verifier.hpp"

using namespace periscope;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct Globals {
  std::optional<double> tol;
  bool seed_free = false;
  bool strict_schema = false;
  std::string out;
};

std::vector<double> numbers(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::parse_error, "bad number '" + item + "' in " + what);
    }
  }
  return v;
}

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::parse_error, "expected kind:values, got '" + spec + "'");
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

Domain parse_domain(const std::string& spec) {
  const auto [kind, rest] = split_spec(spec);
  const auto v = numbers(rest, "domain '" + spec + "'");
  if (kind == "disc" && v.size() == 3) return Domain::disc({v[0], v[1]}, v[2]);
  if (kind == "interval" && v.size() == 2) return Domain::interval(v[0], v[1]);
  if (kind == "rect" && v.size() == 4) return Domain::rectangle({v[0], v[1]}, {v[2], v[3]});
  if (kind == "polygon" && v.size() >= 6 && v.size() % 2 == 0) {
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < v.size(); i += 2) pts.emplace_back(v[i], v[i + 1]);
    return Domain::polygon(std::move(pts));
  }
  throw Error(ErrorCode::parse_error, "unrecognized domain '" + spec +
                                          "' (use disc:cx,cy,r, interval:a,b, rect:x0,y0,x1,y1 or polygon:x,y,...)");
}

PlaneMap parse_map(const std::string& spec, const Domain& source) {
  const auto [kind, rest] = split_spec(spec);
  if (kind == "expr") {
    const auto semi = rest.find(';');
    if (semi == std::string::npos) throw Error(ErrorCode::parse_error, "expr: needs two components separated by ';'");
    return PlaneMap::analytic(ScalarField::parse(rest.substr(0, semi)), ScalarField::parse(rest.substr(semi + 1)),
                              source);
  }
  const auto v = numbers(rest, "map '" + spec + "'");
  if (kind == "linear" && (v.size() == 4 || v.size() == 6)) {
    Mat2 m;
    m << v[0], v[1], v[2], v[3];
    const Vec2 b = v.size() == 6 ? Vec2(v[4], v[5]) : Vec2::Zero();
    return PlaneMap::linear(m, b, source);
  }
  if (kind == "translate" && v.size() == 2) return PlaneMap::translation({v[0], v[1]}, source);
  if (kind == "rotation" && v.size() == 1) return PlaneMap::rotation(v[0], source);
  throw Error(ErrorCode::parse_error, "unrecognized map '" + spec +
                                          "' (use linear:a,b,c,d[,e,f], translate:a1,a2, rotation:angle or expr:F1;F2)");
}

Vec2 parse_point(const std::string& text) {
  const auto v = numbers(text, "point");
  if (v.size() != 2) throw Error(ErrorCode::parse_error, "a point needs two coordinates");
  return {v[0], v[1]};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

void report_summary(const VerificationReport& rep) {
  std::cerr << (rep.passed ? "PASS" : "FAIL") << ": " << rep.sample_count << " rays, max map error "
            << rep.max_map_error << ", path constant spread " << rep.path_constant_spread << ", "
            << rep.failures.size() << " failures, " << rep.boundary_ambiguous.size() << " boundary-ambiguous\n";
}

const SceneSystem& pick(const SceneDocument& doc, int index) {
  if (index < 0 || index >= static_cast<int>(doc.systems.size())) {
    throw Error(ErrorCode::invalid_argument, "scene has no system " + std::to_string(index));
  }
  return doc.systems[index];
}

PlaneMap expected_map(const MirrorSystem& sys, const std::string& map_spec) {
  if (!map_spec.empty()) return parse_map(map_spec, sys.entry_domain);
  if (sys.metadata.contains("expected_map")) return PlaneMap::from_json(sys.metadata.at("expected_map"));
  throw Error(ErrorCode::invalid_argument, "no --map given and the scene records no expected map");
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse_error:
    case ErrorCode::schema_error:
    case ErrorCode::invalid_argument:
    case ErrorCode::io_error:
    case ErrorCode::precondition:
    case ErrorCode::placement_failure:
      return kUsage;
    case ErrorCode::verification_failed:
    case ErrorCode::c_too_small:
    case ErrorCode::inconsistent_system:
    case ErrorCode::trace_failure:
      return kFail;
    default:
      return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mirror systems realizing maps of parallel beams"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "Verification tolerance");
  app.add_flag("--seed-free", g.seed_free, "Reserved; all numerics are deterministic");
  app.add_flag("--strict-schema", g.strict_schema, "Reject unknown fields in scene files");
  app.add_option("--out", g.out, "Output file (directory for export); stdout when omitted");

  std::string potential, domain_spec, map_spec, report_path, scene_path, point_spec;
  std::optional<double> c_opt, flip_c, radius;
  double h = 0.0, ellipse_c = 0.0;
  int samples = 1000, partition = 1, degree = 8, mesh = 65, rays = 0, system_index = 0;
  bool force4 = false, force6 = false, geometric = false;

  auto* syn = app.add_subcommand("synthesize", "Two mirrors for x -> x + grad G(x)");
  syn->add_option("--potential", potential, "G(x1, x2)")->required();
  syn->add_option("--domain", domain_spec, "Entry domain D1")->required();
  syn->add_option("--c", c_opt, "Path constant");
  syn->add_option("--height", h, "Height offset of the first mirror");
  syn->add_option("--samples", samples, "Verification rays");
  syn->add_option("--report", report_path, "Report JSON path");

  auto* rea = app.add_subcommand("realize", "Four or six reflections for a planar map");
  rea->add_option("--map", map_spec, "Map spec")->required();
  rea->add_option("--domain", domain_spec, "Entry domain D1")->required();
  rea->add_option("--partition", partition, "Grid cells per side");
  rea->add_option("--flip-c", flip_c, "Parameter of the flip cylinders");
  rea->add_option("--samples", samples, "Verification rays");
  rea->add_option("--report", report_path, "Report JSON path");
  rea->add_flag("--force-4", force4, "Use the four-reflection pipeline regardless of orientation");
  rea->add_flag("--force-6", force6, "Use the six-reflection pipeline");

  auto* dec = app.add_subcommand("decompose", "Local factorization into two gradient maps");
  dec->add_option("--map", map_spec, "Map spec")->required();
  dec->add_option("--point", point_spec, "x1,x2")->required();
  dec->add_option("--degree", degree, "Taylor degree of u");
  dec->add_option("--radius", radius, "Initial radius");

  auto* tra = app.add_subcommand("trace", "Ray paths as CSV");
  tra->add_option("--scene", scene_path, "Scene JSON")->required();
  tra->add_option("--samples", samples, "Rays");
  tra->add_option("--system", system_index, "System index in the scene");

  auto* ver = app.add_subcommand("verify", "Trace and compare with the expected map");
  ver->add_option("--scene", scene_path, "Scene JSON")->required();
  ver->add_option("--map", map_spec, "Expected map; defaults to the one recorded in the scene");
  ver->add_option("--samples", samples, "Rays");
  ver->add_option("--system", system_index, "System index in the scene");

  auto* inv = app.add_subcommand("invert", "Mirror a scene in z = 0");
  inv->add_option("--scene", scene_path, "Scene JSON")->required();

  auto* exp = app.add_subcommand("export", "OBJ meshes and ray CSV");
  exp->add_option("--scene", scene_path, "Scene JSON")->required();
  exp->add_option("--mesh", mesh, "Vertices per side");
  exp->add_option("--rays", rays, "Rays to trace into rays.csv");

  auto* ell = app.add_subcommand("ellipse", "Pencil map of an ellipse as CSV");
  ell->add_option("--c", ellipse_c, "Focal half-distance in [0, 1)")->required();
  ell->add_option("--samples", samples, "Angles");
  ell->add_flag("--geometric", geometric, "Trace the reflection instead of the closed form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (*syn) {
      const Domain d1 = parse_domain(domain_spec);
      const ScalarField gfield = ScalarField::parse(potential);
      SynthesisOptions opts;
      opts.verify_samples = samples;
      opts.tolerance = g.tol.value_or(1e-8);
      MirrorSystem sys = synthesize_two_mirror({gfield, d1, c_opt, h}, opts);
      const PlaneMap expected = PlaneMap::gradient_of(gfield, true, d1);
      sys.metadata["expected_map"] = expected.to_json();
      const VerificationReport rep = verify_system(sys, expected, samples, opts.tolerance);
      emit(g.out, scene_of(sys, "two-mirror").serialize());
      if (!report_path.empty()) write_text(report_path, rep.to_json().dump(2) + "\n");
      report_summary(rep);
      return rep.passed ? kPass : kFail;
    }
    if (*rea) {
      const Domain d1 = parse_domain(domain_spec);
      const PlaneMap f = parse_map(map_spec, d1);
      RealizeOptions opts;
      opts.partition = partition;
      opts.flip_c = flip_c;
      opts.verify_samples = samples;
      opts.tolerance = g.tol.value_or(1e-6);
      Realization r;
      if (force4) {
        opts.check_orientation = false;
        try {
          r = realize_orientation_reversing(f, d1, opts);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::not_hyperbolic) throw;
          std::cerr << "error: " << e.what() << "\n"
                    << "hint: where (tr Df)^2 = 4 det Df the map has no local factorization into two gradient maps "
                       "with nondegenerate Hessians, e.g. e^x2 (x1, x2) at the origin; drop --force-4 so an "
                       "orientation-preserving map goes through the six-reflection pipeline\n";
          return kNumerical;
        }
      } else if (force6) {
        r = realize_orientation_preserving(f, d1, opts);
      } else {
        if (const auto w = orientation_witnesses(f, d1)) {
          std::ostringstream os;
          os << "orientation is mixed on the domain: det Df > 0 at (" << w->first.x() << ", " << w->first.y()
             << ") and det Df < 0 at (" << w->second.x() << ", " << w->second.y() << ")";
          throw Error(ErrorCode::precondition, os.str());
        }
        r = orientation(f, d1) == Orientation::reversing ? realize_orientation_reversing(f, d1, opts)
                                                         : realize_orientation_preserving(f, d1, opts);
      }
      r.system.metadata["expected_map"] = f.to_json();
      r.system.metadata["plan"] = r.plan.to_json();
      emit(g.out, scene_of(r.system, "realization").serialize());
      if (!report_path.empty()) write_text(report_path, r.report.to_json().dump(2) + "\n");
      report_summary(r.report);
      return kPass;
    }
    if (*dec) {
      const Vec2 x0 = parse_point(point_spec);
      const PlaneMap f = parse_map(map_spec, Domain::disc(x0, 1.0));
      DecomposeOptions opts;
      opts.degree = degree;
      opts.initial_radius = radius;
      if (g.tol) opts.tolerance = *g.tol;
      const DecompositionResult res = decompose_local(f, x0, opts);
      emit(g.out, res.to_json().dump(2) + "\n");
      return kPass;
    }
    if (*tra) {
      const SceneDocument doc = read_scene(scene_path, g.strict_schema);
      const MirrorSystem& sys = pick(doc, system_index).system;
      std::vector<TraceResult> traces;
      for (const auto& x : halton_points(sys.entry_domain, samples)) traces.push_back(trace_ray(sys, x));
      emit(g.out, trace_csv(sys, traces));
      return kPass;
    }
    if (*ver) {
      const SceneDocument doc = read_scene(scene_path, g.strict_schema);
      const MirrorSystem& sys = pick(doc, system_index).system;
      const VerificationReport rep = verify_system(sys, expected_map(sys, map_spec), samples, g.tol.value_or(1e-8));
      emit(g.out, rep.to_json().dump(2) + "\n");
      report_summary(rep);
      return rep.passed ? kPass : kFail;
    }
    if (*inv) {
      SceneDocument doc = read_scene(scene_path, g.strict_schema);
      for (auto& s : doc.systems) {
        s.system = invert_system(s.system);
        s.system.metadata.erase("expected_map");
        s.patch_extras.clear();
      }
      emit(g.out, doc.serialize());
      return kPass;
    }
    if (*exp) {
      const SceneDocument doc = read_scene(scene_path, g.strict_schema);
      const std::filesystem::path dir = g.out.empty() ? std::filesystem::path(".") : std::filesystem::path(g.out);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string());
      for (std::size_t i = 0; i < doc.systems.size(); ++i) {
        const auto& s = doc.systems[i];
        const std::string stem = s.name.empty() ? "system" + std::to_string(i) : s.name;
        for (const auto& p : s.system.patches) write_text((dir / (stem + "_" + p.id() + ".obj")).string(), patch_obj(p, mesh));
        if (rays > 0) {
          std::vector<TraceResult> traces;
          for (const auto& x : halton_points(s.system.entry_domain, rays)) traces.push_back(trace_ray(s.system, x));
          write_text((dir / (stem + "_rays.csv")).string(), trace_csv(s.system, traces));
        }
      }
      return kPass;
    }
    if (*ell) {
      const EllipseConfig cfg(ellipse_c);
      auto rows = pencil_table(cfg, samples);
      if (geometric) {
        for (auto& r : rows) {
          r.beta = pencil_map_geometric(cfg, r.alpha);
          r.xy = std::tan(0.5 * r.alpha) * std::tan(0.5 * r.beta);
        }
      }
      emit(g.out, pencil_csv(rows));
      return kPass;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
