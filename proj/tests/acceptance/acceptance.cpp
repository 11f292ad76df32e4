// One PASS/FAIL line per acceptance criterion. Expected values come from
// oracles written here (monomial differentiation, closed-form mirror heights,
// triangle relations), not from the library's own evaluators.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "periscope/calculus.hpp"
#include "periscope/composer.hpp"
#include "periscope/decomposition.hpp"
#include "periscope/ellipse.hpp"
#include "periscope/export.hpp"
#include "periscope/scene.hpp"
#include "periscope/two_mirror.hpp"

using namespace periscope;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// sum a(i, j) x1^i x2^j with i + j <= 4, differentiated by hand.
struct Poly4 {
  double a[5][5] = {};

  double value(const Vec2& x) const {
    double s = 0;
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; i + j <= 4; ++j) s += a[i][j] * std::pow(x.x(), i) * std::pow(x.y(), j);
    return s;
  }
  Vec2 gradient(const Vec2& x) const {
    Vec2 g = Vec2::Zero();
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; i + j <= 4; ++j) {
        if (i > 0) g.x() += i * a[i][j] * std::pow(x.x(), i - 1) * std::pow(x.y(), j);
        if (j > 0) g.y() += j * a[i][j] * std::pow(x.x(), i) * std::pow(x.y(), j - 1);
      }
    return g;
  }
  Mat2 hessian(const Vec2& x) const {
    Mat2 h = Mat2::Zero();
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; i + j <= 4; ++j) {
        if (i > 1) h(0, 0) += i * (i - 1) * a[i][j] * std::pow(x.x(), i - 2) * std::pow(x.y(), j);
        if (j > 1) h(1, 1) += j * (j - 1) * a[i][j] * std::pow(x.x(), i) * std::pow(x.y(), j - 2);
        if (i > 0 && j > 0) h(0, 1) += i * j * a[i][j] * std::pow(x.x(), i - 1) * std::pow(x.y(), j - 1);
      }
    h(1, 0) = h(0, 1);
    return h;
  }
  ScalarField field() const {
    Jet jet(4);
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; i + j <= 4; ++j) jet(i, j) = a[i][j];
    return ScalarField::polynomial(jet);
  }
};

struct Case {
  std::string name;
  std::function<Vec2(const Vec2&)> g;  // oracle displacement
  MirrorSystem system;
  double c = 0.0;
  bool curved = true;
  TwoMirrorSpec spec;
};

// Potentials with random coefficients in [-0.3, 0.3]; D1 is a disc placed
// where |grad P| >= 0.5 and I + Hess P is safely positive definite, with a
// radius small against the displacement so D1 and its image are disjoint.
std::vector<Case> random_cases(int count, int* redraws) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coef(-0.3, 0.3), pos(-3.0, 3.0);
  std::vector<Case> out;
  *redraws = 0;
  while (static_cast<int>(out.size()) < count) {
    auto poly = std::make_shared<Poly4>();
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; i + j <= 4; ++j) poly->a[i][j] = coef(rng);
    bool placed = false;
    for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
      Vec2 p(pos(rng), pos(rng));
      const Vec2 g = poly->gradient(p);
      const double lo = (Mat2::Identity() + poly->hessian(p)).selfadjointView<Eigen::Upper>().eigenvalues().minCoeff();
      if (g.norm() < 0.5 || lo < 0.2) continue;
      const double r = std::min(0.2, g.norm() / 4);
      // x + g must stay a convex-potential gradient over the whole disc, not just at p.
      bool convex = true;
      for (int a = -4; a <= 4 && convex; ++a)
        for (int b = -4; b <= 4 && convex; ++b) {
          const Vec2 q = p + r * Vec2(a, b) / 4.0;
          if ((q - p).norm() > r) continue;
          const Mat2 m = Mat2::Identity() + poly->hessian(q);
          convex = m.selfadjointView<Eigen::Upper>().eigenvalues().minCoeff() >= 0.1;
        }
      if (!convex) continue;
      TwoMirrorSpec spec{poly->field(), Domain::disc(p, r), std::nullopt, 0.0};
      try {
        SynthesisOptions opts;
        opts.tolerance = 1e-8;
        MirrorSystem sys = synthesize_two_mirror(spec, opts);
        Case k;
        k.name = "random " + std::to_string(out.size());
        k.g = [poly](const Vec2& x) { return poly->gradient(x); };
        k.c = sys.path_constants.at(0);
        k.system = std::move(sys);
        k.spec = spec;
        k.spec.c = k.c;
        out.push_back(std::move(k));
        placed = true;
      } catch (const Error&) {
        continue;
      }
    }
    if (!placed) ++*redraws;
  }
  return out;
}

Case translation_case() {
  Case k;
  k.name = "translation";
  k.g = [](const Vec2&) { return Vec2(3, 0); };
  k.spec = {ScalarField::parse("3*x1"), Domain::disc(Vec2::Zero(), 1.0), 2.0, 0.0};
  k.system = synthesize_two_mirror(k.spec);
  k.c = 2.0;
  k.curved = false;
  return k;
}

// h = -c/2 puts the mirrors at z = (|x|^2 - c^2) / (2c) and (|y|^2 - c^2 k^2) / (2ck).
Case dilation_case() {
  Case k;
  k.name = "dilation";
  k.g = [](const Vec2& x) { return x; };
  const Domain d1 = Domain::disc(Vec2(3, 0), 1.0);
  const ScalarField g = ScalarField::parse("0.5*(x1^2+x2^2)");
  const double c = choose_path_constant(displacement_of(g, d1), d1);
  k.spec = {g, d1, c, -c / 2};
  k.system = synthesize_two_mirror(k.spec);
  k.c = k.system.path_constants.at(0);
  return k;
}

struct RoundTrip {
  double map_error = 0.0;
  double spread = 0.0;
  int wrong_count = 0;
  int superfluous = 0;
  int rays = 0;
  // Labels where the closed beams D1 and D2 touch; the mirror hit there is a tie.
  int contact = 0;
};

bool at_contact(const Case& k, const Vec2& x) {
  const Domain& d1 = k.system.entry_domain;
  const Domain& d2 = k.system.exit_domain;
  const Vec2 y = x + k.g(x);
  const double e1 = 1e-7 * d1.scale(), e2 = 1e-7 * d2.scale();
  return (d2.contains(x, e2) && d1.contains(x, e1)) || (d1.contains(y, e1) && d2.contains(y, e2));
}

RoundTrip trace_against_oracle(const Case& k, int samples) {
  RoundTrip rt;
  double lo = INFINITY, hi = -INFINITY;
  for (const Vec2& x : verification_labels(k.system.entry_domain, samples)) {
    const TraceResult r = trace_ray(k.system, x);
    ++rt.rays;
    if ((r.status != TraceStatus::ok || r.bounces() != 2 || !r.superfluous_hits.empty()) && at_contact(k, x)) {
      ++rt.contact;
      continue;
    }
    rt.superfluous += static_cast<int>(r.superfluous_hits.size());
    if (r.status != TraceStatus::ok || r.bounces() != 2) {
      ++rt.wrong_count;
      continue;
    }
    rt.map_error = std::max(rt.map_error, (r.exit_label - (x + k.g(x))).norm());
    lo = std::min(lo, r.path_length_shift);
    hi = std::max(hi, r.path_length_shift);
  }
  rt.spread = hi - lo;
  return rt;
}

std::vector<Vec3> obj_vertices(const std::string& obj) {
  std::vector<Vec3> out;
  std::istringstream in(obj);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("v ", 0) != 0) continue;
    std::istringstream ls(line.substr(2));
    Vec3 v;
    ls >> v.x() >> v.y() >> v.z();
    out.push_back(v);
  }
  return out;
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

namespace {

void criterion_round_trip(Outcome& o, const std::vector<Case>& randoms, int redraws) {
  double err = 0, rel_spread = 0, trace_time = 0;
  int wrong = 0, superfluous = 0;
  for (const Case& k : randoms) {
    const auto t0 = std::chrono::steady_clock::now();
    const RoundTrip rt = trace_against_oracle(k, 1000);
    trace_time += seconds_since(t0);
    err = std::max(err, rt.map_error);
    rel_spread = std::max(rel_spread, rt.spread / k.c);
    wrong += rt.wrong_count + rt.contact;
    superfluous += rt.superfluous;
  }
  o.detail << randoms.size() << " systems (" << redraws << " potentials redrawn), max map error " << err
           << ", max spread/c " << rel_spread << ", rays without exactly 2 reflections " << wrong
           << ", superfluous hits " << superfluous << ", tracing " << trace_time << " s";
  o.require(randoms.size() == 50, "50 systems");
  o.require(err <= 1e-8, "map error <= 1e-8");
  o.require(rel_spread <= 1e-9, "spread <= 1e-9 c");
  o.require(wrong == 0 && superfluous == 0, "exactly 2 reflections, no superfluous hits");
  o.require(trace_time <= 5.0, "runtime <= 5 s");
}

void criterion_worked_examples(Outcome& o, const Case& tr, const Case& dil) {
  double err = 0, rel_spread = 0;
  int bad = 0, contact = 0;
  for (const Case* k : {&tr, &dil}) {
    const RoundTrip rt = trace_against_oracle(*k, 1000);
    err = std::max(err, rt.map_error);
    rel_spread = std::max(rel_spread, rt.spread / k->c);
    bad += rt.wrong_count + rt.superfluous;
    contact += rt.contact;
  }
  const double c = dil.c;
  const std::vector<std::function<double(const Vec2&)>> closed = {
      [](const Vec2& x) { return 1.5 * x.x(); },
      [](const Vec2& y) { return 1.5 * (y.x() - 3) + 1.25; },
      [c](const Vec2& x) { return (x.squaredNorm() - c * c) / (2 * c); },
      [c](const Vec2& y) { return (y.squaredNorm() - c * c * 4) / (2 * c * 2); },
  };
  const std::vector<const MirrorPatch*> patches = {&tr.system.patches[0], &tr.system.patches[1],
                                                   &dil.system.patches[0], &dil.system.patches[1]};
  double mesh = 0;
  std::size_t vertices = 0;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    for (const Vec3& v : obj_vertices(patch_obj(*patches[i]))) {
      mesh = std::max(mesh, std::abs(v.z() - closed[i](Vec2(v.x(), v.y()))));
      ++vertices;
    }
  }
  o.detail << "map error " << err << ", spread/c " << rel_spread << ", mesh deviation from planes/paraboloids " << mesh
           << " over " << vertices << " vertices; " << contact
           << " labels at the point where D1 and D2 touch excluded";
  o.require(contact <= 4, "only isolated contact labels excluded");
  o.require(err <= 1e-8 && rel_spread <= 1e-9 && bad == 0, "criterion 1 checks");
  o.require(mesh <= 1e-10 && vertices > 0, "meshes within 1e-10");
}

MirrorSystem raised_second(const MirrorSystem& s, double dz) {
  MirrorSystem out = s;
  out.patches[1] = MirrorPatch(s.patches[1].base_domain(), s.patches[1].height().plus_constant(dz), "phi2");
  return out;
}

// Raising Phi2 by d slides A2 back along the middle segment by d, so the traced
// constant becomes c - d (1 - dz) with dz = (|g|^2 - c^2) / (|g|^2 + c^2) the
// vertical component of that segment. The spread is d times the range of dz.
double predicted_spread(const Case& k, double dz, int samples) {
  double lo = INFINITY, hi = -INFINITY;
  for (const Vec2& x : halton_points(k.system.entry_domain, samples)) {
    const double g2 = k.g(x).squaredNorm(), c2 = k.c * k.c;
    const double v = (g2 - c2) / (g2 + c2);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return dz * (hi - lo);
}

// Dilation g(x) = x with an explicit small c, so the middle segments tilt widely.
Case steep_dilation_case() {
  Case k;
  k.name = "steep dilation";
  k.g = [](const Vec2& x) { return x; };
  k.spec = {ScalarField::parse("0.5*(x1^2+x2^2)"), Domain::disc(Vec2(1.6, 0), 0.5), 1.5, 0.0};
  SynthesisOptions opts;
  opts.max_doublings = 0;
  opts.verify_samples = 2000;
  k.system = synthesize_two_mirror(k.spec, opts);
  k.c = 1.5;
  return k;
}

void criterion_necessity(Outcome& o, const std::vector<const Case*>& cases) {
  const double dz = 1e-2;
  double residual = 0, potential_err = 0, min_spread = INFINITY, prediction_err = 0;
  int rejected = 0, curved = 0;
  const Case steep = steep_dilation_case();
  std::vector<const Case*> all = cases;
  all.push_back(&steep);
  for (const Case* k : all) {
    const GradientRecovery rec = recover_gradient(k->system, 256);
    residual = std::max(residual, rec.residual);
    for (const Vec2& x : halton_points(k->system.entry_domain, 32)) {
      potential_err = std::max(potential_err, (rec.potential.gradient(x) - k->g(x)).norm());
    }
    if (!k->curved) continue;
    ++curved;
    const MirrorSystem bent = raised_second(k->system, dz);
    const double spread = recover_gradient_report(bent, 256).path_constant_spread;
    const double predicted = predicted_spread(*k, dz, 256);
    prediction_err = std::max(prediction_err, std::abs(spread - predicted) / predicted);
    if (k != &steep) min_spread = std::min(min_spread, spread);
    try {
      recover_gradient(bent, 256);
    } catch (const Error& e) {
      rejected += e.code() == ErrorCode::inconsistent_system;
    }
  }
  const double steep_spread = recover_gradient_report(raised_second(steep.system, dz), 256).path_constant_spread;
  o.detail << all.size() << " systems, max residual |g - c grad Phi1| " << residual << ", recovered grad G error "
           << potential_err << "; Phi2 + 1e-2 on " << curved << " curved systems: " << rejected
           << " rejected, spread on the c = 1.5 dilation " << steep_spread << ", min spread on default-c systems "
           << min_spread << " (matches d * range(dz) to " << prediction_err << " relative)";
  o.require(residual <= 1e-8 && potential_err <= 1e-8, "residual <= 1e-8");
  o.require(rejected == curved, "perturbed systems rejected");
  o.require(steep_spread >= 5e-3, "perturbed spread >= 5e-3");
}

void criterion_identities(Outcome& o, const std::vector<const Case*>& cases) {
  double slope = 0, sides = 0, constant = 0;
  long rays = 0;
  int bad = 0;
  for (const Case* k : cases) {
    const double c = k->c;
    for (const Vec2& x : halton_points(k->system.entry_domain, 1000)) {
      const TraceResult r = trace_ray(k->system, x);
      if (r.status != TraceStatus::ok || r.bounces() != 2) {
        ++bad;
        continue;
      }
      ++rays;
      const Vec2 g = k->g(x);
      const double m = g.norm();
      const Vec3 a1 = r.vertices[0], a2 = r.vertices[1];
      const Vec3 a0(a2.x(), a2.y(), a1.z());
      slope = std::max(slope, std::abs(segment_slope(a1, a2) - (m * m - c * c) / (2 * c * m)));
      const double e01 = (a1 - a0).norm(), e12 = (a2 - a1).norm(), e02 = (a2 - a0).norm();
      sides = std::max({sides, std::abs(e01 - m) / m, std::abs(e12 - (c * c + m * m) / (2 * c)) / e12,
                        std::abs(e02 - std::abs(c * c - m * m) / (2 * c)) / std::max(e02, 1e-300)});
      // |A1A2| + |A0A2| when A2 is below A1, |A1A2| - |A0A2| otherwise.
      const double signed02 = a1.z() >= a2.z() ? e02 : -e02;
      constant = std::max(constant, std::abs(e12 + signed02 - c) / c);
    }
  }
  o.detail << rays << " rays over " << cases.size() << " systems, slope error " << slope
           << ", max relative side error " << sides << ", |A1A2| +- |A0A2| vs c relative " << constant;
  o.require(bad == 0 && rays >= 1000, "all rays traced");
  o.require(slope <= 1e-10, "slope <= 1e-10");
  o.require(sides <= 1e-9, "sides <= 1e-9 relative");
  o.require(constant <= 1e-9, "path constant <= 1e-9 c");
}

void criterion_legendre(Outcome& o, const std::vector<const Case*>& cases) {
  double library = 0, direct = 0;
  int checked = 0;
  for (const Case* k : cases) {
    const LegendreResult r = legendre_check(k->spec, 100);
    library = std::max(library, r.max_residual);
    checked += r.checked;
    const double c = k->c;
    const ScalarField& phi1 = k->system.patches[0].height();
    const ScalarField& phi2 = k->system.patches[1].height();
    for (const Vec2& x : halton_points(k->system.entry_domain, 100)) {
      const Vec2 y = -x - k->g(x);
      const double psi1 = -0.5 * x.squaredNorm() + 0.25 * c * c - c * phi1.value(x);
      const double psi2 = -0.5 * y.squaredNorm() + 0.25 * c * c + c * phi2.value(-y);
      const Vec2 grad_psi1 = -x - c * phi1.gradient(x);
      direct = std::max(direct, (y - grad_psi1).norm() + std::abs(psi2 - (x.dot(y) - psi1)));
    }
  }
  o.detail << cases.size() << " specs, " << checked << " samples, legendre_check " << library
           << ", direct evaluation on the mirrors " << direct;
  o.require(checked == 100 * static_cast<int>(cases.size()), "no skipped samples");
  o.require(library <= 1e-9 && direct <= 1e-9, "residual <= 1e-9");
}

void criterion_linear_oracle(Outcome& o) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> entry(-2, 2), logdet(std::log(1e-3), std::log(10.0));
  double reassembly = 0, asym = 0, agreement = 0;
  int failures = 0;
  const Domain d = Domain::disc(Vec2::Zero(), 1.0);
  for (int n = 0; n < 1000; ++n) {
    Mat2 f;
    do {
      f << entry(rng), entry(rng), entry(rng), entry(rng);
    } while (std::abs(f.determinant()) < 1e-2);
    if (f.determinant() > 0) f.col(0).swap(f.col(1));
    f *= std::sqrt(std::exp(logdet(rng)) / -f.determinant());
    const LinearFactors lf = factor_linear(f);
    reassembly = std::max(reassembly, (lf.s2 * lf.s1 - f).norm());
    asym = std::max({asym, std::abs(lf.s1(0, 1) - lf.s1(1, 0)), std::abs(lf.s2(0, 1) - lf.s2(1, 0))});
    try {
      const PlaneMap map = PlaneMap::linear(f, Vec2::Zero(), d);
      const DecompositionResult r = decompose_local(map, Vec2::Zero());
      const Mat2 s2inv = lf.s2.inverse();
      const Vec2 p0 = r.phi.gradient(r.center), u0 = r.u.gradient(r.image_center);
      for (const Vec2& x : halton_points(Domain::disc(r.center, r.radius), 20)) {
        const Vec2 xi = f * x;
        agreement = std::max({agreement, (r.phi.gradient(x) - p0 - lf.s1 * (x - r.center)).norm(),
                              (r.u.gradient(xi) - u0 - s2inv * (xi - r.image_center)).norm()});
      }
    } catch (const Error& e) {
      if (failures++ == 0) o.detail << "first failure: " << e.what() << "; ";
    }
  }
  o.detail << "1000 matrices with det in [-10, -1e-3], reassembly " << reassembly << ", asymmetry " << asym
           << ", decompose_local vs factors " << agreement << ", decomposition failures " << failures;
  o.require(reassembly <= 1e-12 && asym == 0, "reassembly <= 1e-12");
  o.require(failures == 0 && agreement <= 1e-8, "agreement <= 1e-8");
}

void criterion_pde(Outcome& o) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> entry(-2, 2), bend(-0.2, 0.2);
  const Domain d = Domain::disc(Vec2::Zero(), 0.5);
  int done = 0, failures = 0;
  double residual = 0, identity = 0, min_radius = INFINITY;
  while (done < 20) {
    Mat2 l;
    do {
      l << entry(rng), entry(rng), entry(rng), entry(rng);
    } while (l.determinant() > -0.3);
    std::ostringstream f1, f2;
    f1.precision(17);
    f2.precision(17);
    f1 << l(0, 0) << "*x1 + " << l(0, 1) << "*x2 + " << bend(rng) << "*x1^2 + " << bend(rng) << "*x1*x2 + "
       << bend(rng) << "*x2^3";
    f2 << l(1, 0) << "*x1 + " << l(1, 1) << "*x2 + " << bend(rng) << "*x2^2 + " << bend(rng) << "*x1^2*x2 + "
       << bend(rng) << "*x1^3";
    const PlaneMap f = PlaneMap::analytic(ScalarField::parse(f1.str()), ScalarField::parse(f2.str()), d);
    if (orientation(f, d) != Orientation::reversing) continue;
    ++done;
    DecomposeOptions opts;
    opts.tolerance = 1e-6;
    try {
      const DecompositionResult r = decompose_local(f, Vec2::Zero(), opts);
      residual = std::max(residual, r.residual);
      min_radius = std::min(min_radius, r.radius);
      for (const Vec2& x : halton_points(Domain::disc(r.center, r.radius), 500)) {
        identity = std::max(identity, (r.u.gradient(f(x)) - r.phi.gradient(x)).norm());
      }
    } catch (const Error& e) {
      if (failures++ == 0) o.detail << "first failure: " << e.what() << "; ";
    }
  }
  const Domain unit = Domain::disc(Vec2::Zero(), 1.0);
  const PlaneMap exp_scaling =
      PlaneMap::analytic(ScalarField::parse("exp(x2)*x1"), ScalarField::parse("exp(x2)*x2"), unit);
  const Mat2 j = exp_scaling.jacobian(Vec2::Zero());
  const double disc = j.trace() * j.trace() - 4 * j.determinant();
  bool rejected = false;
  try {
    decompose_local(exp_scaling, Vec2::Zero());
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::not_hyperbolic;
  }
  o.detail << "20 perturbed maps, max residual " << residual << ", min radius " << min_radius
           << ", max |grad u(f) - grad phi| " << identity << ", failures " << failures
           << "; e^x2 (x1, x2) at origin: (tr J)^2 - 4 det J = " << disc << ", "
           << to_string(hyperbolicity(exp_scaling, Vec2::Zero())) << (rejected ? ", rejected" : ", accepted");
  o.require(failures == 0 && residual <= 1e-6 && min_radius > 0, "tol 1e-6 with nonzero radius");
  o.require(identity <= 1e-5, "composition identity within 10 tol");
  o.require(std::abs(disc) <= 1e-10 && rejected, "degenerate point rejected");
}

}  // namespace

namespace {

struct PipelineCheck {
  double error = 0;
  int wrong = 0;
  int superfluous = 0;
};

PipelineCheck check_realization(const MirrorSystem& s, const std::function<Vec2(const Vec2&)>& f, int expected) {
  PipelineCheck out;
  for (const Vec2& x : verification_labels(s.entry_domain, 500)) {
    const TraceResult r = trace_ray(s, x);
    out.superfluous += static_cast<int>(r.superfluous_hits.size());
    if (r.status != TraceStatus::ok || r.bounces() != expected) {
      ++out.wrong;
      continue;
    }
    out.error = std::max(out.error, (r.exit_label - f(x)).norm());
  }
  return out;
}

void criterion_pipelines(Outcome& o) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> entry(-2, 2);
  std::vector<Mat2> reversing = {Vec2(-1, 1).asDiagonal()};
  while (reversing.size() < 3) {
    Mat2 m;
    m << entry(rng), entry(rng), entry(rng), entry(rng);
    if (m.determinant() < -0.2) reversing.push_back(m);
  }
  const Domain d = Domain::disc(Vec2::Zero(), 0.5);
  double err4 = 0, partition = 0;
  int wrong = 0, superfluous = 0;
  for (const Mat2& m : reversing) {
    const PlaneMap f = PlaneMap::linear(m, Vec2::Zero(), d);
    const auto oracle = [m](const Vec2& x) { return Vec2(m * x); };
    RealizeOptions two;
    two.partition = 2;
    const MirrorSystem one_cell = realize_orientation_reversing(f, d).system;
    const MirrorSystem four_cells = realize_orientation_reversing(f, d, two).system;
    for (const MirrorSystem* s : {&one_cell, &four_cells}) {
      const PipelineCheck pc = check_realization(*s, oracle, 4);
      err4 = std::max(err4, pc.error);
      wrong += pc.wrong + (s->expected_reflections != 4);
      superfluous += pc.superfluous;
    }
    for (const Vec2& x : verification_labels(d, 500)) {
      const TraceResult a = trace_ray(one_cell, x), b = trace_ray(four_cells, x);
      if (a.status == TraceStatus::ok && b.status == TraceStatus::ok)
        partition = std::max(partition, (a.exit_label - b.exit_label).norm());
    }
  }

  const Domain left = Domain::disc(Vec2(-3, 0), 0.5);
  const double theta = 0.1;
  const std::vector<std::pair<PlaneMap, std::function<Vec2(const Vec2&)>>> preserving = {
      {PlaneMap::identity(left), [](const Vec2& x) { return x; }},
      {PlaneMap::rotation(theta, left),
       [theta](const Vec2& x) {
         return Vec2(std::cos(theta) * x.x() - std::sin(theta) * x.y(), std::sin(theta) * x.x() + std::cos(theta) * x.y());
       }},
  };
  double err6 = 0;
  for (const auto& [f, oracle] : preserving) {
    const MirrorSystem s = realize_orientation_preserving(f, left).system;
    const PipelineCheck pc = check_realization(s, oracle, 6);
    err6 = std::max(err6, pc.error);
    wrong += pc.wrong + (s.expected_reflections != 6);
    superfluous += pc.superfluous;
  }
  o.detail << "sigma and 2 random det<0 maps (partitions 1 and 2): max error " << err4
           << "; identity and rotation 0.1: max error " << err6 << "; partition difference " << partition
           << "; rays with the wrong reflection count " << wrong << ", superfluous hits " << superfluous;
  o.require(err4 <= 1e-6, "4-reflection error <= 1e-6");
  o.require(err6 <= 1e-5, "6-reflection error <= 1e-5");
  o.require(partition <= 1e-6, "partition independence <= 1e-6");
  o.require(wrong == 0 && superfluous == 0, "exact reflection counts, no superfluous hits");
}

void criterion_ellipse(Outcome& o) {
  double geometric = 0, mobius = 0;
  for (int ci = 0; ci <= 9; ++ci) {
    const double c = 0.1 * ci;
    const EllipseConfig cfg(c);
    const double k = (1 - c) / (1 + c);
    for (int i = 0; i < 100; ++i) {
      const double a = M_PI * (i + 0.5) / 100;
      const double b = pencil_map_angle(cfg, a);
      geometric = std::max(geometric, std::abs(pencil_map_geometric(cfg, a) - b));
      mobius = std::max(mobius, std::abs(std::tan(a / 2) * std::tan(b / 2) - k));
    }
  }
  o.detail << "c in {0, 0.1, ..., 0.9} x 100 angles, geometric vs closed form " << geometric
           << ", tan(a/2) tan(b/2) deviation " << mobius;
  o.require(geometric <= 1e-10, "geometric agreement <= 1e-10");
  o.require(mobius <= 1e-12, "Mobius deviation <= 1e-12");
}

void criterion_determinism(Outcome& o, const std::string& cli, const std::string& fixtures) {
  int scenes = 0, mismatched = 0;
  for (const auto& entry : fs::directory_iterator(fixtures)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".json" || name == "old_version.json") continue;
    const bool lax = name.find("lax") != std::string::npos;
    const std::string text = read_text(entry.path().string());
    const SceneDocument doc = SceneDocument::parse(text, !lax);
    const SceneDocument back = SceneDocument::parse(doc.serialize(), !lax);
    ++scenes;
    if (doc.serialize() != text || !(back == doc)) {
      ++mismatched;
      o.detail << "round trip differs: " << name << "; ";
    }
  }

  const fs::path tmp = fs::temp_directory_path() / ("periscope_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  int files = 0, differing = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = tmp / ("run" + std::to_string(pass));
    for (const char* scene : {"translation.json", "dilation.json", "linear_four.json"}) {
      run(cli + " export --scene " + fixtures + "/" + scene + " --mesh 33 --rays 200 --out " + dir.string());
    }
    run(cli + " ellipse --c 0.5 --samples 100 --out " + (dir / "pencil.csv").string());
  }
  for (const auto& entry : fs::directory_iterator(tmp / "run0")) {
    ++files;
    const fs::path twin = tmp / "run1" / entry.path().filename();
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin) || fs::file_size(entry.path()) == 0) ++differing;
  }

  const std::string tr = fixtures + "/translation.json";
  const int pass_rc = run(cli + " verify --scene " + tr);
  const int fail_rc = run(cli + " verify --scene " + tr + " --map translate:3.1,0");
  const int usage_rc = run(cli + " synthesize --potential 3*x1");
  const int numeric_rc = run(cli + " realize --map 'expr:exp(x2)*x1;exp(x2)*x2' --domain disc:0,0,0.3 --force-4");
  fs::remove_all(tmp);

  o.detail << scenes << " fixtures round-tripped (" << mismatched << " mismatches), " << files
           << " export files compared across two runs (" << differing << " differ), exit codes pass/fail/usage/numerical = "
           << pass_rc << "/" << fail_rc << "/" << usage_rc << "/" << numeric_rc;
  o.require(scenes >= 5 && mismatched == 0, "scene round trips");
  o.require(files >= 8 && differing == 0, "byte-identical exports");
  o.require(pass_rc == 0 && fail_rc == 1 && usage_rc == 2 && numeric_rc == 3, "exit code contract 0/1/2/3");
}

bool report(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  std::printf("%s  criterion %2d  %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.str().c_str(), seconds_since(t0));
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : PERISCOPE_CLI;
  const std::string fixtures = argc > 2 ? argv[2] : PERISCOPE_FIXTURE_DIR;

  int redraws = 0;
  std::vector<Case> randoms;
  Case tr, dil;
  try {
    randoms = random_cases(50, &redraws);
    tr = translation_case();
    dil = dilation_case();
  } catch (const std::exception& e) {
    std::printf("setup failed: %s\n", e.what());
    return 1;
  }
  std::vector<const Case*> all = {&tr, &dil};
  std::vector<const Case*> legendre = {&tr, &dil};
  for (const Case& k : randoms) all.push_back(&k);
  for (int i = 0; i < 20; ++i) legendre.push_back(&randoms[i]);

  int failed = 0;
  failed += !report(1, "two-mirror round trip", [&](Outcome& o) { criterion_round_trip(o, randoms, redraws); });
  failed += !report(2, "translation and dilation examples", [&](Outcome& o) { criterion_worked_examples(o, tr, dil); });
  failed += !report(3, "gradient recovery", [&](Outcome& o) { criterion_necessity(o, all); });
  failed += !report(4, "slope and triangle identities", [&](Outcome& o) { criterion_identities(o, all); });
  failed += !report(5, "Legendre duality", [&](Outcome& o) { criterion_legendre(o, legendre); });
  failed += !report(6, "linear factorization oracle", criterion_linear_oracle);
  failed += !report(7, "local PDE decomposition", criterion_pde);
  failed += !report(8, "four- and six-reflection pipelines", criterion_pipelines);
  failed += !report(9, "ellipse pencil map", criterion_ellipse);
  failed += !report(10, "determinism and round trips",
                    [&](Outcome& o) { criterion_determinism(o, cli, fixtures); });
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
