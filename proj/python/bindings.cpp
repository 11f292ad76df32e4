#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "periscope/calculus.hpp"
#include "periscope/composer.hpp"
#include "periscope/decomposition.hpp"
#include "periscope/ellipse.hpp"
#include "periscope/error.hpp"
#include "periscope/export.hpp"
#include "periscope/scene.hpp"
#include "periscope/two_mirror.hpp"
#include "periscope/verifier.hpp"

namespace py = pybind11;
using namespace periscope;

namespace {

// JSON crosses the boundary as text so Python sees plain dicts and lists.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

MirrorSystem system_arg(const py::object& o) { return system_from_json(from_py(o)); }

}  // namespace

PYBIND11_MODULE(_periscope, m) {
  m.doc() = "Mirror systems realizing plane maps by reflection";

  // Messages start with the error code, e.g. "c-too-small: ...".
  py::register_exception<Error>(m, "PeriscopeError");

  py::class_<Domain>(m, "Domain")
      .def_static("disc", &Domain::disc, py::arg("center"), py::arg("radius"))
      .def_static("polygon", &Domain::polygon, py::arg("vertices"))
      .def_static("rectangle", &Domain::rectangle, py::arg("lo"), py::arg("hi"))
      .def_static("interval", &Domain::interval, py::arg("a"), py::arg("b"))
      .def_static("from_json", [](const py::object& o) { return Domain::from_json(from_py(o)); })
      .def("contains", py::overload_cast<const Vec2&, double>(&Domain::contains, py::const_), py::arg("p"),
           py::arg("tol") = 1e-9)
      .def("center", &Domain::center)
      .def("to_json", [](const Domain& d) { return to_py(d.to_json()); });

  py::class_<ScalarField>(m, "ScalarField")
      .def_static("parse", &ScalarField::parse, py::arg("text"))
      .def("value", &ScalarField::value)
      .def("gradient", &ScalarField::gradient)
      .def("hessian", &ScalarField::hessian)
      .def("to_json", [](const ScalarField& f) { return to_py(f.to_json()); });

  py::class_<PlaneMap>(m, "PlaneMap")
      .def_static("identity", &PlaneMap::identity)
      .def_static("linear", &PlaneMap::linear, py::arg("matrix"), py::arg("offset"), py::arg("source"))
      .def_static("translation", &PlaneMap::translation, py::arg("a"), py::arg("source"))
      .def_static("rotation", &PlaneMap::rotation, py::arg("angle"), py::arg("source"))
      .def_static("analytic", &PlaneMap::analytic, py::arg("f1"), py::arg("f2"), py::arg("source"))
      .def_static("gradient_of", &PlaneMap::gradient_of, py::arg("potential"), py::arg("displacement"),
                  py::arg("source"))
      .def("__call__", &PlaneMap::operator())
      .def("jacobian", &PlaneMap::jacobian);

  m.def(
      "synthesize",
      [](const ScalarField& g, const Domain& d1, std::optional<double> c, double h) {
        return to_py(system_to_json(synthesize_two_mirror({g, d1, c, h})));
      },
      py::arg("potential"), py::arg("domain"), py::arg("c") = py::none(), py::arg("h") = 0.0,
      "Two-mirror system realizing x -> x + grad G(x) on the domain, as a dict.");

  m.def(
      "verify",
      [](const py::object& sys, const PlaneMap& f, int samples, double tol) {
        return to_py(verify_system(system_arg(sys), f, samples, tol).to_json());
      },
      py::arg("system"), py::arg("expected"), py::arg("samples") = 1000, py::arg("tol") = 1e-9);

  m.def(
      "trace",
      [](const py::object& sys, const Vec2& x) { return to_py(trace_ray(system_arg(sys), x).to_json()); },
      py::arg("system"), py::arg("x"));

  m.def(
      "recover_gradient",
      [](const py::object& sys, int samples) {
        const GradientRecovery r = recover_gradient(system_arg(sys), samples);
        py::dict out;
        out["c"] = r.c;
        out["potential"] = r.potential;
        out["residual"] = r.residual;
        out["path_constant_spread"] = r.path_constant_spread;
        return out;
      },
      py::arg("system"), py::arg("samples") = 256);

  m.def(
      "factor_linear",
      [](const Mat2& f) {
        const LinearFactors r = factor_linear(f);
        return py::make_tuple(r.s1, r.s2);
      },
      py::arg("matrix"), "Symmetric (S1, S2) with S2 @ S1 == matrix.");

  m.def(
      "realize",
      [](const PlaneMap& f, const Domain& d1, int partition) {
        RealizeOptions opts;
        opts.partition = partition;
        const auto o = orientation(f, d1);
        const Realization r = o == Orientation::reversing ? realize_orientation_reversing(f, d1, opts)
                                                          : realize_orientation_preserving(f, d1, opts);
        return to_py(system_to_json(r.system));
      },
      py::arg("map"), py::arg("domain"), py::arg("partition") = 1,
      "Four reflections for orientation-reversing maps, six for preserving ones.");

  m.def(
      "pencil_map",
      [](double c, double alpha) { return pencil_map_angle(EllipseConfig(c), alpha); }, py::arg("c"),
      py::arg("alpha"));

  m.def(
      "pencil_map_geometric",
      [](double c, double alpha) { return pencil_map_geometric(EllipseConfig(c), alpha); }, py::arg("c"),
      py::arg("alpha"));

  m.def(
      "parse_scene",
      [](const std::string& text, bool strict) { return to_py(SceneDocument::parse(text, strict).to_json()); },
      py::arg("text"), py::arg("strict") = true);

  m.def(
      "serialize_scene",
      [](const py::object& sys, const std::string& name) { return scene_of(system_arg(sys), name).serialize(); },
      py::arg("system"), py::arg("name") = "system");

  m.def(
      "patch_obj", [](const py::object& sys, int index) { return patch_obj(system_arg(sys).patches.at(index)); },
      py::arg("system"), py::arg("index"));
}
