#include "fmc/flow.hpp"
#include "fmc/io.hpp"
#include "fmc/suite.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;

namespace {

fmc::Vec3 to_point(const fmc::ConvexBody& body, const std::vector<double>& xyz)
{
    const std::size_t dim = body.surface_dim() + 1;
    if (xyz.size() != dim) {
        throw fmc::Error(fmc::ErrorCode::ParamError, "point needs " + std::to_string(dim) + " coordinates");
    }
    fmc::Vec3 p = fmc::Vec3::Zero();
    for (std::size_t k = 0; k < dim; ++k) {
        p[k] = xyz[k];
    }
    return p;
}

int default_resolution(const fmc::ConvexBody& body, int resolution)
{
    return resolution > 0 ? resolution : fmc::suite_resolution(body, body.surface_dim() == 1 ? 3 : 2);
}

py::object json_to_python(const nlohmann::ordered_json& doc)
{
    return py::module_::import("json").attr("loads")(doc.dump());
}

double halpha(const fmc::ConvexBody& body, const std::vector<double>& xyz, double alpha, const std::string& method,
    int resolution)
{
    const fmc::SurfacePoint x = fmc::locate(body, to_point(body, xyz));
    if (method == "chord") {
        return fmc::halpha_chord(body, x, alpha, resolution).value;
    }
    if (method == "boundary") {
        const auto quad = fmc::surface_quadrature(body, default_resolution(body, resolution));
        return fmc::halpha_boundary(body, x, alpha, quad).value;
    }
    throw fmc::Error(fmc::ErrorCode::ParamError, "method must be \"chord\" or \"boundary\"");
}

py::dict halpha_nodes(const fmc::ConvexBody& body, double alpha, int resolution)
{
    const auto quad = fmc::surface_quadrature(body, resolution > 0 ? resolution : fmc::suite_resolution(body));
    const auto values = fmc::node_curvatures(body, quad, alpha);
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
    for (const auto& node : quad.nodes) {
        points.push_back({node.point.x(), node.point.y(), node.point.z()});
        weights.push_back(node.weight);
    }
    py::dict out;
    out["points"] = points;
    out["weights"] = weights;
    out["values"] = values;
    return out;
}

py::dict run_flow(const fmc::ConvexBody& body, double alpha, double cfl, int markers)
{
    fmc::FlowOptions options;
    options.cfl = cfl;
    options.markers = markers;
    const fmc::FlowTrace trace = fmc::fmcf_run(body, alpha, options);
    std::vector<double> t, perimeter, area, max_halpha, dt;
    for (const auto& s : trace.states) {
        t.push_back(s.t);
        perimeter.push_back(s.perimeter);
        area.push_back(s.area);
        max_halpha.push_back(s.max_halpha);
        dt.push_back(s.dt_used);
    }
    py::dict out;
    out["T_star"] = trace.T_star_num;
    out["termination"] = trace.termination_reason;
    out["steps"] = trace.steps;
    out["t"] = t;
    out["perimeter"] = perimeter;
    out["area"] = area;
    out["max_halpha"] = max_halpha;
    out["dt"] = dt;
    out["reports"] = py::make_tuple(json_to_python(fmc::report_to_json(fmc::check_decay_and_bounds(trace))),
        json_to_python(fmc::report_to_json(fmc::check_first_variation(trace))));
    return out;
}

py::list run_suite(const std::string& name, std::uint64_t seed)
{
    fmc::SuiteOptions options;
    options.seed = seed;
    const auto result = fmc::run_suite(name, options);
    py::list out;
    for (const auto& r : result.reports) {
        out.append(json_to_python(fmc::report_to_json(r)));
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_fmc, m)
{
    m.doc() = "Fractional mean curvature, nonlocal perimeters and the fractional curvature flow of convex curves.";

    py::register_exception<fmc::Error>(m, "FmcError", PyExc_ValueError);

    py::class_<fmc::ConvexBody>(m, "Body")
        .def_property_readonly("surface_dim", &fmc::ConvexBody::surface_dim)
        .def_property_readonly("is_polytope", &fmc::ConvexBody::is_polytope)
        .def_property_readonly("perimeter", [](const fmc::ConvexBody& b) { return fmc::perimeter(b); })
        .def_property_readonly("volume", [](const fmc::ConvexBody& b) { return fmc::area(b); })
        .def_property_readonly("diameter", [](const fmc::ConvexBody& b) { return fmc::diameter(b); })
        .def("scaled", [](const fmc::ConvexBody& b, double lambda) { return fmc::scaled(b, lambda); })
        .def("to_json", [](const fmc::ConvexBody& b) { return fmc::body_to_json(b).dump(); })
        .def("__repr__", [](const fmc::ConvexBody& b) {
            std::ostringstream ss;
            ss << "<Body n=" << b.surface_dim() << (b.is_polytope() ? " polytope" : " ball") << ">";
            return ss.str();
        });

    m.def("parse_body", [](const std::string& text) { return fmc::parse_body(text); }, py::arg("text"));
    m.def("load_body", &fmc::load_body, py::arg("path"));
    m.def("fixture", [](const std::string& name) { return fmc::named_fixture(name); }, py::arg("name"));
    m.def("fixture_names", &fmc::fixture_names);
    m.def("disk", &fmc::disk, py::arg("radius") = 1.0);
    m.def("ball", &fmc::sphere_ball, py::arg("radius") = 1.0);
    m.def("regular_polygon", &fmc::regular_polygon, py::arg("k"), py::arg("circumradius") = 1.0,
        py::arg("phase") = 0.0);
    m.def("rectangle", &fmc::rectangle, py::arg("width"), py::arg("height"));
    m.def("box", &fmc::box, py::arg("a"), py::arg("b"), py::arg("c"));
    m.def("icosahedron", &fmc::icosahedron, py::arg("circumradius") = 1.0);

    m.def("halpha", &halpha, py::arg("body"), py::arg("point"), py::arg("alpha"), py::arg("method") = "chord",
        py::arg("resolution") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("halpha_nodes", &halpha_nodes, py::arg("body"), py::arg("alpha"), py::arg("resolution") = 0);
    m.def("flow", &run_flow, py::arg("body"), py::arg("alpha") = 0.5, py::arg("cfl") = 0.1,
        py::arg("markers") = 256);
    m.def("suite_names", &fmc::suite_names);
    m.def("run_suite", &run_suite, py::arg("name"), py::arg("seed") = 0);
}
