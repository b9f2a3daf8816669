#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sorsim/analysis.hpp"
#include "sorsim/documents.hpp"
#include "sorsim/graph.hpp"
#include "sorsim/routing.hpp"

namespace py = pybind11;
using namespace sorsim;

namespace {

AlgorithmKind algorithm_from_name(const std::string& name) {
    const auto algo = parse_algorithm(name);
    if (!algo) throw std::invalid_argument("unknown algorithm '" + name + "'");
    return *algo;
}

GraphParams make_params(std::uint32_t n, std::uint32_t c, double alpha, std::uint32_t mu,
                        std::uint64_t seed, const std::string& generator) {
    GraphParams p;
    p.n = n;
    p.c = c;
    p.alpha = alpha;
    p.mu = mu != 0 ? mu : GraphParams::default_mu(n);
    p.seed = seed;
    const auto gen = parse_generator(generator);
    if (!gen) throw std::invalid_argument("generator must be 'exact' or 'poisson'");
    p.generator = *gen;
    return p;
}

}  // namespace

PYBIND11_MODULE(_sorsim, m) {
    m.doc() = "Routing simulator for heuristically embedded social overlays";

    py::class_<GraphParams>(m, "GraphParams")
        .def(py::init(&make_params), py::arg("n"), py::arg("c") = 1, py::arg("alpha") = 2.5,
             py::arg("mu") = 0, py::arg("seed") = 0, py::arg("generator") = "poisson")
        .def_readonly("n", &GraphParams::n)
        .def_readonly("c", &GraphParams::c)
        .def_readonly("alpha", &GraphParams::alpha)
        .def_readonly("mu", &GraphParams::mu)
        .def_readonly("seed", &GraphParams::seed)
        .def("validate", &GraphParams::validate)
        .def_property_readonly("generator",
                               [](const GraphParams& p) { return to_string(p.generator); });

    py::class_<OverlayGraph>(m, "OverlayGraph")
        .def_property_readonly("n", &OverlayGraph::n)
        .def_property_readonly("gamma", &OverlayGraph::gamma)
        .def_property_readonly("labels", &OverlayGraph::labels)
        .def("degree", &OverlayGraph::degree, py::arg("v"))
        .def("neighbors",
             [](const OverlayGraph& g, NodeId v) {
                 const auto nb = g.neighbors(v);
                 return std::vector<NodeId>(nb.begin(), nb.end());
             },
             py::arg("v"))
        .def_property_readonly("edges", &OverlayGraph::edges)
        .def("edge_count",
             [](const OverlayGraph& g, const std::string& kind) {
                 if (kind == "short_range") return g.edge_count(EdgeKind::short_range);
                 if (kind == "long_range") return g.edge_count(EdgeKind::long_range);
                 throw std::invalid_argument("edge kind must be short_range or long_range");
             },
             py::arg("kind"))
        .def("__eq__", [](const OverlayGraph& a, const OverlayGraph& b) { return a == b; });

    py::class_<RouteTrace>(m, "RouteTrace")
        .def_readonly("path", &RouteTrace::path)
        .def_readonly("forward_hops", &RouteTrace::forward_hops)
        .def_readonly("backtrack_hops", &RouteTrace::backtrack_hops)
        .def_readonly("marked_count", &RouteTrace::marked_count)
        .def_readonly("x_sequence", &RouteTrace::x_sequence)
        .def_property_readonly("outcome",
                               [](const RouteTrace& t) { return to_string(t.outcome); });

    py::class_<TheoreticalBounds>(m, "TheoreticalBounds")
        .def_readonly("alpha", &TheoreticalBounds::alpha)
        .def_readonly("nbo_upper_exponent", &TheoreticalBounds::nbo_upper_exponent)
        .def_readonly("non_exponent", &TheoreticalBounds::non_exponent)
        .def_readonly("delta", &TheoreticalBounds::delta)
        .def_readonly("r_min_star", &TheoreticalBounds::r_min_star)
        .def_readonly("k_min", &TheoreticalBounds::k_min)
        .def_readonly("c_term_upper", &TheoreticalBounds::c_term_upper)
        .def_readonly("c_term_lower", &TheoreticalBounds::c_term_lower);

    m.def("ring_distance", &ring_distance, py::arg("u"), py::arg("v"), py::arg("n"));
    m.def("calibrate_gamma", &calibrate_gamma, py::arg("n"), py::arg("alpha"), py::arg("mu"),
          py::arg("tol") = 1e-10);
    m.def("expected_label1_degree", &expected_label1_degree, py::arg("n"), py::arg("alpha"),
          py::arg("mu"), py::arg("gamma"));
    m.def("long_range_probability", &long_range_probability, py::arg("l_u"), py::arg("l_v"),
          py::arg("d"), py::arg("gamma"));
    m.def("build_graph", [](const GraphParams& p) { return build_graph(p); }, py::arg("params"));
    m.def("theoretical_bounds", &theoretical_bounds, py::arg("alpha"));
    m.def("greedy_path_exists", &greedy_path_exists, py::arg("graph"), py::arg("w"),
          py::arg("v"));
    m.def("estimate_inward_links", &estimate_inward_links, py::arg("graph"), py::arg("t"),
          py::arg("d"));
    m.def("connectivity_check", [](const OverlayGraph& g) {
        const auto r = connectivity_check(g);
        return py::make_tuple(r.connected, r.component_sizes);
    });
    m.def(
        "route",
        [](const OverlayGraph& g, NodeId source, NodeId target, const std::string& algorithm,
           std::uint64_t hop_cap) {
            return route(g, RouteQuery{source, target, algorithm_from_name(algorithm), hop_cap});
        },
        py::arg("graph"), py::arg("source"), py::arg("target"),
        py::arg("algorithm") = "NextBestOnce", py::arg("hop_cap") = 0);
    m.def("serialize_graph", &serialize_graph, py::arg("graph"));
    m.def("deserialize_graph", &deserialize_graph, py::arg("text"));
    m.def(
        "run_experiment_csv",
        [](const std::string& config_json, unsigned parallelism) {
            const auto config = deserialize_experiment_config(config_json);
            return experiment_csv(run_experiment(config, parallelism));
        },
        py::arg("config_json"), py::arg("parallelism") = 1,
        "Run a sweep from a config document and return the CSV text");

    py::register_exception<DocumentError>(m, "DocumentError");
}
