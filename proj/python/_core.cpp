#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rmatch/bipartite.hpp"
#include "rmatch/blossom.hpp"
#include "rmatch/catalog.hpp"
#include "rmatch/error.hpp"
#include "rmatch/montecarlo.hpp"
#include "rmatch/records.hpp"
#include "rmatch/theory.hpp"

namespace py = pybind11;
using namespace rmatch;

namespace {

using EdgeTuple = std::tuple<Vertex, Vertex, double>;
using PairList = std::vector<std::pair<Vertex, Vertex>>;

std::vector<WeightedEdge> to_edges(const std::vector<EdgeTuple>& edges) {
  std::vector<WeightedEdge> out;
  out.reserve(edges.size());
  for (const auto& [u, v, w] : edges) out.push_back({u, v, w});
  return out;
}

std::vector<EdgeTuple> from_edges(std::span<const WeightedEdge> edges) {
  std::vector<EdgeTuple> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.emplace_back(e.u, e.v, e.w);
  return out;
}

PairList pairs_of(const Matching& m) {
  PairList out;
  for (const auto& p : m.pairs) out.emplace_back(p.u, p.v);
  return out;
}

template <class G>
std::string to_text(const G& g) {
  std::ostringstream out;
  write_graph(Graph(g), out);
  return out.str();
}

py::object graph_to_python(Graph g) {
  if (auto* b = std::get_if<BipartiteWeightedGraph>(&g)) return py::cast(std::move(*b));
  return py::cast(std::get<WeightedGraph>(std::move(g)));
}

// JSON crosses the boundary as text; the Python layer parses it.
std::string run_catalog_text(const std::string& config_text) {
  const json cfg = resolve_config(json::parse(config_text));
  py::gil_scoped_release release;
  return summary_document(run_catalog(cfg), utc_timestamp()).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = kArtifactVersion;

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
  static py::exception<ParseError> parse(m, "ParseError", error.ptr());
  static py::exception<NoMatching> no_matching(m, "NoMatching", error.ptr());
  static py::exception<NoPerfectMatching> no_perfect(m, "NoPerfectMatching", error.ptr());
  static py::exception<OddVertexCount> odd(m, "OddVertexCount", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      parse(e.what());
    } catch (const NoMatching& e) {
      no_matching(e.what());
    } catch (const NoPerfectMatching& e) {
      no_perfect(e.what());
    } catch (const OddVertexCount& e) {
      odd(e.what());
    } catch (const InvalidArgument& e) {
      invalid(e.what());
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<BipartiteWeightedGraph>(m, "BipartiteGraph")
      .def(py::init([](Vertex nl, Vertex nr, const std::vector<EdgeTuple>& edges) {
             return BipartiteWeightedGraph(nl, nr, to_edges(edges));
           }),
           py::arg("n_left"), py::arg("n_right"), py::arg("edges"))
      .def_property_readonly("n_left", &BipartiteWeightedGraph::n_left)
      .def_property_readonly("n_right", &BipartiteWeightedGraph::n_right)
      .def_property_readonly("edges",
                             [](const BipartiteWeightedGraph& g) { return from_edges(g.edges()); })
      .def("to_text", &to_text<BipartiteWeightedGraph>);

  py::class_<WeightedGraph>(m, "GeneralGraph")
      .def(py::init([](Vertex n, const std::vector<EdgeTuple>& edges) {
             return WeightedGraph(n, to_edges(edges));
           }),
           py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &WeightedGraph::n)
      .def_property_readonly("edges", [](const WeightedGraph& g) { return from_edges(g.edges()); })
      .def("to_text", &to_text<WeightedGraph>);

  m.def(
      "generate",
      [](const std::string& model, Vertex n, double p, std::uint64_t seed, double rate) {
        const ModelSpec spec{parse_model(model), n, p, rate};
        spec.validate();
        // Same stream as `rmatch generate` and trial 0 of an experiment.
        RngStream rng = derive_stream(trial_stream_id(seed, 0), "graph", 0);
        return graph_to_python(generate(spec, rng));
      },
      py::arg("model"), py::arg("n"), py::arg("p") = 1.0, py::arg("seed") = 1,
      py::arg("rate") = 1.0);

  m.def("parse_graph", [](const std::string& text) {
    std::istringstream in(text);
    return graph_to_python(parse_graph(in));
  });

  m.def("solve_assignment", [](const BipartiteWeightedGraph& g) {
    const auto res = solve_assignment(g);
    return py::make_tuple(res.cost, pairs_of(res));
  });

  m.def(
      "solve_sequence",
      [](const BipartiteWeightedGraph& g, std::size_t r_max) {
        const auto seq = solve_sequence(g, r_max);
        return py::make_tuple(seq.costs, seq.increments, pairs_of(seq.final_matching));
      },
      py::arg("graph"), py::arg("r_max"));

  m.def("solve_perfect_matching", [](const WeightedGraph& g) {
    const auto res = solve_perfect_matching(g);
    const bool certified = static_cast<bool>(verify_certificate(g, res.matching, res.certificate));
    return py::make_tuple(res.matching.cost, pairs_of(res.matching), certified);
  });

  m.def("brute_force_bipartite", [](const BipartiteWeightedGraph& g, std::size_t r) {
    return brute_force_bipartite(g, r).cost;
  });
  m.def("brute_force_general", [](const WeightedGraph& g) { return brute_force_general(g).cost; });

  auto t = m.def_submodule("theory");
  t.attr("zeta2") = theory::kZeta2;
  t.def("harmonic", &theory::harmonic);
  t.def("harmonic_asymptotic", &theory::harmonic_asymptotic);
  t.def("parisi_sum", &theory::parisi_sum);
  t.def("expected_increment", &theory::expected_increment, py::arg("n"), py::arg("r"),
        py::arg("p") = 1.0);
  t.def("pnr_theory", &theory::pnr_theory, py::arg("n"), py::arg("r"), py::arg("p") = 1.0);
  t.def("pnr_finite_lambda", &theory::pnr_finite_lambda);
  t.def("double_sum", &theory::double_sum);
  t.def("default_cutoff", &theory::default_cutoff);
  t.def("lower_L", &theory::lower_L);
  t.def("upper_U", &theory::upper_U);
  t.def("mlim_integral", &theory::mlim_integral, py::arg("tolerance") = 1e-8);

  m.def("catalog_names", [] {
    std::vector<std::string> out;
    for (auto name : catalog_names()) out.emplace_back(name);
    return out;
  });
  m.def("catalog_defaults_text",
        [](const std::string& name) { return catalog_defaults(name).dump(); });
  m.def("run_catalog_text", &run_catalog_text);
}
