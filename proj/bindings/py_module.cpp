#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dgcn/error.hpp"
#include "dgcn/graph.hpp"
#include "dgcn/matrix.hpp"
#include "dgcn/nn.hpp"
#include "dgcn/pipeline.hpp"
#include "dgcn/spectral.hpp"
#include "dgcn/synth.hpp"

namespace py = pybind11;
using namespace dgcn;

namespace {

py::array_t<double> to_numpy(const DenseMatrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), out.mutable_data());
    return out;
}

DenseMatrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw ShapeError("expected a 2-d array");
    DenseMatrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + m.size(), m.data());
    return m;
}

py::array_t<double> vec_to_numpy(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

DirectedGraph graph_from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges,
                               const std::vector<std::string>& node_ids) {
    std::vector<Edge> list;
    list.reserve(edges.size());
    for (const auto& [u, v, w] : edges) list.push_back({u, v, w});
    return DirectedGraph::from_edges(n, std::move(list), node_ids);
}

NodeData make_node_data(const std::vector<int>& labels,
                        const py::object& features) {
    NodeData nd;
    nd.labels = labels;
    for (int l : labels) nd.num_classes = std::max(nd.num_classes, l + 1);
    if (!features.is_none()) {
        const auto arr =
            features.cast<py::array_t<double, py::array::c_style | py::array::forcecast>>();
        if (arr.ndim() != 2 || static_cast<std::size_t>(arr.shape(0)) != labels.size())
            throw ShapeError("features must be (n, width)");
        nd.feature_width = static_cast<std::size_t>(arr.shape(1));
        nd.features.assign(arr.data(), arr.data() + arr.size());
    }
    nd.validate(static_cast<int>(labels.size()));
    return nd;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spectral graph convolutional networks for directed graphs";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConvergenceError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        } catch (const NumericError& e) {
            PyErr_SetString(PyExc_ArithmeticError, e.what());
        } catch (const ValidationError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ParseError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const ShapeError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<DirectedGraph>(m, "DirectedGraph")
        .def_static(
            "from_edges",
            [](int n, const std::vector<std::tuple<int, int, double>>& edges,
               const std::vector<std::string>& node_ids) {
                return graph_from_edges(n, edges, node_ids);
            },
            py::arg("n"), py::arg("edges"), py::arg("node_ids") = std::vector<std::string>{})
        .def_property_readonly("n", &DirectedGraph::node_count)
        .def_property_readonly("num_edges",
                               [](const DirectedGraph& g) { return g.edges().size(); })
        .def_property_readonly("node_ids", &DirectedGraph::node_ids)
        .def("edges",
             [](const DirectedGraph& g) {
                 std::vector<std::tuple<int, int, double>> out;
                 out.reserve(g.edges().size());
                 for (const Edge& e : g.edges()) out.emplace_back(e.src, e.dst, e.weight);
                 return out;
             })
        .def("index_of", &DirectedGraph::index_of)
        .def("total_weight", &DirectedGraph::total_weight)
        .def("__repr__", [](const DirectedGraph& g) {
            return "DirectedGraph(n=" + std::to_string(g.node_count()) +
                   ", edges=" + std::to_string(g.edges().size()) + ")";
        });

    py::class_<NodeData>(m, "NodeData")
        .def(py::init(&make_node_data), py::arg("labels"), py::arg("features") = py::none())
        .def_readonly("labels", &NodeData::labels)
        .def_readonly("num_classes", &NodeData::num_classes)
        .def_property_readonly("feature_width",
                               [](const NodeData& nd) { return nd.feature_width; });

    m.def("load_edgelist", &load_edgelist, py::arg("path"), py::arg("weighted") = false);
    m.def("write_edgelist", &write_edgelist, py::arg("graph"), py::arg("path"));
    m.def("load_node_data", &load_node_data, py::arg("graph"), py::arg("labels_path"),
          py::arg("features_path") = std::string{});

    m.def("strongly_connected_components", [](const DirectedGraph& g) {
        return strongly_connected_components(g).components;
    });
    m.def("is_strongly_connected", &is_strongly_connected);
    m.def("largest_scc_subgraph", &largest_scc_subgraph);
    m.def("add_self_loops", &add_self_loops);

    py::class_<TransitionMatrix>(m, "TransitionMatrix")
        .def_readonly("n", &TransitionMatrix::n)
        .def("to_dense", [](const TransitionMatrix& p) { return to_numpy(p.to_dense()); });
    m.def("transition_matrix", &transition_matrix, py::arg("graph_with_self_loops"));

    py::class_<PerronVector>(m, "PerronVector")
        .def_property_readonly("phi", [](const PerronVector& pv) { return vec_to_numpy(pv.phi); })
        .def_readonly("residual", &PerronVector::residual)
        .def_readonly("iterations", &PerronVector::iterations);
    m.def("perron_vector", &perron_vector, py::arg("transition"), py::arg("tol") = 1e-12,
          py::arg("max_iter") = 100000);

    m.def("propagation_matrix",
          [](const TransitionMatrix& p, const PerronVector& pv) {
              return to_numpy(propagation_matrix(p, pv).values);
          },
          py::arg("transition"), py::arg("perron"));
    m.def("directed_laplacian",
          [](const TransitionMatrix& p, const PerronVector& pv) {
              return to_numpy(directed_laplacian(p, pv));
          },
          py::arg("transition"), py::arg("perron"));
    m.def("baseline_sym_propagation",
          [](const DirectedGraph& g) { return to_numpy(baseline_sym_propagation(g).values); },
          py::arg("graph"));

    m.def("build_features",
          [](const DirectedGraph& g, const NodeData& nd) { return to_numpy(build_features(g, nd)); },
          py::arg("graph"), py::arg("node_data"));
    m.def("split_nodes",
          [](const std::vector<int>& labels, double fraction, std::uint64_t seed) {
              const SplitSets s = split_nodes(labels, fraction, seed);
              return py::make_tuple(s.train, s.test);
          },
          py::arg("labels"), py::arg("train_fraction"), py::arg("seed"));

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("edgelist", &TrainConfig::edgelist)
        .def_readwrite("labels", &TrainConfig::labels)
        .def_readwrite("features", &TrainConfig::features)
        .def_readwrite("weighted", &TrainConfig::weighted)
        .def_readwrite("model_depth", &TrainConfig::model_depth)
        .def_readwrite("hidden_dims", &TrainConfig::hidden_dims)
        .def_readwrite("lr", &TrainConfig::lr)
        .def_readwrite("dropout", &TrainConfig::dropout)
        .def_readwrite("weight_decay", &TrainConfig::weight_decay)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("train_fraction", &TrainConfig::train_fraction)
        .def_readwrite("runs", &TrainConfig::runs)
        .def_readwrite("out_dir", &TrainConfig::out_dir)
        .def_property(
            "propagation",
            [](const TrainConfig& c) { return to_string(c.propagation); },
            [](TrainConfig& c, const std::string& s) { c.propagation = propagation_from_string(s); })
        .def("set_key", &TrainConfig::set_key)
        .def("validate", &TrainConfig::validate, py::arg("require_paths") = true);

    py::class_<ModelParams>(m, "ModelParams")
        .def_property_readonly("dims", [](const ModelParams& p) { return p.dims; })
        .def("weight", [](const ModelParams& p, std::size_t k) { return to_numpy(p.weights.at(k)); })
        .def("save", [](const ModelParams& p, const std::string& path) { save_params(p, path); })
        .def_static("load", &load_params);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("run_seed", &RunResult::run_seed)
        .def_readonly("accuracy", &RunResult::accuracy)
        .def_property_readonly("losses", [](const RunResult& r) { return vec_to_numpy(r.losses); })
        .def_property_readonly("params", [](const RunResult& r) { return r.params; })
        .def_property_readonly("train_nodes", [](const RunResult& r) { return r.split.train; })
        .def_property_readonly("test_nodes", [](const RunResult& r) { return r.split.test; });

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_property_readonly("accuracies",
                               [](const ExperimentResult& e) {
                                   std::vector<double> accs;
                                   for (const RunResult& r : e.runs) accs.push_back(r.accuracy);
                                   return vec_to_numpy(accs);
                               })
        .def_property_readonly("runs", [](const ExperimentResult& e) { return e.runs; })
        .def_readonly("mean_accuracy", &ExperimentResult::mean_accuracy)
        .def_readonly("ci_half_width", &ExperimentResult::ci_half_width);

    m.def("train", &train, py::arg("config"), py::arg("graph"), py::arg("node_data"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_experiment", &run_experiment, py::arg("config"), py::arg("graph"),
          py::arg("node_data"), py::call_guard<py::gil_scoped_release>());
    m.def("evaluate",
          [](const ModelParams& params,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& a_hat,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
             const std::vector<int>& labels, const std::vector<int>& test_nodes) {
              return evaluate(params, from_numpy(a_hat), from_numpy(x), labels, test_nodes);
          },
          py::arg("params"), py::arg("a_hat"), py::arg("x"), py::arg("labels"),
          py::arg("test_nodes"));
    m.def("confidence_interval",
          [](const std::vector<double>& accs) {
              const auto [mean, half] = confidence_interval(accs);
              return py::make_tuple(mean, half);
          },
          py::arg("accuracies"));

    m.def("generate_directed_sbm",
          [](int n, double p_in, double p_out, std::uint64_t seed) {
              return generate_directed_sbm({n, p_in, p_out, seed});
          },
          py::arg("n") = 200, py::arg("p_in") = 0.1, py::arg("p_out") = 0.01,
          py::arg("seed") = 7);

#ifdef DGCN_VERSION
    m.attr("__version__") = DGCN_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
