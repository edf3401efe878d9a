#include "rvi/generators.hpp"
#include "rvi/io.hpp"
#include "rvi/policy.hpp"
#include "rvi/solvers.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <stdexcept>

namespace py = pybind11;
using namespace rvi;

namespace {

using ModelPtr = std::shared_ptr<PomdpModel>;

ModelPtr share(PomdpModel m) { return std::make_shared<PomdpModel>(std::move(m)); }

Belief to_belief(const PomdpModel& m, const std::vector<double>& b) {
    if (static_cast<int>(b.size()) != m.num_states()) throw py::value_error("belief has the wrong length");
    return Belief(Vec(b.begin(), b.end()));
}

struct Solution {
    ModelPtr model;
    SolveResult result;

    Lookahead lookahead(const std::vector<double>& b) const {
        const Belief belief = to_belief(*model, b);
        return result.family ? improving_action(*model, *result.family, belief)
                             : improving_action(*model, result.vectors, belief);
    }

    Policy policy() const {
        return result.family ? Policy::improving(model, *result.family) : Policy::improving(model, result.vectors);
    }
};

Solution run_solver(const ModelPtr& model, const std::string& algo, double epsilon, int max_iterations,
                    const std::string& mode, bool incremental, std::optional<std::vector<int>> rich, int max_expansions) {
    SolveConfig cfg;
    cfg.epsilon = epsilon;
    cfg.max_iterations = max_iterations;
    cfg.mode = mode == "individual" ? UpdateMode::individual : UpdateMode::collective;
    cfg.dp.incremental = incremental;
    cfg.max_expansions = max_expansions;
    py::gil_scoped_release release;
    if (algo == "vi") return {model, solve_vi(*model, cfg)};
    if (algo == "ssvi") return {model, solve_ssvi(*model, cfg)};
    if (algo == "infovi") return {model, solve_infovi(*model, cfg)};
    if (algo == "spvi") {
        const auto classes = rich ? make_classification(*model, *rich) : classify_actions_heuristic(*model);
        return {model, solve_spvi(*model, cfg, classes)};
    }
    throw std::invalid_argument("unknown algorithm '" + algo + "'");
}

py::dict report_dict(const SimulationReport& r) {
    py::dict d;
    d["trials"] = r.trials;
    d["horizon"] = r.horizon;
    d["mean"] = r.mean;
    d["standard_error"] = r.standard_error;
    d["min_return"] = r.min_return;
    d["max_return"] = r.max_return;
    return d;
}

} // namespace

PYBIND11_MODULE(_rvi, m) {
    m.doc() = "Value iteration over reachable belief subsets";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<PomdpModel, ModelPtr>(m, "Model")
        .def_property_readonly("num_states", &PomdpModel::num_states)
        .def_property_readonly("num_actions", &PomdpModel::num_actions)
        .def_property_readonly("num_observations", &PomdpModel::num_observations)
        .def_property_readonly("discount", &PomdpModel::discount)
        .def("transition", &PomdpModel::transition, py::arg("s"), py::arg("a"), py::arg("s_next"))
        .def("observation", &PomdpModel::observation, py::arg("a"), py::arg("s_next"), py::arg("z"))
        .def("reward", &PomdpModel::reward, py::arg("s"), py::arg("a"))
        .def("to_text", [](const PomdpModel& self) { return serialize_pomdp(self); })
        .def("__eq__", [](const PomdpModel& a, const PomdpModel& b) { return a == b; })
        .def("__repr__", [](const PomdpModel& self) {
            return "<Model " + std::to_string(self.num_states()) + " states, " + std::to_string(self.num_actions()) +
                   " actions, " + std::to_string(self.num_observations()) + " observations>";
        });

    m.def("parse_pomdp", [](const std::string& text) { return share(parse_pomdp(text)); }, py::arg("text"));
    m.def("example3", [] { return share(make_example3()); });
    m.def("maze1", [](double discount) { return share(make_maze1(discount)); }, py::arg("discount") = 0.95);
    m.def("maze2", [](double discount) { return share(make_maze2(discount)); }, py::arg("discount") = 0.95);
    m.def("office", [](double discount) { return share(make_office(discount)); }, py::arg("discount") = 0.95);
    m.def(
        "elevator",
        [](int patterns, int request_bits, double discount) {
            return share(make_elevator({patterns, request_bits, discount}));
        },
        py::arg("patterns") = 3, py::arg("request_bits") = 4, py::arg("discount") = 0.95);
    m.def(
        "random_model",
        [](std::uint64_t seed, int states, int actions, int observations, double sparsity, double discount) {
            return share(make_random_model({seed, states, actions, observations, sparsity, discount}));
        },
        py::arg("seed") = 1, py::arg("states") = 3, py::arg("actions") = 2, py::arg("observations") = 2,
        py::arg("sparsity") = 0.0, py::arg("discount") = 0.95);
    m.def(
        "grid",
        [](std::uint64_t seed, int width, int height, double discount, double look_noise) {
            GridParams gp;
            gp.seed = seed;
            gp.width = width;
            gp.height = height;
            gp.discount = discount;
            gp.look_noise = look_noise;
            return share(make_near_discernible_grid(gp));
        },
        py::arg("seed") = 7, py::arg("width") = 3, py::arg("height") = 2, py::arg("discount") = 0.95,
        py::arg("look_noise") = 0.0);

    m.def(
        "belief_update",
        [](const PomdpModel& model, const std::vector<double>& b, int a, int z) -> std::optional<std::vector<double>> {
            const auto next = belief_update(model, to_belief(model, b), a, z);
            if (!next) return std::nullopt;
            return std::vector<double>(next->probs().begin(), next->probs().end());
        },
        py::arg("model"), py::arg("belief"), py::arg("action"), py::arg("observation"));

    m.def(
        "analyze",
        [](const PomdpModel& model) {
            const auto proper = analyze_properness(model);
            const auto info = informativeness_report(model);
            py::list pairs;
            for (const auto& p : proper.pairs)
                pairs.append(py::make_tuple(p.pair.action, p.pair.observation, p.rank, p.degenerate));
            py::dict d;
            d["proper"] = proper.proper;
            d["pairs"] = pairs;
            d["max_support_size"] = info.max_support_size;
            return d;
        },
        py::arg("model"));

    m.def("loose_threshold", &loose_threshold, py::arg("epsilon"), py::arg("discount"));
    m.def("strict_threshold", &strict_threshold, py::arg("epsilon"), py::arg("discount"), py::arg("num_observations"));

    py::class_<Solution>(m, "Solution")
        .def_property_readonly("termination", [](const Solution& s) { return to_string(s.result.termination); })
        .def_property_readonly("iterations", [](const Solution& s) { return s.result.iterations(); })
        .def_property_readonly("residual", [](const Solution& s) { return s.result.residual; })
        .def_property_readonly("threshold", [](const Solution& s) { return s.result.threshold; })
        .def_property_readonly("kept_per_iteration",
                               [](const Solution& s) {
                                   std::vector<long> kept;
                                   for (const auto& st : s.result.stats) kept.push_back(st.kept);
                                   return kept;
                               })
        .def_property_readonly("num_vectors",
                               [](const Solution& s) {
                                   return s.result.family ? s.result.family->total_vectors() : s.result.vectors.size();
                               })
        .def_property_readonly("is_family", [](const Solution& s) { return s.result.family.has_value(); })
        .def(
            "value",
            [](const Solution& s, const std::vector<double>& b) {
                if (s.result.family) throw py::value_error("family solutions have no single induced value; use lookahead");
                return induced_value(s.result.vectors, to_belief(*s.model, b)).value;
            },
            py::arg("belief"))
        .def(
            "lookahead",
            [](const Solution& s, const std::vector<double>& b) {
                const auto l = s.lookahead(b);
                return py::make_tuple(l.action, l.value);
            },
            py::arg("belief"), "(action, value) of the one-step lookahead")
        .def("to_text", [](const Solution& s) {
            const int n = s.model->num_states();
            return s.result.family ? format_family(*s.result.family, n) : format_vector_set(s.result.vectors, n);
        });

    m.def("solve", &run_solver, py::arg("model"), py::arg("algo") = "vi", py::arg("epsilon") = 0.01,
          py::arg("max_iterations") = 500, py::arg("mode") = "collective", py::arg("incremental") = false,
          py::arg("rich_actions") = py::none(), py::arg("max_expansions") = -1);

    m.def(
        "simulate",
        [](const ModelPtr& model, const Solution* solution, int trials, int horizon, std::uint64_t seed) {
            SimulationOptions opt;
            opt.trials = trials;
            opt.horizon = horizon;
            opt.seed = seed;
            const Policy policy = solution ? solution->policy() : Policy::qmdp(*model);
            SimulationReport r;
            {
                py::gil_scoped_release release;
                r = simulate(*model, policy, opt);
            }
            return report_dict(r);
        },
        py::arg("model"), py::arg("solution") = nullptr, py::arg("trials") = 1000, py::arg("horizon") = 100,
        py::arg("seed") = 1, "Mean discounted return; QMDP when no solution is given.");
}
