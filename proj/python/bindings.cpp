#include "sdfsim/arena.hpp"
#include "sdfsim/error.hpp"
#include "sdfsim/estimation.hpp"
#include "sdfsim/filter.hpp"
#include "sdfsim/metrics.hpp"
#include "sdfsim/sim.hpp"
#include "sdfsim/sweep.hpp"
#include "sdfsim/t_distribution.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

namespace py = pybind11;
using namespace sdfsim;

namespace {

ObservationTally tally(std::uint64_t black, std::uint64_t total) { return {black, total}; }

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

py::dict trial_dict(const TrialResult &r)
{
    py::dict d;
    d["regime"] = to_string(r.cell.regime);
    d["filter_mode"] = to_string(r.cell.filter_mode);
    d["P"] = r.cell.P;
    d["tau"] = r.cell.tau;
    d["b"] = r.cell.b;
    d["b_hat_flawed"] = r.cell.b_hat_flawed;
    d["f"] = r.cell.f;
    d["trial"] = r.trial;
    d["seed"] = r.seed;
    d["realized_fill_ratio"] = r.realized_fill_ratio;
    d["h_K"] = r.score.h_K;
    d["h_e"] = r.score.h_e;
    d["H"] = r.score.H;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Collective perception swarm simulation core";
    m.attr("__version__") = SDFSIM_VERSION;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::enum_<Regime>(m, "Regime")
        .value("FULLY_CONNECTED", Regime::FullyConnected)
        .value("DYNAMIC", Regime::Dynamic);
    py::enum_<FilterMode>(m, "FilterMode")
        .value("NONE", FilterMode::None)
        .value("ONLY_FLAWED", FilterMode::OnlyFlawed)
        .value("ALL", FilterMode::All);

    py::class_<Arena>(m, "Arena")
        .def_property_readonly("width_tiles", &Arena::width_tiles)
        .def_property_readonly("height_tiles", &Arena::height_tiles)
        .def_property_readonly("tile_side", &Arena::tile_side)
        .def_property_readonly("black_count", &Arena::black_count)
        .def_property_readonly("fill_ratio", &Arena::fill_ratio)
        .def("color_at", [](const Arena &a, double x, double y) { return static_cast<int>(a.color_at({x, y})); })
        .def("to_grid_text", &Arena::to_grid_text)
        .def("__eq__", [](const Arena &a, const Arena &b) { return a == b; });

    m.def("generate_arena", &generate_arena, py::arg("side_tiles"), py::arg("fill_ratio"),
          py::arg("tile_side") = kDefaultTileSide, py::arg("seed") = 0);
    m.def("load_arena", [](const std::string &text, double tile_side) { return load_arena(text, tile_side); },
          py::arg("grid_text"), py::arg("tile_side") = kDefaultTileSide);

    m.def("local_estimate",
          [](std::uint64_t black, std::uint64_t total, double b_hat, std::optional<double> w_hat) {
              return local_estimate(tally(black, total), b_hat, w_hat.value_or(b_hat));
          },
          py::arg("black"), py::arg("total"), py::arg("b_hat"), py::arg("w_hat") = py::none());
    m.def("local_confidence",
          [](std::uint64_t black, std::uint64_t total, double b_hat, std::optional<double> w_hat) {
              const double w = w_hat.value_or(b_hat);
              const auto t = tally(black, total);
              return local_confidence(t, b_hat, w, local_estimate(t, b_hat, w));
          },
          py::arg("black"), py::arg("total"), py::arg("b_hat"), py::arg("w_hat") = py::none());
    m.def("social_fuse",
          [](const std::vector<std::pair<double, double>> &pairs) -> std::optional<std::pair<double, double>> {
              std::vector<WeightedEstimate> in;
              for (auto [x, a] : pairs)
                  in.push_back({x, a});
              const auto out = social_fuse(in);
              if (!out)
                  return std::nullopt;
              return std::pair{out->estimate, out->confidence};
          },
          py::arg("estimates"), "Fuse (estimate, confidence) pairs; returns (x_bar, beta) or None.");
    m.def("informed_fuse", &informed_fuse, py::arg("x_hat"), py::arg("alpha"), py::arg("x_bar"), py::arg("beta"));

    m.def("t_quantile", &t_quantile, py::arg("df"), py::arg("upper_tail"));
    m.def("activation_threshold", &activation_threshold, py::arg("m"), py::arg("omega") = 0.05);
    m.def("should_activate",
          [](double x_hat, const std::vector<double> &neighbors, double omega) {
              return should_activate(x_hat, neighbors, omega);
          },
          py::arg("x_hat"), py::arg("neighbor_estimates"), py::arg("omega") = 0.05);
    m.def("update_assumed_accuracy", py::overload_cast<double, double>(&update_assumed_accuracy),
          py::arg("black_ratio"), py::arg("x_bar"));

    py::class_<TrialConfig>(m, "TrialConfig")
        .def(py::init<>())
        .def_readwrite("regime", &TrialConfig::regime)
        .def_readwrite("num_robots", &TrialConfig::num_robots)
        .def_readwrite("k_max", &TrialConfig::k_max)
        .def_readwrite("fill_ratio", &TrialConfig::fill_ratio)
        .def_readwrite("true_accuracy", &TrialConfig::true_accuracy)
        .def_readwrite("flawed_accuracy", &TrialConfig::flawed_accuracy)
        .def_readwrite("flawed_percent", &TrialConfig::flawed_percent)
        .def_readwrite("filter_mode", &TrialConfig::filter_mode)
        .def_property(
            "tau", [](const TrialConfig &c) { return c.activation.tau; },
            [](TrialConfig &c, std::uint64_t v) { c.activation.tau = v; })
        .def_property(
            "omega", [](const TrialConfig &c) { return c.activation.omega; },
            [](TrialConfig &c, double v) { c.activation.omega = v; })
        .def_property(
            "min_neighbors", [](const TrialConfig &c) { return c.activation.min_neighbors; },
            [](TrialConfig &c, std::size_t v) { c.activation.min_neighbors = v; })
        .def_readwrite("density", &TrialConfig::density)
        .def_readwrite("comm_range", &TrialConfig::comm_range)
        .def_readwrite("tile_side", &TrialConfig::tile_side)
        .def_readwrite("seed", &TrialConfig::seed)
        .def("validate", &TrialConfig::validate);

    py::class_<TrialLog>(m, "TrialLog")
        .def_readonly("num_robots", &TrialLog::num_robots)
        .def_readonly("steps", &TrialLog::steps)
        .def_readonly("realized_fill_ratio", &TrialLog::realized_fill_ratio)
        .def_readonly("flawed", &TrialLog::flawed)
        .def("informed", [](const TrialLog &l, std::size_t i) { return to_vector(l.informed(i)); }, py::arg("robot"))
        .def("local", [](const TrialLog &l, std::size_t i) { return to_vector(l.local(i)); }, py::arg("robot"))
        .def("assumed_accuracy", [](const TrialLog &l, std::size_t i) { return to_vector(l.assumed_accuracy(i)); },
             py::arg("robot"))
        .def("__eq__", [](const TrialLog &a, const TrialLog &b) { return a == b; });

    m.def("run_trial", py::overload_cast<const TrialConfig &>(&run_trial), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ScoreReport>(m, "ScoreReport")
        .def_readonly("K", &ScoreReport::K)
        .def_readonly("e", &ScoreReport::e)
        .def_readonly("h_K", &ScoreReport::h_K)
        .def_readonly("h_e", &ScoreReport::h_e)
        .def_readonly("H", &ScoreReport::H);

    m.def("convergence_step",
          [](const std::vector<double> &x, double delta) { return convergence_step(x, delta); },
          py::arg("trajectory"), py::arg("delta") = 0.01);
    m.def("trial_scores",
          [](const std::vector<double> &K, const std::vector<double> &e, double K_max, double e_max) {
              const auto s = trial_scores(K, e, K_max, e_max);
              return std::pair{s.h_K, s.h_e};
          },
          py::arg("K"), py::arg("e"), py::arg("K_max") = 40000.0, py::arg("e_max") = 0.45);
    m.def("combined_score", &combined_score, py::arg("h_K"), py::arg("h_e"));
    m.def("score_trial",
          [](const TrialLog &log, double delta, double K_max, double e_max) {
              return score_trial(log, MetricConfig{delta, K_max, e_max});
          },
          py::arg("log"), py::arg("delta") = 0.01, py::arg("K_max") = 40000.0, py::arg("e_max") = 0.45);

    m.def("run_sweep",
          [](const std::string &config_json, std::optional<std::size_t> workers) {
              const auto spec = parse_sweep(config_json).spec;
              SweepResult result;
              {
                  py::gil_scoped_release release;
                  result = execute_sweep(spec, workers.value_or(default_worker_count()));
              }
              py::list rows;
              for (const auto &r : result.trials)
                  rows.append(trial_dict(r));
              return rows;
          },
          py::arg("config_json"), py::arg("workers") = py::none(),
          "Run a sweep in memory and return one dict per trial.");
}
