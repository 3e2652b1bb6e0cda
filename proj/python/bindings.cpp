#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sirl/error.hpp"
#include "sirl/experiments.hpp"
#include "sirl/gmm.hpp"
#include "sirl/maxent.hpp"
#include "sirl/mcem.hpp"
#include "sirl/objectworld.hpp"

namespace py = pybind11;
namespace ow = sirl::objectworld;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> to_array(const sirl::FeatureMatrix& f) {
  py::array_t<double> out({f.rows(), f.cols()});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t s = 0; s < f.rows(); ++s)
    for (std::size_t j = 0; j < f.cols(); ++j) m(s, j) = f(s, j);
  return out;
}

sirl::DemoSet to_demos(const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& raw) {
  sirl::DemoSet d;
  for (const auto& traj : raw) {
    sirl::Trajectory t;
    for (auto [s, a] : traj) t.push_back({s, a});
    d.trajectories.push_back(std::move(t));
  }
  return d;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> from_demos(const sirl::DemoSet& d) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out;
  for (const auto& traj : d.trajectories) {
    auto& t = out.emplace_back();
    for (const auto& step : traj) t.emplace_back(step.state, step.action);
  }
  return out;
}

ow::FeatureVariant variant(const std::string& name) { return ow::parse_feature_variant(name); }

sirl::LikelihoodOptions tolerance(double soft_tol) { return {{soft_tol, 100000}}; }

}  // namespace

PYBIND11_MODULE(_sirl, m) {
  m.doc() = "Stochastic inverse reinforcement learning on objectworld";

  py::register_exception<sirl::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<sirl::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<ow::Instance>(m, "Instance")
      .def_readonly("grid_size", &ow::Instance::grid_size)
      .def_readonly("n_colors", &ow::Instance::n_colors)
      .def_readonly("wind", &ow::Instance::wind)
      .def_readonly("discount", &ow::Instance::discount)
      .def_readonly("seed", &ow::Instance::seed)
      .def_property_readonly("objects",
                             [](const ow::Instance& w) {
                               std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
                               for (const auto& o : w.objects) out.emplace_back(o.cell, o.inner_color, o.outer_color);
                               return out;
                             })
      .def("to_text",
           [](const ow::Instance& w) {
             std::ostringstream out;
             ow::write_instance(out, w);
             return out.str();
           })
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return ow::read_instance(in);
      });

  m.def("generate_world", &ow::generate, py::arg("grid_size") = 10, py::arg("n_objects") = 25,
        py::arg("n_colors") = 2, py::arg("wind") = 0.3, py::arg("discount") = 0.9, py::arg("seed") = 0);
  m.def("true_reward", [](const ow::Instance& w) { return to_array(ow::true_reward(w)); });
  m.def("features", [](const ow::Instance& w, const std::string& v) { return to_array(ow::features(w, variant(v))); },
        py::arg("instance"), py::arg("variant") = "discrete");
  m.def("optimal", [](const ow::Instance& w) {
    const auto s = sirl::value_iteration(ow::true_mdp(w));
    return py::make_tuple(to_array(s.values), s.policy.actions());
  }, "Optimal values and action indices for the true reward.");
  m.def("generate_demos",
        [](const ow::Instance& w, std::size_t n, std::size_t length, std::uint64_t seed) {
          return from_demos(ow::generate_demos(w, n, length, seed));
        },
        py::arg("instance"), py::arg("n_demos"), py::arg("length"), py::arg("seed") = 0);

  m.def("evd",
        [](const ow::Instance& w, const std::vector<double>& weights, const std::string& v) {
          return sirl::experiments::cmd_eval_evd(w, variant(v), weights);
        },
        py::arg("instance"), py::arg("weights"), py::arg("variant") = "discrete");
  m.def("log_likelihood",
        [](const ow::Instance& w, const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& demos,
           const std::vector<double>& weights, const std::string& v, double soft_tol) {
          return sirl::log_likelihood(to_demos(demos), weights, ow::features(w, variant(v)), ow::true_mdp(w), tolerance(soft_tol));
        },
        py::arg("instance"), py::arg("demos"), py::arg("weights"), py::arg("variant") = "discrete", py::arg("soft_tol") = sirl::kSoftTolerance);
  m.def("gradient",
        [](const ow::Instance& w, const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& demos,
           const std::vector<double>& weights, const std::string& v, double soft_tol) {
          return to_array(sirl::gradient(to_demos(demos), weights, ow::features(w, variant(v)), ow::true_mdp(w), tolerance(soft_tol)));
        },
        py::arg("instance"), py::arg("demos"), py::arg("weights"), py::arg("variant") = "discrete", py::arg("soft_tol") = sirl::kSoftTolerance);

  py::class_<sirl::Gmm>(m, "Gmm")
      .def(py::init<>())
      .def_readwrite("mixing", &sirl::Gmm::mixing)
      .def_readwrite("means", &sirl::Gmm::means)
      .def_readwrite("variances", &sirl::Gmm::variances)
      .def("mean", &sirl::Gmm::mean)
      .def("log_pdf", [](const sirl::Gmm& g, const std::vector<double>& x) { return sirl::log_pdf(g, x); })
      .def("sample", [](const sirl::Gmm& g, std::size_t n, std::uint64_t seed) { return sirl::sample(g, n, seed); },
           py::arg("n"), py::arg("seed") = 0);

  m.def("fit_gmm",
        [](const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed) {
          auto r = sirl::fit(points, k, std::nullopt, seed);
          return py::make_tuple(r.gmm, r.history);
        },
        py::arg("points"), py::arg("k"), py::arg("seed") = 0,
        "Returns the fitted mixture and its log-likelihood history.");

  m.def("run_mcem",
        [](const ow::Instance& w, const std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& demos,
           const std::string& v, std::size_t n0, std::size_t m_steps, double lr, std::size_t components,
           double epsilon_rep, std::size_t max_outer_iters, std::uint64_t seed) {
          sirl::McemConfig c;
          c.n0 = n0;
          c.m = m_steps;
          c.lr = lr;
          c.components = components;
          c.epsilon_rep = epsilon_rep;
          c.max_outer_iters = max_outer_iters;
          c.seed = seed;
          py::gil_scoped_release release;
          auto r = sirl::run(to_demos(demos), ow::features(w, variant(v)), ow::true_mdp(w), c);
          return std::make_pair(r.theta_star, r.converged);
        },
        py::arg("instance"), py::arg("demos"), py::arg("variant") = "discrete", py::arg("n0") = 10,
        py::arg("m") = 20, py::arg("lr") = 0.01, py::arg("components") = 3, py::arg("epsilon_rep") = 0.95,
        py::arg("max_outer_iters") = 8, py::arg("seed") = 0,
        "Two-stage MCEM; returns (mixture, converged).");

  m.def("normalize_config", [](const std::string& text) {
    return sirl::experiments::to_json(sirl::experiments::parse_config(text));
  }, "Parses a JSON experiment config, fills defaults and re-serialises it.");
}
