// Python bindings for the dispatch-optimization core.  The Model class
// bundles a network with its linearization and feasible polytope; all
// methods are pure functions of their arguments.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "gridmin/directional.hpp"
#include "gridmin/errors.hpp"
#include "gridmin/io.hpp"
#include "gridmin/linearization.hpp"
#include "gridmin/network.hpp"
#include "gridmin/objective.hpp"
#include "gridmin/optimizer.hpp"
#include "gridmin/polytope.hpp"
#include "gridmin/sigma_derivatives.hpp"

namespace py = pybind11;

namespace {

struct Model {
  gridmin::PowerNetwork net;
  gridmin::LinearizedSystem lin;
  gridmin::SupplyPolytope poly;

  explicit Model(gridmin::PowerNetwork n)
      : net(std::move(n)),
        lin(gridmin::build_linearization(net)),
        poly(gridmin::build_polytope(net)) {}

  gridmin::Evaluator evaluator(double r, double delta_fd) const {
    gridmin::DerivativeOptions dopts;
    dopts.delta_fd = delta_fd;
    return gridmin::Evaluator(net, lin, poly, r, {}, dopts);
  }
};

py::dict eval_to_dict(const gridmin::ObjectiveEvaluation& ev) {
  py::dict d;
  d["f"] = ev.f;
  d["f_edges"] = ev.f_edge;
  d["mean_term"] = ev.mean_term;
  d["sigma"] = ev.sigma;
  d["sines"] = ev.sines;
  d["i_max"] = ev.i_max;  // 0-based edge indices
  d["case"] = gridmin::case_name(ev.kind);
  return d;
}

py::dict run_to_dict(const Model& m, const gridmin::RunResult& run) {
  py::dict d;
  d["p_opt"] = run.p_opt;
  d["f_opt"] = run.f_opt;
  d["termination"] = gridmin::termination_name(run.termination);
  d["warnings"] = run.warnings;
  d["trace_csv"] = gridmin::trace_to_csv(run.trace, m.poly.dim);
  return d;
}

gridmin::OptimizerConfig make_config(double alpha, double beta, double gamma,
                                     double eps_stop, double xi,
                                     int inner_iters, int init_iters,
                                     int max_outer_iters) {
  gridmin::OptimizerConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.gamma = gamma;
  cfg.eps_stop = eps_stop;
  cfg.xi = xi;
  cfg.inner_iters = inner_iters;
  cfg.init_iters = init_iters;
  cfg.max_outer_iters = max_outer_iters;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_gridmin, m) {
  m.doc() = "Stochastic power dispatch objective: evaluation, derivatives "
            "and minimization over the feasible supply polytope";

  py::register_exception<gridmin::InputError>(m, "InputError",
                                              PyExc_ValueError);
  py::register_exception<gridmin::SaturationError>(m, "SaturationError",
                                                   PyExc_RuntimeError);
  py::register_exception<gridmin::DegenerateSpectrumError>(
      m, "DegenerateSpectrumError", PyExc_RuntimeError);

  py::class_<Model>(m, "Model")
      .def_static(
          "from_file",
          [](const std::string& path) {
            return Model(gridmin::load_network(path));
          },
          py::arg("path"))
      .def_static(
          "from_json",
          [](const std::string& text) {
            return Model(gridmin::parse_network(text));
          },
          py::arg("text"))
      .def_property_readonly("n_vertices",
                             [](const Model& m_) { return m_.net.n_vertices; })
      .def_property_readonly("n_edges",
                             [](const Model& m_) { return m_.net.n_edges; })
      .def_property_readonly("n_plus",
                             [](const Model& m_) { return m_.net.n_plus; })
      .def_property_readonly("dim",
                             [](const Model& m_) { return m_.poly.dim; })
      .def_property_readonly("b1", [](const Model& m_) { return m_.poly.b1; })
      .def_property_readonly("b2", [](const Model& m_) { return m_.poly.b2; })
      .def(
          "incidence",
          [](const Model& m_) { return gridmin::incidence_matrix(m_.net); })
      .def(
          "contains",
          [](const Model& m_, const Eigen::VectorXd& p, double tol) {
            return gridmin::contains(m_.poly, p, tol).inside;
          },
          py::arg("p"), py::arg("tol") = 1e-9)
      .def(
          "project",
          [](const Model& m_, const Eigen::VectorXd& y) {
            return gridmin::project(m_.poly, y);
          },
          py::arg("y"))
      .def(
          "max_step",
          [](const Model& m_, const Eigen::VectorXd& p,
             const Eigen::VectorXd& d) {
            return gridmin::max_step_to_boundary(m_.poly, p, d);
          },
          py::arg("p"), py::arg("d"))
      .def(
          "evaluate",
          [](const Model& m_, const Eigen::VectorXd& p, double r) {
            return eval_to_dict(
                gridmin::evaluate_objective(m_.net, m_.lin, p, r));
          },
          py::arg("p"), py::arg("r"))
      .def(
          "sigma_bundle",
          [](const Model& m_, const Eigen::VectorXd& p, int edge,
             double delta_fd) {
            gridmin::DerivativeOptions opts;
            opts.delta_fd = delta_fd;
            const auto b =
                gridmin::gradient_hessian_sigma(m_.net, m_.lin, p, edge, opts);
            py::dict d;
            d["edge"] = b.edge;
            d["sigma"] = b.sigma;
            d["gradient"] = b.sigma_gradient;
            d["hessian"] = b.sigma_hessian;
            return d;
          },
          py::arg("p"), py::arg("edge"), py::arg("delta_fd") = 1e-4,
          "Gradient and Hessian of sigma for a 0-based edge index")
      .def(
          "first_directional",
          [](const Model& m_, const Eigen::VectorXd& p,
             const Eigen::VectorXd& v, double r) {
            return m_.evaluator(r, 1e-4).first_directional(p, v);
          },
          py::arg("p"), py::arg("v"), py::arg("r"))
      .def(
          "second_directional",
          [](const Model& m_, const Eigen::VectorXd& p,
             const Eigen::VectorXd& v, double r) {
            return m_.evaluator(r, 1e-4).second_directional(p, v);
          },
          py::arg("p"), py::arg("v"), py::arg("r"))
      .def(
          "descend",
          [](const Model& m_, const Eigen::VectorXd& p0, double r,
             double alpha, double beta, double gamma, double eps_stop,
             double xi, int inner_iters, int init_iters, int max_outer_iters,
             double delta_fd) {
            const auto ev = m_.evaluator(r, delta_fd);
            const auto cfg = make_config(alpha, beta, gamma, eps_stop, xi,
                                         inner_iters, init_iters,
                                         max_outer_iters);
            return run_to_dict(m_, gridmin::steepest_descent(ev, p0, cfg));
          },
          py::arg("p0"), py::arg("r"), py::arg("alpha") = 0.3,
          py::arg("beta") = 0.5, py::arg("gamma") = 0.5,
          py::arg("eps_stop") = 1e-6, py::arg("xi") = 0.5,
          py::arg("inner_iters") = 600, py::arg("init_iters") = 300,
          py::arg("max_outer_iters") = 500, py::arg("delta_fd") = 1e-4)
      .def(
          "init_subgradient",
          [](const Model& m_, const Eigen::VectorXd& p0, double r,
             double alpha, double beta, double gamma, double eps_stop,
             double xi, int inner_iters, int init_iters, int max_outer_iters,
             double delta_fd) {
            const auto ev = m_.evaluator(r, delta_fd);
            const auto cfg = make_config(alpha, beta, gamma, eps_stop, xi,
                                         inner_iters, init_iters,
                                         max_outer_iters);
            return run_to_dict(m_, gridmin::init_subgradient(ev, p0, cfg));
          },
          py::arg("p0"), py::arg("r"), py::arg("alpha") = 0.3,
          py::arg("beta") = 0.5, py::arg("gamma") = 0.5,
          py::arg("eps_stop") = 1e-6, py::arg("xi") = 0.5,
          py::arg("inner_iters") = 600, py::arg("init_iters") = 300,
          py::arg("max_outer_iters") = 500, py::arg("delta_fd") = 1e-4)
      .def(
          "two_step",
          [](const Model& m_, const Eigen::VectorXd& p0, double r,
             double alpha, double beta, double gamma, double eps_stop,
             double xi, int inner_iters, int init_iters, int max_outer_iters,
             double delta_fd) {
            const auto ev = m_.evaluator(r, delta_fd);
            const auto cfg = make_config(alpha, beta, gamma, eps_stop, xi,
                                         inner_iters, init_iters,
                                         max_outer_iters);
            return run_to_dict(m_, gridmin::two_step(ev, p0, cfg));
          },
          py::arg("p0"), py::arg("r"), py::arg("alpha") = 0.3,
          py::arg("beta") = 0.5, py::arg("gamma") = 0.5,
          py::arg("eps_stop") = 1e-6, py::arg("xi") = 0.5,
          py::arg("inner_iters") = 600, py::arg("init_iters") = 300,
          py::arg("max_outer_iters") = 500, py::arg("delta_fd") = 1e-4);
}
