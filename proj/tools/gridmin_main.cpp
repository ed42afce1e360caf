// gridmin: evaluate and minimize the stochastic dispatch objective of a
// power network over its feasible supply polytope.
//
// Subcommands: evaluate, gradient, init, descend, two-step, project.
// Exit codes: 0 success, 2 input error, 3 saturation, 4 degenerate
// spectrum, 5 iteration cap, 6 numerical failure.

#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gridmin/directional.hpp"
#include "gridmin/errors.hpp"
#include "gridmin/io.hpp"
#include "gridmin/linearization.hpp"
#include "gridmin/network.hpp"
#include "gridmin/objective.hpp"
#include "gridmin/optimizer.hpp"
#include "gridmin/polytope.hpp"
#include "gridmin/sigma_derivatives.hpp"

namespace {

struct Options {
  std::string network_path;
  double r = 1.0;
  std::string start = "auto";
  gridmin::OptimizerConfig opt;
  double delta_fd = 1e-4;
  std::string trace_out;
  std::string result_out;
  unsigned long seed = 0;
};

void add_common_options(CLI::App* cmd, Options& o, bool optimizer_knobs) {
  cmd->add_option("--network", o.network_path, "network JSON document")
      ->required();
  cmd->add_option("--r", o.r, "risk weight of the objective")->required();
  cmd->add_option("--start", o.start,
                  "start vector v1,v2,... or 'auto' (projected box centroid) "
                  "or 'random' (seeded, projected)");
  cmd->add_option("--delta-fd", o.delta_fd,
                  "finite-difference step for eigenvector derivatives");
  cmd->add_option("--seed", o.seed, "seed for the 'random' start");
  cmd->add_option("--result-out", o.result_out,
                  "result JSON path (default: stdout)");
  if (optimizer_knobs) {
    cmd->add_option("--alpha", o.opt.alpha, "Armijo parameter in (0,0.5)");
    cmd->add_option("--beta", o.opt.beta, "backtracking factor in (0,1)");
    cmd->add_option("--gamma", o.opt.gamma,
                    "inner subgradient step exponent in (0,1)");
    cmd->add_option("--eps", o.opt.eps_stop, "outer stop threshold");
    cmd->add_option("--xi", o.opt.xi, "inflection probe location in (0,1)");
    cmd->add_option("--max-iters", o.opt.max_outer_iters,
                    "outer iteration cap");
    cmd->add_option("--inner-iters", o.opt.inner_iters,
                    "direction-finder iteration cap");
    cmd->add_option("--init-iters", o.opt.init_iters,
                    "projected-subgradient iterations per phase");
    cmd->add_option("--trace-out", o.trace_out, "iteration trace CSV path");
  }
}

// Portable deterministic uniform draw in [0, 1).
double uniform01(std::mt19937& gen) {
  return std::ldexp(static_cast<double>(gen()), -32);
}

Eigen::VectorXd resolve_start(const Options& o,
                              const gridmin::SupplyPolytope& poly) {
  if (o.start == "auto") return gridmin::centroid_start(poly);
  if (o.start == "random") {
    std::mt19937 gen(static_cast<std::mt19937::result_type>(o.seed));
    Eigen::VectorXd y(poly.dim);
    for (int i = 0; i < poly.dim; ++i)
      y(i) = uniform01(gen) * poly.b2(i);
    return gridmin::project(poly, y);
  }
  std::stringstream ss(o.start);
  std::vector<double> vals;
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw gridmin::InputError("cannot parse start component '" + item + "'");
    }
  }
  if (static_cast<int>(vals.size()) != poly.dim)
    throw gridmin::InputError(
        "start vector has " + std::to_string(vals.size()) +
        " components, expected " + std::to_string(poly.dim));
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
  return gridmin::project(poly, y);
}

void emit_result(const Options& o, const nlohmann::json& doc) {
  const std::string text = doc.dump(2) + "\n";
  if (o.result_out.empty())
    std::cout << text;
  else
    gridmin::write_text_file(o.result_out, text);
}

void emit_trace(const Options& o, const gridmin::RunResult& run, int dim) {
  if (o.trace_out.empty()) return;
  gridmin::write_text_file(o.trace_out, gridmin::trace_to_csv(run.trace, dim));
}

int run_command(const std::string& method, const Options& o) {
  const gridmin::PowerNetwork net = gridmin::load_network(o.network_path);
  const gridmin::LinearizedSystem lin = gridmin::build_linearization(net);
  const gridmin::SupplyPolytope poly = gridmin::build_polytope(net);
  gridmin::DerivativeOptions dopts;
  dopts.delta_fd = o.delta_fd;
  const gridmin::Evaluator ev(net, lin, poly, o.r, {}, dopts);
  const Eigen::VectorXd start = resolve_start(o, poly);

  if (method == "project") {
    // The start vector is parsed unprojected here: report the projection.
    nlohmann::json doc;
    doc["schema"] = "gridmin-projection/1";
    Eigen::VectorXd y;
    if (o.start == "auto" || o.start == "random") {
      y = start;
    } else {
      std::stringstream ss(o.start);
      std::vector<double> vals;
      std::string item;
      while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
      y = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
    }
    const Eigen::VectorXd px = gridmin::project(poly, y);
    doc["input"] = std::vector<double>(y.data(), y.data() + y.size());
    doc["projection"] = std::vector<double>(px.data(), px.data() + px.size());
    doc["distance"] = (px - y).norm();
    doc["min_slack"] = gridmin::contains(poly, px).min_slack;
    emit_result(o, doc);
    return 0;
  }

  if (method == "evaluate") {
    const gridmin::ObjectiveEvaluation eval = ev.evaluate(start);
    emit_result(o, gridmin::result_to_json(net, eval, start));
    return 0;
  }

  if (method == "gradient") {
    gridmin::SigmaDerivativeEngine engine(net, lin, start, dopts);
    std::vector<gridmin::SigmaDerivativeBundle> bundles;
    for (int k = 0; k < net.n_edges; ++k) bundles.push_back(engine.bundle(k));
    const double change =
        gridmin::richardson_gradient_change(net, lin, start, 0, dopts);
    if (change > 1e-3)
      std::cerr << "warning: gradient moved by " << change
                << " (relative) when halving delta-fd; consider a smaller "
                   "step\n";
    emit_result(o, gridmin::gradients_to_json(net, start, bundles, change));
    return 0;
  }

  gridmin::RunResult run;
  if (method == "init")
    run = gridmin::init_subgradient(ev, start, o.opt);
  else if (method == "descend")
    run = gridmin::steepest_descent(ev, start, o.opt);
  else
    run = gridmin::two_step(ev, start, o.opt);

  emit_trace(o, run, poly.dim);
  emit_result(o, gridmin::result_to_json(net, run, ev.evaluate(run.p_opt)));
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
  if (run.termination == gridmin::Termination::IterationCap) {
    std::cerr << "error: outer iteration cap reached without termination\n";
    return static_cast<int>(gridmin::ErrorCode::IterationCap);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic power dispatch objective: evaluation and "
               "minimization over the feasible supply polytope"};
  app.require_subcommand(1);

  Options o;
  const std::vector<std::pair<std::string, std::string>> methods = {
      {"evaluate", "evaluate the objective at the start vector"},
      {"gradient", "dump sigma gradients and Hessians per edge"},
      {"init", "two-phase projected generalized subgradient initialization"},
      {"descend", "steepest descent with Armijo backtracking"},
      {"two-step", "init followed by descent"},
      {"project", "project the start vector onto the feasible polytope"},
  };
  for (const auto& [name, desc] : methods) {
    CLI::App* sub = app.add_subcommand(name, desc);
    const bool knobs = (name == "init" || name == "descend" ||
                        name == "two-step");
    add_common_options(sub, o, knobs);
  }

  CLI11_PARSE(app, argc, argv);

  const std::string method = app.get_subcommands().front()->get_name();
  try {
    return run_command(method, o);
  } catch (const gridmin::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(gridmin::ErrorCode::Numerical);
  }
}
