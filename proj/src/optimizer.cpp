#include "gridmin/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "gridmin/errors.hpp"
#include "gridmin/network.hpp"

namespace gridmin {

void OptimizerConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw InputError("alpha must lie in (0, 0.5)");
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("beta must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw InputError("gamma must lie in (0, 1)");
  if (!(xi > 0.0 && xi < 1.0)) throw InputError("xi must lie in (0, 1)");
  if (!(eps_stop > 0.0)) throw InputError("eps must be positive");
  if (inner_iters < 1 || init_iters < 1 || max_outer_iters < 1)
    throw InputError("iteration budgets must be positive");
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::EpsStop: return "eps-stop";
    case Termination::Case51: return "case5.1";
    case Termination::Case52Minimizer: return "case5.2-minimizer";
    case Termination::Case52Flat: return "case5.2-flat";
    case Termination::FlatRegion: return "flat-region";
    case Termination::IterationCap: return "iteration-cap";
    case Termination::InitDone: return "init-done";
  }
  return "?";
}

DirectionResult steepest_direction(const Evaluator& ev,
                                   const Eigen::VectorXd& p,
                                   const OptimizerConfig& cfg) {
  const SupplyPolytope& poly = ev.polytope();
  DirectionResult best;
  best.v = Eigen::VectorXd::Zero(poly.dim);
  best.fprime = 0.0;  // f'(p, 0) = 0 seeds the running minimum

  Eigen::VectorXd v = best.v;
  for (int j = 1; j <= cfg.inner_iters; ++j) {
    const Eigen::VectorXd g = ev.direction_subgradient(p, v);
    const double alpha_j = 1.0 / std::pow(static_cast<double>(j), cfg.gamma);
    v = project(poly, p + v - alpha_j * g) - p;
    const double fd = ev.first_directional(p, v);
    if (fd < best.fprime) {
      best.fprime = fd;
      best.v = v;
    }
  }
  return best;
}

double line_search(const Evaluator& ev, const Eigen::VectorXd& p,
                   const Eigen::VectorXd& v, double fprime,
                   const OptimizerConfig& cfg) {
  if (!(fprime < 0.0))
    throw InputError("line search requires a descent direction");
  const double f0 = ev.evaluate(p).f;
  double t = 1.0;
  for (int m = 0; m <= cfg.max_line_search_halvings; ++m) {
    if (ev.evaluate(p + t * v).f <= f0 + cfg.alpha * t * fprime) return t;
    t *= cfg.beta;
  }
  throw IterationCapError(
      "line search exceeded " + std::to_string(cfg.max_line_search_halvings) +
      " halvings; the objective curvature blows up along this direction");
}

namespace {

// Curvature probe of Case 5.2 at p + xi v.  The probed direction is
// scaled to (1 - xi) v so the probe base plus direction stays feasible;
// the sign is scale-invariant.
double curvature_probe(const Evaluator& ev, const Eigen::VectorXd& p,
                       const Eigen::VectorXd& v, const OptimizerConfig& cfg) {
  auto probe_at = [&](double xi) {
    return ev.second_directional(p + xi * v, (1.0 - xi) * v);
  };
  if (!cfg.xi_three_probe) return probe_at(cfg.xi);
  int positive = 0, negative = 0;
  double last = 0.0;
  for (double xi : {0.25, 0.5, 0.75}) {
    last = probe_at(xi);
    if (last > cfg.fsecond_zero_tol) ++positive;
    if (last < -cfg.fsecond_zero_tol) ++negative;
  }
  if (positive >= 2) return std::abs(last) + 1.0;
  if (negative >= 2) return -std::abs(last) - 1.0;
  return 0.0;
}

double empirical_rate(const std::vector<double>& f_values) {
  // Smallest c with |f_k - f_0| <= c^k |f_1 - f_0| over the trace.
  if (f_values.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double base = std::abs(f_values[1] - f_values[0]);
  if (base == 0.0) return std::numeric_limits<double>::quiet_NaN();
  double c = 0.0;
  for (size_t k = 2; k < f_values.size(); ++k) {
    const double ratio = std::abs(f_values[k] - f_values[0]) / base;
    c = std::max(c, std::pow(ratio, 1.0 / static_cast<double>(k)));
  }
  return c;
}

}  // namespace

RunResult steepest_descent(const Evaluator& ev, const Eigen::VectorXd& p0,
                           const OptimizerConfig& cfg) {
  cfg.validate();
  ev.require_feasible(p0, "descent start");

  RunResult run;
  Eigen::VectorXd p = p0;
  double f_curr = ev.evaluate(p).f;
  run.trace.push_back({0, "descent", p, f_curr,
                       std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(),
                       case_name(ev.evaluate(p).kind)});

  std::deque<double> recent_f{f_curr};
  run.termination = Termination::IterationCap;
  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    const std::string case_here = case_name(ev.evaluate(p).kind);
    const DirectionResult dir = steepest_direction(ev, p, cfg);

    if (dir.fprime >= -cfg.fprime_zero_tol) {
      if (dir.v.norm() <= cfg.direction_zero_tol) {
        run.termination = Termination::Case51;
        break;
      }
      const double probe = curvature_probe(ev, p, dir.v, cfg);
      if (probe > cfg.fsecond_zero_tol) {
        run.termination = Termination::Case52Minimizer;
        break;
      }
      if (probe >= -cfg.fsecond_zero_tol) {
        run.warnings.push_back(
            "curvature probe is numerically zero; treating the point as a "
            "local minimizer");
        run.termination = Termination::Case52Flat;
        break;
      }
      // Inflection: take the full step and continue.
      const double f_next = ev.evaluate(p + dir.v).f;
      if (f_next >= f_curr) {
        run.warnings.push_back(
            "inflection step did not decrease the objective; stopping");
        run.termination = Termination::FlatRegion;
        break;
      }
      p += dir.v;
      f_curr = f_next;
      run.trace.push_back({iter, "descent", p, f_curr, dir.fprime, 1.0,
                           "inflection"});
      recent_f.push_back(f_curr);
      if (recent_f.size() > 20) recent_f.pop_front();
      if (recent_f.size() == 20 &&
          *std::max_element(recent_f.begin(), recent_f.end()) -
                  *std::min_element(recent_f.begin(), recent_f.end()) <
              1e-14) {
        run.warnings.push_back(
            "objective constant over 20 iterates with nonzero direction "
            "(flat neighborhood?)");
        run.termination = Termination::FlatRegion;
        break;
      }
      continue;
    }

    const double t = line_search(ev, p, dir.v, dir.fprime, cfg);
    const Eigen::VectorXd p_next = p + t * dir.v;
    const double f_next = ev.evaluate(p_next).f;
    const double decrease = f_curr - f_next;
    p = p_next;
    f_curr = f_next;
    run.trace.push_back({iter, "descent", p, f_curr, dir.fprime, t,
                         case_here});
    recent_f.push_back(f_curr);
    if (recent_f.size() > 20) recent_f.pop_front();
    if (decrease <= cfg.eps_stop) {
      run.termination = Termination::EpsStop;
      break;
    }
  }

  run.p_opt = p;
  run.f_opt = f_curr;
  std::vector<double> fs;
  fs.reserve(run.trace.size());
  for (const auto& row : run.trace) fs.push_back(row.f);
  run.empirical_rate = empirical_rate(fs);
  return run;
}

RunResult init_subgradient(const Evaluator& ev, const Eigen::VectorXd& p0,
                           const OptimizerConfig& cfg) {
  cfg.validate();
  ev.require_feasible(p0, "initialization start");

  RunResult run;
  Eigen::VectorXd p = p0;
  double f = ev.evaluate(p).f;
  run.p_opt = p;
  run.f_opt = f;
  run.trace.push_back({0, "init1", p, f,
                       std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(), ""});

  const auto phase = [&](const std::string& name, double exponent) {
    for (int k = 1; k <= cfg.init_iters; ++k) {
      const Subgradient sub = ev.generalized_subgradient(p);
      const double alpha_k =
          1.0 / std::pow(static_cast<double>(k), exponent);
      p = project(ev.polytope(), p - alpha_k * sub.g);
      f = ev.evaluate(p).f;
      if (f < run.f_opt) {
        run.f_opt = f;
        run.p_opt = p;
      }
      run.trace.push_back({k, name, p, f,
                           std::numeric_limits<double>::quiet_NaN(), alpha_k,
                           ""});
    }
  };

  phase("init1", cfg.init_phase1_exp);
  p = run.p_opt;  // phase 2 restarts the recursion from the best point
  phase("init2", cfg.init_phase2_exp);

  run.termination = Termination::InitDone;
  return run;
}

RunResult two_step(const Evaluator& ev, const Eigen::VectorXd& p0,
                   const OptimizerConfig& cfg) {
  RunResult init = init_subgradient(ev, p0, cfg);
  RunResult descent = steepest_descent(ev, init.p_opt, cfg);
  RunResult combined = descent;
  combined.trace = init.trace;
  combined.trace.insert(combined.trace.end(), descent.trace.begin(),
                        descent.trace.end());
  combined.warnings.insert(combined.warnings.begin(), init.warnings.begin(),
                           init.warnings.end());
  return combined;
}

}  // namespace gridmin
