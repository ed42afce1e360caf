#ifndef GRIDMIN_OPTIMIZER_HPP
#define GRIDMIN_OPTIMIZER_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gridmin/directional.hpp"

namespace gridmin {

struct OptimizerConfig {
  double alpha = 0.3;  // Armijo sufficient-decrease parameter, in (0, 0.5)
  double beta = 0.5;   // backtracking factor, in (0, 1)
  double gamma = 0.5;  // inner subgradient step exponent, in (0, 1)
  int inner_iters = 600;

  double init_phase1_exp = 0.5;
  double init_phase2_exp = 1.1;
  int init_iters = 300;  // per phase

  double eps_stop = 1e-6;
  double xi = 0.5;             // inflection probe location in (0, 1)
  bool xi_three_probe = false;  // probe {0.25, 0.5, 0.75} and take a vote
  int max_outer_iters = 500;
  int max_line_search_halvings = 60;

  double fprime_zero_tol = 1e-9;     // |f'| below this counts as stationary
  double direction_zero_tol = 1e-8;  // ||v*|| below this counts as zero
  double fsecond_zero_tol = 1e-9;    // curvature probe dead zone

  void validate() const;
};

enum class Termination {
  EpsStop,           // objective decrease fell below eps_stop
  Case51,            // v* = 0 and f' = 0: stationary point
  Case52Minimizer,   // f' = 0, v* != 0, positive curvature probe
  Case52Flat,        // curvature probe within the dead zone (warned)
  FlatRegion,        // inflection loop made no progress (warned)
  IterationCap,      // outer iteration budget exhausted
  InitDone,          // normal end of the projected-subgradient phases
};

const char* termination_name(Termination t);

// One accepted iterate.  `fprime` and `t` are NaN where not applicable
// (start rows; init rows use `t` for the step length alpha_k).
struct TraceRow {
  int iter = 0;
  std::string phase;
  Eigen::VectorXd p;
  double f = 0.0;
  double fprime = std::numeric_limits<double>::quiet_NaN();
  double t = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct RunResult {
  Eigen::VectorXd p_opt;
  double f_opt = 0.0;
  Termination termination = Termination::InitDone;
  std::vector<TraceRow> trace;
  std::vector<std::string> warnings;
  // Empirical convergence rate of the descent phase (logged; no contract).
  double empirical_rate = std::numeric_limits<double>::quiet_NaN();
};

struct DirectionResult {
  Eigen::VectorXd v;
  double fprime = 0.0;
};

// Algorithm-3 style projected subgradient search for the direction
// minimizing f'(p, .) over {v : p + v feasible}.  Never returns a
// positive value: v = 0 is feasible and seeds the running minimum.
DirectionResult steepest_direction(const Evaluator& ev,
                                   const Eigen::VectorXd& p,
                                   const OptimizerConfig& cfg);

// Armijo backtracking from t = 1; requires fprime < 0.  Throws
// IterationCapError past max_line_search_halvings.
double line_search(const Evaluator& ev, const Eigen::VectorXd& p,
                   const Eigen::VectorXd& v, double fprime,
                   const OptimizerConfig& cfg);

RunResult steepest_descent(const Evaluator& ev, const Eigen::VectorXd& p0,
                           const OptimizerConfig& cfg);

// Two-phase projected generalized subgradient initialization; returns the
// best visited point.
RunResult init_subgradient(const Evaluator& ev, const Eigen::VectorXd& p0,
                           const OptimizerConfig& cfg);

// init_subgradient followed by steepest_descent from its best point,
// with the traces concatenated (phases init1, init2, descent).
RunResult two_step(const Evaluator& ev, const Eigen::VectorXd& p0,
                   const OptimizerConfig& cfg);

}  // namespace gridmin

#endif  // GRIDMIN_OPTIMIZER_HPP
