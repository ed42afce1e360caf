#include "gridmin/objective.hpp"

#include <algorithm>
#include <cmath>

#include "gridmin/errors.hpp"
#include "gridmin/linearization.hpp"
#include "gridmin/lyapunov.hpp"
#include "gridmin/network.hpp"

namespace gridmin {

const char* case_name(CaseKind kind) {
  switch (kind) {
    case CaseKind::Case11: return "case1.1";
    case CaseKind::Case12: return "case1.2";
    case CaseKind::Case2: return "case2";
  }
  return "?";
}

bool ObjectiveEvaluation::is_zero_edge(int k) const {
  return std::find(zero_edges.begin(), zero_edges.end(), k) !=
         zero_edges.end();
}

ObjectiveEvaluation evaluate_objective(const PowerNetwork& net,
                                       const LinearizedSystem& lin,
                                       const Eigen::VectorXd& p_s, double r,
                                       const Tolerances& tol) {
  const ReducedSystem red =
      reduce_system(net, lin, p_s, tol.saturation_margin);

  ObjectiveEvaluation ev;
  ev.r = r;
  ev.sines = red.sines;

  const LyapunovSolver solver(red.j_d);
  const Eigen::MatrixXd q = solver.solve(red.k_d * red.k_d.transpose());
  const Eigen::MatrixXd q_y = red.c_d * q * red.c_d.transpose();

  const int n_e = net.n_edges;
  ev.mean_term.resize(n_e);
  ev.sigma.resize(n_e);
  ev.variance.resize(n_e);
  ev.f_edge.resize(n_e);
  for (int k = 0; k < n_e; ++k) {
    ev.mean_term(k) = std::asin(std::abs(ev.sines(k)));
    ev.variance(k) = std::max(0.0, q_y(k, k));
    ev.sigma(k) = std::sqrt(ev.variance(k));
    ev.f_edge(k) = ev.mean_term(k) + r * ev.sigma(k);
  }
  ev.f = ev.f_edge.maxCoeff();

  const double tie = tol.tol_max(ev.f);
  for (int k = 0; k < n_e; ++k)
    if (ev.f_edge(k) >= ev.f - tie) ev.i_max.push_back(k);
  for (int k : ev.i_max)
    if (std::abs(ev.sines(k)) <= tol.tol_zero) ev.zero_edges.push_back(k);

  if (ev.i_max.size() >= 2)
    ev.kind = CaseKind::Case2;
  else
    ev.kind = ev.zero_edges.empty() ? CaseKind::Case11 : CaseKind::Case12;
  return ev;
}

}  // namespace gridmin
