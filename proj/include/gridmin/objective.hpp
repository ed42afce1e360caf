#ifndef GRIDMIN_OBJECTIVE_HPP
#define GRIDMIN_OBJECTIVE_HPP

#include <Eigen/Dense>
#include <vector>

namespace gridmin {

struct PowerNetwork;
struct LinearizedSystem;

// Nondifferentiability taxonomy of the objective at a point: a unique
// maximizing edge with nonzero / zero mean term, or several maximizers.
enum class CaseKind { Case11, Case12, Case2 };

const char* case_name(CaseKind kind);

struct Tolerances {
  double tol_zero = 1e-10;     // |x_k| below this counts as a kink (Case 1.2)
  double tol_max_rel = 1e-9;   // I_max ties: f_k >= f - tol_max_rel*max(1,|f|)
  double saturation_margin = 1e-9;
  double membership = 1e-9;

  double tol_max(double f) const {
    return tol_max_rel * std::max(1.0, std::abs(f));
  }
};

/// Value of the control objective at one supply vector: per-edge mean
/// term m_k = arcsin|x_k|, stationary standard deviation sigma_k, the
/// composites f_k = m_k + r sigma_k, their maximum f, and the set of
/// maximizing edges.
struct ObjectiveEvaluation {
  Eigen::VectorXd sines;      // x = a_sync p + b_sync
  Eigen::VectorXd mean_term;  // m_k
  Eigen::VectorXd sigma;
  Eigen::VectorXd variance;   // sigma_k^2
  Eigen::VectorXd f_edge;     // f_k
  double f = 0.0;
  double r = 0.0;
  std::vector<int> i_max;     // 0-based maximizing edges, ascending
  std::vector<int> zero_edges;  // members of i_max with |x_k| <= tol_zero
  CaseKind kind = CaseKind::Case11;

  int top_edge() const { return i_max.front(); }
  bool is_zero_edge(int k) const;
};

ObjectiveEvaluation evaluate_objective(const PowerNetwork& net,
                                       const LinearizedSystem& lin,
                                       const Eigen::VectorXd& p_s, double r,
                                       const Tolerances& tol = {});

}  // namespace gridmin

#endif  // GRIDMIN_OBJECTIVE_HPP
