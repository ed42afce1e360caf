#ifndef GRIDMIN_DIRECTIONAL_HPP
#define GRIDMIN_DIRECTIONAL_HPP

#include <Eigen/Dense>
#include <deque>
#include <memory>
#include <vector>

#include "gridmin/objective.hpp"
#include "gridmin/polytope.hpp"
#include "gridmin/sigma_derivatives.hpp"

namespace gridmin {

struct CaseLabel {
  CaseKind kind = CaseKind::Case11;
  std::vector<int> edges;       // the unique maximizer, or the I_max set
  std::vector<int> zero_edges;  // maximizers with vanishing mean term
};

CaseLabel classify(const ObjectiveEvaluation& ev);

// One element of the generalized gradient of f: the generalized gradient
// of a selected maximizing edge, with the kink branch parametrized by
// theta in [0,1].
struct Subgradient {
  Eigen::VectorXd g;
  double theta = 0.5;
  int source_edge = 0;  // 0-based
};

/// Binds a network, its linearization, the feasible polytope and the risk
/// weight r, and serves objective values and derivatives with per-point
/// caching (an inner direction search issues hundreds of queries at one
/// p).  Not safe for concurrent use; the underlying free functions are
/// pure, so use one Evaluator per thread.
class Evaluator {
 public:
  Evaluator(const PowerNetwork& net, const LinearizedSystem& lin,
            const SupplyPolytope& poly, double r, Tolerances tol = {},
            DerivativeOptions dopts = {}, double theta = 0.5);

  const PowerNetwork& net() const { return net_; }
  const LinearizedSystem& lin() const { return lin_; }
  const SupplyPolytope& polytope() const { return poly_; }
  double r() const { return r_; }
  const Tolerances& tol() const { return tol_; }
  const DerivativeOptions& derivative_options() const { return dopts_; }

  ObjectiveEvaluation evaluate(const Eigen::VectorXd& p) const;
  SigmaDerivativeEngine& derivatives(const Eigen::VectorXd& p) const;
  Eigen::VectorXd sigma_gradient(const Eigen::VectorXd& p, int edge) const;
  Eigen::MatrixXd sigma_hessian(const Eigen::VectorXd& p, int edge) const;

  // First directional derivative f'(p, v).  Requires p + v feasible, the
  // standing assumption of the case formulas.
  double first_directional(const Eigen::VectorXd& p,
                           const Eigen::VectorXd& v) const;

  // Second directional derivative with the Taylor normalization
  // f(p + t v) ~ f + t f' + t^2/2 f''.
  double second_directional(const Eigen::VectorXd& p,
                            const Eigen::VectorXd& v) const;

  // Per-edge value f_k'(p, v); no feasibility check (inner-loop helper).
  double edge_first_directional(const Eigen::VectorXd& p, int k,
                                const Eigen::VectorXd& v) const;

  Subgradient generalized_subgradient(const Eigen::VectorXd& p) const;
  Subgradient generalized_subgradient(const Eigen::VectorXd& p,
                                      double theta) const;

  // Subgradient of the direction function v -> f'(p, v) at v, used by
  // the projected-subgradient direction finder.
  Eigen::VectorXd direction_subgradient(const Eigen::VectorXd& p,
                                        const Eigen::VectorXd& v) const;

  void require_feasible(const Eigen::VectorXd& p, const char* what) const;

 private:
  const ObjectiveEvaluation& cached_eval(const Eigen::VectorXd& p) const;

  const PowerNetwork& net_;
  const LinearizedSystem& lin_;
  const SupplyPolytope& poly_;
  double r_;
  Tolerances tol_;
  DerivativeOptions dopts_;
  double theta_;

  struct EvalSlot {
    Eigen::VectorXd p;
    ObjectiveEvaluation ev;
  };
  mutable std::deque<EvalSlot> eval_cache_;
  mutable std::unique_ptr<SigmaDerivativeEngine> engine_;
};

}  // namespace gridmin

#endif  // GRIDMIN_DIRECTIONAL_HPP
