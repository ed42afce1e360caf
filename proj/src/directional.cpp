#include "gridmin/directional.hpp"

#include <algorithm>
#include <cmath>

#include "gridmin/errors.hpp"
#include "gridmin/network.hpp"

namespace gridmin {

CaseLabel classify(const ObjectiveEvaluation& ev) {
  CaseLabel label;
  label.kind = ev.kind;
  label.edges = ev.i_max;
  label.zero_edges = ev.zero_edges;
  return label;
}

Evaluator::Evaluator(const PowerNetwork& net, const LinearizedSystem& lin,
                     const SupplyPolytope& poly, double r, Tolerances tol,
                     DerivativeOptions dopts, double theta)
    : net_(net),
      lin_(lin),
      poly_(poly),
      r_(r),
      tol_(tol),
      dopts_(dopts),
      theta_(theta) {
  if (!(r >= 0.0)) throw InputError("risk weight r must be nonnegative");
  if (theta < 0.0 || theta > 1.0)
    throw InputError("subgradient tie parameter theta must lie in [0,1]");
}

void Evaluator::require_feasible(const Eigen::VectorXd& p,
                                 const char* what) const {
  if (!contains(poly_, p, tol_.membership).inside)
    throw InputError(std::string(what) + " lies outside the feasible set");
}

const ObjectiveEvaluation& Evaluator::cached_eval(
    const Eigen::VectorXd& p) const {
  for (const auto& slot : eval_cache_)
    if (slot.p.size() == p.size() && (slot.p.array() == p.array()).all())
      return slot.ev;
  if (eval_cache_.size() >= 8) eval_cache_.pop_front();
  eval_cache_.push_back({p, evaluate_objective(net_, lin_, p, r_, tol_)});
  return eval_cache_.back().ev;
}

ObjectiveEvaluation Evaluator::evaluate(const Eigen::VectorXd& p) const {
  return cached_eval(p);
}

SigmaDerivativeEngine& Evaluator::derivatives(const Eigen::VectorXd& p) const {
  if (!engine_ || engine_->point().size() != p.size() ||
      !(engine_->point().array() == p.array()).all())
    engine_ = std::make_unique<SigmaDerivativeEngine>(net_, lin_, p, dopts_);
  return *engine_;
}

Eigen::VectorXd Evaluator::sigma_gradient(const Eigen::VectorXd& p,
                                          int edge) const {
  return derivatives(p).sigma_gradient(edge);
}

Eigen::MatrixXd Evaluator::sigma_hessian(const Eigen::VectorXd& p,
                                         int edge) const {
  return derivatives(p).bundle(edge).sigma_hessian;
}

double Evaluator::edge_first_directional(const Eigen::VectorXd& p, int k,
                                         const Eigen::VectorXd& v) const {
  const ObjectiveEvaluation& ev = cached_eval(p);
  const double x = ev.sines(k);
  const double av = lin_.a_sync.row(k).dot(v);
  const double sigma_term = r_ * derivatives(p).sigma_gradient(k).dot(v);
  if (std::abs(x) <= tol_.tol_zero) return std::abs(av) + sigma_term;
  const double slope = std::copysign(1.0 / std::sqrt(1.0 - x * x), x);
  return slope * av + sigma_term;
}

double Evaluator::first_directional(const Eigen::VectorXd& p,
                                    const Eigen::VectorXd& v) const {
  require_feasible(p, "base point");
  require_feasible(p + v, "p + v");
  const ObjectiveEvaluation& ev = cached_eval(p);
  double best = -std::numeric_limits<double>::infinity();
  for (int k : ev.i_max)
    best = std::max(best, edge_first_directional(p, k, v));
  return best;
}

double Evaluator::second_directional(const Eigen::VectorXd& p,
                                     const Eigen::VectorXd& v) const {
  require_feasible(p, "base point");
  require_feasible(p + v, "p + v");
  const ObjectiveEvaluation& ev = cached_eval(p);

  // Maximizers that also attain f'(p, v), the tie set of the Case 2 rule.
  std::vector<int> active;
  if (ev.i_max.size() == 1) {
    active = ev.i_max;
  } else {
    std::vector<double> fk(ev.i_max.size());
    double fbest = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ev.i_max.size(); ++i) {
      fk[i] = edge_first_directional(p, ev.i_max[i], v);
      fbest = std::max(fbest, fk[i]);
    }
    const double tie = tol_.tol_max(fbest);
    for (size_t i = 0; i < ev.i_max.size(); ++i)
      if (fk[i] >= fbest - tie) active.push_back(ev.i_max[i]);
  }

  double best = -std::numeric_limits<double>::infinity();
  for (int k : active) {
    const double x = ev.sines(k);
    const Eigen::MatrixXd hess = derivatives(p).bundle(k).sigma_hessian;
    double value = r_ * v.dot(hess * v);
    if (std::abs(x) > tol_.tol_zero) {
      const double av = lin_.a_sync.row(k).dot(v);
      value += std::pow(1.0 - x * x, -1.5) * std::abs(x) * av * av;
    }
    best = std::max(best, value);
  }
  return best;
}

Subgradient Evaluator::generalized_subgradient(const Eigen::VectorXd& p) const {
  return generalized_subgradient(p, theta_);
}

Subgradient Evaluator::generalized_subgradient(const Eigen::VectorXd& p,
                                               double theta) const {
  const ObjectiveEvaluation& ev = cached_eval(p);
  const int k = ev.top_edge();  // deterministic selection: lowest index
  Subgradient sub;
  sub.theta = theta;
  sub.source_edge = k;
  const Eigen::VectorXd row = lin_.a_sync.row(k).transpose();
  const Eigen::VectorXd sigma_part = r_ * derivatives(p).sigma_gradient(k);
  const double x = ev.sines(k);
  if (std::abs(x) > tol_.tol_zero) {
    sub.g =
        std::copysign(1.0 / std::sqrt(1.0 - x * x), x) * row + sigma_part;
  } else {
    sub.g = (2.0 * theta - 1.0) * row + sigma_part;
  }
  return sub;
}

Eigen::VectorXd Evaluator::direction_subgradient(
    const Eigen::VectorXd& p, const Eigen::VectorXd& v) const {
  const ObjectiveEvaluation& ev = cached_eval(p);

  // Select the maximizer attaining f'(p, v) (lowest index on ties).
  int k = ev.i_max.front();
  if (ev.i_max.size() > 1) {
    double best = -std::numeric_limits<double>::infinity();
    for (int cand : ev.i_max) {
      const double val = edge_first_directional(p, cand, v);
      if (val > best + 1e-15) {
        best = val;
        k = cand;
      }
    }
  }

  const Eigen::VectorXd row = lin_.a_sync.row(k).transpose();
  const Eigen::VectorXd sigma_part = r_ * derivatives(p).sigma_gradient(k);
  const double x = ev.sines(k);
  if (std::abs(x) > tol_.tol_zero)
    return std::copysign(1.0 / std::sqrt(1.0 - x * x), x) * row + sigma_part;

  const double av = row.dot(v);
  if (av > tol_.tol_zero) return row + sigma_part;
  if (av < -tol_.tol_zero) return -row + sigma_part;
  return (2.0 * theta_ - 1.0) * row + sigma_part;
}

}  // namespace gridmin
