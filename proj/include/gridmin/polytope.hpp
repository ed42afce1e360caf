#ifndef GRIDMIN_POLYTOPE_HPP
#define GRIDMIN_POLYTOPE_HPP

#include <Eigen/Dense>

namespace gridmin {

struct PowerNetwork;

/// Feasibility report for one decision vector (see SupplyPolytope).
struct Membership {
  bool inside = false;
  Eigen::VectorXd slack_nonneg;  // p(i) - 0
  Eigen::VectorXd slack_lower;   // (A1 p)(i) - b1(i)
  Eigen::VectorXd slack_upper;   // b2(i) - p(i)
  double min_slack = 0.0;
};

/// The feasible set of supply decision vectors,
///   P+ = { p in R^dim : p >= 0, b1 <= A1 p, p <= b2 },
/// where dim = n_plus - 1, A1 is the lower-triangular all-ones matrix
/// (so (A1 p)(i) is the cumulative sum of the first i supplies),
///   b1(i) = total demand - sum of capacities of supplies i+1..n_plus,
///   b2(i) = capacity of supply i.
/// Row i of b1 states that the first i supplies together with the
/// remaining capacity can still cover the demand; row dim in particular
/// caps the reconstructed last supply at its capacity.
struct SupplyPolytope {
  int dim = 0;
  Eigen::MatrixXd a1;
  Eigen::VectorXd b1;
  Eigen::VectorXd b2;
  double p_sum_demand = 0.0;
  Eigen::VectorXd cap_last;  // capacity of the dependent supply, size 1

  // Reconstructed dependent supply p_{n+} for a decision vector.
  double last_supply(const Eigen::VectorXd& p) const {
    return p_sum_demand - p.sum();
  }
};

SupplyPolytope build_polytope(const PowerNetwork& net);

Membership contains(const SupplyPolytope& poly, const Eigen::VectorXd& p,
                    double tol = 1e-9);

// Euclidean projection onto P+ by a primal active-set method; exact at
// desk scale, KKT residual <= 1e-10.
Eigen::VectorXd project(const SupplyPolytope& poly, const Eigen::VectorXd& y);

// Largest t >= 0 with p + t*d in P+ (ratio test over all constraints).
// Requires p in P+ and d != 0; compactness guarantees a finite value.
double max_step_to_boundary(const SupplyPolytope& poly,
                            const Eigen::VectorXd& p,
                            const Eigen::VectorXd& d);

// Always-feasible proportional dispatch point: capacities scaled by
// total demand / total capacity.
Eigen::VectorXd proportional_point(const SupplyPolytope& poly);

// Box-bound centroid b2/2 projected into P+, nudged toward the
// proportional point until all slacks exceed `interior_slack` when
// possible.  Used for the CLI's "auto" start.
Eigen::VectorXd centroid_start(const SupplyPolytope& poly,
                               double interior_slack = 1e-6);

}  // namespace gridmin

#endif  // GRIDMIN_POLYTOPE_HPP
