#include "gridmin/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gridmin/errors.hpp"
#include "gridmin/network.hpp"

namespace gridmin {

namespace {

// Stacked inequality rows C p >= d describing P+.  The nonnegativity row
// for p(0) and the first cumulative row are parallel (A1 row 1 is e1), so
// they are merged into one row with the tighter bound.
struct ConstraintRows {
  Eigen::MatrixXd c;
  Eigen::VectorXd d;
};

ConstraintRows constraint_rows(const SupplyPolytope& poly) {
  const int n = poly.dim;
  const int m = 3 * n - 1;
  ConstraintRows rows;
  rows.c = Eigen::MatrixXd::Zero(m, n);
  rows.d = Eigen::VectorXd::Zero(m);
  int r = 0;
  for (int i = 0; i < n; ++i, ++r) {  // p(i) >= 0 (merged for i = 0)
    rows.c(r, i) = 1.0;
    rows.d(r) = (i == 0) ? std::max(0.0, poly.b1(0)) : 0.0;
  }
  for (int i = 1; i < n; ++i, ++r) {  // cumulative sums >= b1
    rows.c.row(r).head(i + 1).setOnes();
    rows.d(r) = poly.b1(i);
  }
  for (int i = 0; i < n; ++i, ++r) {  // p(i) <= b2(i)
    rows.c(r, i) = -1.0;
    rows.d(r) = -poly.b2(i);
  }
  return rows;
}

}  // namespace

SupplyPolytope build_polytope(const PowerNetwork& net) {
  SupplyPolytope poly;
  poly.dim = net.n_plus - 1;
  poly.p_sum_demand = net.total_demand();
  poly.a1 = Eigen::MatrixXd::Zero(poly.dim, poly.dim);
  poly.b1.resize(poly.dim);
  poly.b2 = net.p_max.head(poly.dim);
  poly.cap_last = net.p_max.tail(1);
  for (int i = 0; i < poly.dim; ++i) {
    poly.a1.row(i).head(i + 1).setOnes();
    // demand minus the capacity still available at supplies i+2..n_plus
    poly.b1(i) = poly.p_sum_demand - net.p_max.tail(net.n_plus - i - 1).sum();
  }
  return poly;
}

Membership contains(const SupplyPolytope& poly, const Eigen::VectorXd& p,
                    double tol) {
  if (p.size() != poly.dim)
    throw InputError("vector has length " + std::to_string(p.size()) +
                     ", polytope dimension is " + std::to_string(poly.dim));
  Membership m;
  m.slack_nonneg = p;
  m.slack_lower = poly.a1 * p - poly.b1;
  m.slack_upper = poly.b2 - p;
  m.min_slack = std::min({m.slack_nonneg.minCoeff(), m.slack_lower.minCoeff(),
                          m.slack_upper.minCoeff()});
  m.inside = m.min_slack >= -tol;
  return m;
}

Eigen::VectorXd proportional_point(const SupplyPolytope& poly) {
  const double total_cap = poly.b2.sum() + poly.cap_last(0);
  const double ratio =
      total_cap > 0.0 ? std::min(1.0, poly.p_sum_demand / total_cap) : 0.0;
  return ratio * poly.b2;
}

Eigen::VectorXd project(const SupplyPolytope& poly, const Eigen::VectorXd& y) {
  if (y.size() != poly.dim)
    throw InputError("projection input has wrong dimension");
  if (contains(poly, y, 0.0).inside) return y;

  const ConstraintRows rows = constraint_rows(poly);
  const int m = static_cast<int>(rows.d.size());
  const double scale = 1.0 + y.cwiseAbs().maxCoeff();

  Eigen::VectorXd x = proportional_point(poly);
  std::vector<int> working;
  int stall = 0;

  auto solve_subproblem = [&](Eigen::VectorXd& z, Eigen::VectorXd& mu) {
    const int w = static_cast<int>(working.size());
    if (w == 0) {
      z = y;
      mu.resize(0);
      return;
    }
    Eigen::MatrixXd cw(w, poly.dim);
    Eigen::VectorXd dw(w);
    for (int i = 0; i < w; ++i) {
      cw.row(i) = rows.c.row(working[i]);
      dw(i) = rows.d(working[i]);
    }
    mu = (cw * cw.transpose()).ldlt().solve(dw - cw * y);
    z = y + cw.transpose() * mu;
  };

  const int cap = 50 * (m + 1);
  for (int iter = 0; iter < cap; ++iter) {
    Eigen::VectorXd z, mu;
    solve_subproblem(z, mu);
    const Eigen::VectorXd step = z - x;

    if (step.cwiseAbs().maxCoeff() <= 1e-13 * scale) {
      if (working.empty()) return x;
      int drop = -1;
      double worst = -1e-12 * scale;
      for (int i = 0; i < static_cast<int>(working.size()); ++i)
        if (mu(i) < worst) {
          worst = mu(i);
          drop = i;
        }
      if (drop < 0) return x;  // KKT satisfied
      working.erase(working.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end())
        continue;
      const double descent = rows.c.row(i).dot(step);
      if (descent >= -1e-14 * scale) continue;
      const double slack = std::max(0.0, rows.c.row(i).dot(x) - rows.d(i));
      const double a = slack / (-descent);
      if (a < alpha) {
        alpha = a;
        blocking = i;
      }
    }
    x += alpha * step;
    if (blocking >= 0 && alpha < 1.0) {
      // Refuse additions that would make the working rows dependent.
      Eigen::MatrixXd cw(working.size() + 1, poly.dim);
      for (size_t i = 0; i < working.size(); ++i)
        cw.row(static_cast<int>(i)) = rows.c.row(working[i]);
      cw.row(static_cast<int>(working.size())) = rows.c.row(blocking);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(cw);
      if (lu.rank() == static_cast<int>(working.size()) + 1) {
        working.push_back(blocking);
        stall = 0;
      } else if (++stall > 2) {
        throw NumericalError("projection stalled on a degenerate polytope");
      }
    }
  }
  throw NumericalError("projection active-set iteration cap exceeded");
}

double max_step_to_boundary(const SupplyPolytope& poly,
                            const Eigen::VectorXd& p,
                            const Eigen::VectorXd& d) {
  if (d.size() != poly.dim || p.size() != poly.dim)
    throw InputError("dimension mismatch in boundary step");
  if (d.cwiseAbs().maxCoeff() == 0.0)
    throw InputError("direction must be nonzero");
  if (!contains(poly, p, 1e-9).inside)
    throw InputError("boundary step requires a feasible base point");

  const ConstraintRows rows = constraint_rows(poly);
  double t = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows.d.size(); ++i) {
    const double towards = rows.c.row(i).dot(d);
    if (towards >= 0.0) continue;
    const double slack = std::max(0.0, rows.c.row(i).dot(p) - rows.d(i));
    t = std::min(t, slack / (-towards));
  }
  if (!std::isfinite(t))
    throw NumericalError("unbounded ray inside a compact polytope");
  return t;
}

Eigen::VectorXd centroid_start(const SupplyPolytope& poly,
                               double interior_slack) {
  const Eigen::VectorXd anchor = project(poly, 0.5 * poly.b2);
  const Eigen::VectorXd prop = proportional_point(poly);
  Eigen::VectorXd best = anchor;
  double best_slack = contains(poly, anchor).min_slack;
  for (int i = 1; i <= 100 && best_slack < interior_slack; ++i) {
    const double lambda = i / 100.0;
    const Eigen::VectorXd cand = (1.0 - lambda) * anchor + lambda * prop;
    const double s = contains(poly, cand).min_slack;
    if (s > best_slack) {
      best_slack = s;
      best = cand;
    }
  }
  return best;
}

}  // namespace gridmin
