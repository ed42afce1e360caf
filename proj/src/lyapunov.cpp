#include "gridmin/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

#include "gridmin/errors.hpp"

namespace gridmin {

namespace {

// Start indices of the 1x1 / 2x2 diagonal blocks of a real Schur factor.
std::vector<int> schur_blocks(const Eigen::MatrixXd& t) {
  std::vector<int> starts;
  const int n = static_cast<int>(t.rows());
  int i = 0;
  while (i < n) {
    starts.push_back(i);
    if (i + 1 < n && t(i + 1, i) != 0.0)
      i += 2;
    else
      i += 1;
  }
  starts.push_back(n);
  return starts;
}

// Solves the small Sylvester system T1 Y + Y T2^T = R (sizes <= 2).
Eigen::MatrixXd solve_small_sylvester(const Eigen::MatrixXd& t1,
                                      const Eigen::MatrixXd& t2,
                                      const Eigen::MatrixXd& r) {
  const int n1 = static_cast<int>(t1.rows());
  const int n2 = static_cast<int>(t2.rows());
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n1 * n2, n1 * n2);
  // vec(T1 Y) = (I (x) T1) vec(Y);  vec(Y T2^T) = (T2 (x) I) vec(Y)
  for (int j = 0; j < n2; ++j)
    sys.block(j * n1, j * n1, n1, n1) = t1;
  for (int j = 0; j < n2; ++j)
    for (int l = 0; l < n2; ++l)
      sys.block(j * n1, l * n1, n1, n1) +=
          t2(j, l) * Eigen::MatrixXd::Identity(n1, n1);
  Eigen::VectorXd rhs(n1 * n2);
  for (int j = 0; j < n2; ++j) rhs.segment(j * n1, n1) = r.col(j);
  const Eigen::VectorXd y = sys.partialPivLu().solve(rhs);
  Eigen::MatrixXd out(n1, n2);
  for (int j = 0; j < n2; ++j) out.col(j) = y.segment(j * n1, n1);
  return out;
}

}  // namespace

LyapunovSolver::LyapunovSolver(const Eigen::MatrixXd& a,
                               double hurwitz_margin)
    : a_(a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw InputError("Lyapunov system matrix must be square and nonempty");

  Eigen::RealSchur<Eigen::MatrixXd> schur(a);
  if (schur.info() != Eigen::Success)
    throw NumericalError("real Schur factorization failed");
  u_ = schur.matrixU();
  t_ = schur.matrixT();

  abscissa_ = -std::numeric_limits<double>::infinity();
  const auto starts = schur_blocks(t_);
  for (size_t b = 0; b + 1 < starts.size(); ++b) {
    const int i = starts[b];
    const int len = starts[b + 1] - i;
    const double re =
        len == 1 ? t_(i, i) : 0.5 * (t_(i, i) + t_(i + 1, i + 1));
    abscissa_ = std::max(abscissa_, re);
  }
  if (abscissa_ >= -hurwitz_margin)
    throw NumericalError(
        "system matrix is not Hurwitz: eigenvalue real part " +
        std::to_string(abscissa_) + " exceeds -" +
        std::to_string(hurwitz_margin));
}

Eigen::MatrixXd LyapunovSolver::solve(const Eigen::MatrixXd& q) const {
  const int n = static_cast<int>(a_.rows());
  if (q.rows() != n || q.cols() != n)
    throw InputError("right-hand side has wrong dimensions");
  const double q_norm = q.norm();
  if ((q - q.transpose()).norm() > 1e-12 * std::max(1.0, q_norm))
    throw InputError("Lyapunov right-hand side must be symmetric");
  const Eigen::MatrixXd q_sym = 0.5 * (q + q.transpose());

  // T Y + Y T^T = -U^T Q U, solved blockwise from the bottom-right corner.
  const Eigen::MatrixXd q_t = u_.transpose() * q_sym * u_;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
  const auto starts = schur_blocks(t_);
  const int nb = static_cast<int>(starts.size()) - 1;

  auto blk = [&](const Eigen::MatrixXd& m, int bi, int bj) {
    return m.block(starts[bi], starts[bj], starts[bi + 1] - starts[bi],
                   starts[bj + 1] - starts[bj]);
  };

  for (int bi = nb - 1; bi >= 0; --bi) {
    for (int bj = nb - 1; bj >= bi; --bj) {
      Eigen::MatrixXd rhs = -blk(q_t, bi, bj);
      for (int bk = bi + 1; bk < nb; ++bk)
        rhs -= blk(t_, bi, bk) * blk(y, bk, bj);
      for (int bl = bj + 1; bl < nb; ++bl)
        rhs -= blk(y, bi, bl) * blk(t_, bj, bl).transpose();
      const Eigen::MatrixXd y_ij =
          solve_small_sylvester(blk(t_, bi, bi), blk(t_, bj, bj), rhs);
      y.block(starts[bi], starts[bj], y_ij.rows(), y_ij.cols()) = y_ij;
      if (bj != bi)
        y.block(starts[bj], starts[bi], y_ij.cols(), y_ij.rows()) =
            y_ij.transpose();
    }
  }

  Eigen::MatrixXd x = u_ * y * u_.transpose();
  x = 0.5 * (x + x.transpose());

  const double residual = (a_ * x + x * a_.transpose() + q_sym).norm();
  if (residual > 1e-10 * std::max(1.0, q_norm))
    throw NumericalError("Lyapunov residual " + std::to_string(residual) +
                         " exceeds tolerance");
  return x;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& q) {
  return LyapunovSolver(a).solve(q);
}

}  // namespace gridmin
