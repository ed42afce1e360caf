#ifndef GRIDMIN_LYAPUNOV_HPP
#define GRIDMIN_LYAPUNOV_HPP

#include <Eigen/Dense>

namespace gridmin {

/// Solver for continuous-time Lyapunov equations A X + X A^T + Q = 0
/// with a Hurwitz system matrix A, via the real Schur form of A.
///
/// The Schur factorization is computed once at construction so that the
/// derivative cascade can reuse it for several right-hand sides.
class LyapunovSolver {
 public:
  explicit LyapunovSolver(const Eigen::MatrixXd& a,
                          double hurwitz_margin = kDefaultHurwitzMargin);

  // Solves A X + X A^T + Q = 0 for symmetric Q.  The result is
  // symmetrized explicitly; the residual contract
  //   ||A X + X A^T + Q||_F <= 1e-10 * max(1, ||Q||_F)
  // is verified and violations throw NumericalError.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& q) const;

  // Largest real part over the spectrum of A.
  double spectral_abscissa() const { return abscissa_; }

  static constexpr double kDefaultHurwitzMargin = 1e-10;

 private:
  Eigen::MatrixXd a_;
  Eigen::MatrixXd u_;  // orthogonal Schur basis
  Eigen::MatrixXd t_;  // quasi upper-triangular factor
  double abscissa_ = 0.0;
};

// One-shot convenience wrapper.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& q);

}  // namespace gridmin

#endif  // GRIDMIN_LYAPUNOV_HPP
