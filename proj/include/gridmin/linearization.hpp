#ifndef GRIDMIN_LINEARIZATION_HPP
#define GRIDMIN_LINEARIZATION_HPP

#include <Eigen/Dense>

namespace gridmin {

struct PowerNetwork;

/// Per-network synchronous-state machinery.
///
/// The sines of the phase-angle differences at the synchronous state are
/// the affine map  x(p_s) = a_sync p_s + b_sync,  obtained from the
/// pseudoinverse of the weighted Laplacian B W B^T.  The factorization
/// convention is B W B^T = u0^T diag(lambda) u0 (rows of u0 are
/// eigenvectors, eigenvalues ascending so the null mode comes first),
/// which makes (B W B^T)^dagger = u0^T diag(lambda_dag) u0.
struct LinearizedSystem {
  Eigen::MatrixXd a_sync;      // n_E x (n_plus-1)
  Eigen::VectorXd b_sync;      // n_E
  Eigen::MatrixXd u0;          // n_V x n_V
  Eigen::VectorXd lambda_dag;  // pseudo-inverted Laplacian eigenvalues
  Eigen::MatrixXd e_cols;      // n_V x (n_V-1): columns U_i - U_{n+}, i != n+
  Eigen::MatrixXd sine_map;    // n_E x (n_V-1) = B^T u0^T diag(lambda_dag) e_cols

  // Cached network quantities used by the reduction and the cascade.
  Eigen::MatrixXd incidence;    // B
  Eigen::VectorXd m_inv_sqrt;   // diag of M^{-1/2}
  Eigen::VectorXd m_inv_d;      // diag of M^{-1} D

  Eigen::VectorXd sines(const Eigen::VectorXd& p_s) const {
    return a_sync * p_s + b_sync;
  }
};

LinearizedSystem build_linearization(const PowerNetwork& net);

// Throws SaturationError naming the first edge with |x_k| >= 1 - margin.
void check_saturation(const Eigen::VectorXd& sines, double margin = 1e-9);

// Operating-point weights W(p_s): w_k * cos(arcsin(x_k)) = w_k sqrt(1-x_k^2).
Eigen::VectorXd weight_diag(const PowerNetwork& net,
                            const Eigen::VectorXd& sines);

/// The zero-mode-deleted (Hurwitz) state space at one operating point:
/// state dimension 2 n_V - 1, inputs n_V (nodal noise), outputs n_E
/// (phase-angle differences).
struct ReducedSystem {
  Eigen::VectorXd sines;           // x = a_sync p + b_sync
  Eigen::VectorXd w_diag;          // W(p_s) diagonal
  Eigen::MatrixXd u_p;             // columns diagonalize M^{-1/2} B W(p) B^T M^{-1/2}
  Eigen::VectorXd stiffness_eigs;  // ascending; first is the structural zero
  Eigen::MatrixXd j_d;             // (2 n_V - 1)^2
  Eigen::MatrixXd k_d;             // (2 n_V - 1) x n_V
  Eigen::MatrixXd c_d;             // n_E x (2 n_V - 1)
};

ReducedSystem reduce_system(const PowerNetwork& net,
                            const LinearizedSystem& lin,
                            const Eigen::VectorXd& p_s,
                            double saturation_margin = 1e-9);

// Block assembly shared with the derivative cascade.  `stiff` is
// Ua^T M^{-1/2} B W B^T M^{-1/2} Ub, `damp` is Ua^T M^{-1} D Ub; the
// zeroth-order system matrix carries the identity in its top-right block,
// higher perturbation orders are zero there.
Eigen::MatrixXd assemble_j_d(const Eigen::MatrixXd& stiff,
                             const Eigen::MatrixXd& damp, bool zeroth_order);
Eigen::MatrixXd assemble_k_d(const Eigen::MatrixXd& transformed_noise);
Eigen::MatrixXd assemble_c_d(const Eigen::MatrixXd& transformed_incidence);

}  // namespace gridmin

#endif  // GRIDMIN_LINEARIZATION_HPP
