#ifndef GRIDMIN_SIGMA_DERIVATIVES_HPP
#define GRIDMIN_SIGMA_DERIVATIVES_HPP

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <utility>

#include "gridmin/linearization.hpp"
#include "gridmin/lyapunov.hpp"

namespace gridmin {

struct PowerNetwork;

struct DerivativeOptions {
  double delta_fd = 1e-4;        // step for eigenvector finite differences
  double degenerate_gap = 1e-6;  // refuse spectra clustered tighter than this
  double saturation_margin = 1e-9;
};

// Taylor coefficients of the diagonal of W(p_s + delta*mu) in delta.
struct WeightExpansion {
  Eigen::VectorXd w0, w1, w2;
};

// Taylor coefficients of the orthonormal transform U(delta), obtained by
// central differences with columns of U(+-Delta) aligned to U(0).
struct TransformExpansion {
  Eigen::MatrixXd u0, u1, u2;
};

// Perturbation orders of the reduced system matrices.
struct SystemExpansion {
  Eigen::MatrixXd jd0, jd1, jd2;
  Eigen::MatrixXd kd0, kd1, kd2;
  Eigen::MatrixXd cd0, cd1, cd2;
};

// Solutions of the three cascaded Lyapunov equations.
struct CascadeSolution {
  Eigen::MatrixXd q0, q1, q2;
};

/// Gradient and Hessian of sigma_i (and of the variance V_i) at one
/// supply vector, assembled from directional probes.
struct SigmaDerivativeBundle {
  int edge = 0;
  double sigma = 0.0;
  Eigen::VectorXd sigma_gradient;     // G1, length n_plus-1
  Eigen::MatrixXd sigma_hessian;      // H1, symmetric
  Eigen::VectorXd variance_gradient;  // G
  Eigen::MatrixXd variance_hessian;   // H
};

WeightExpansion weight_expansion(const PowerNetwork& net,
                                 const LinearizedSystem& lin,
                                 const Eigen::VectorXd& p_s,
                                 const Eigen::VectorXd& mu,
                                 double saturation_margin = 1e-9);

TransformExpansion transform_expansion(const PowerNetwork& net,
                                       const LinearizedSystem& lin,
                                       const Eigen::VectorXd& p_s,
                                       const Eigen::VectorXd& mu,
                                       const DerivativeOptions& opts = {});

// Solves the cascade 0 = Q^(m) Jd0^T + Jd0 Q^(m) + R^(m) where R^(0) is
// the noise Gramian and R^(1), R^(2) collect the lower-order terms of the
// Taylor-expanded Lyapunov equation.  `base` must factor sys.jd0.
CascadeSolution cascade_solve(const LyapunovSolver& base,
                              const SystemExpansion& sys);

/// Shares the per-point work of the derivative algorithm across probe
/// directions and edges: the base reduction, its Schur factorization and
/// the unperturbed covariance are computed once, each directional probe
/// (mu = e_k or e_k + e_j) once, and every probe serves all edges.
class SigmaDerivativeEngine {
 public:
  SigmaDerivativeEngine(const PowerNetwork& net, const LinearizedSystem& lin,
                        Eigen::VectorXd p_s, DerivativeOptions opts = {});

  struct Probe {
    int order = 0;  // 1: first-order data only; 2: full
    WeightExpansion w;
    TransformExpansion u;
    SystemExpansion sys;
    CascadeSolution q;
    Eigen::VectorXd v1;  // directional derivative of V_i along mu, per edge
    Eigen::VectorXd v2;  // mu^T Hess(V_i) mu, per edge (order 2 only)
  };

  // mu = e_k (order 1 suffices for gradients, 2 adds curvature data).
  const Probe& probe_single(int k, int order = 2);
  // mu = e_k + e_j, k < j; always order 2 (used only for off-diagonals).
  const Probe& probe_pair(int k, int j);

  SigmaDerivativeBundle bundle(int edge);
  Eigen::VectorXd sigma_gradient(int edge);
  // Gradients of every sigma_i stacked as rows (n_E x (n_plus-1)).
  Eigen::MatrixXd sigma_gradient_all();

  const ReducedSystem& reduced() const { return red_; }
  const Eigen::VectorXd& sigma() const { return sigma_; }
  const Eigen::VectorXd& point() const { return p_; }
  const LyapunovSolver& base_solver() const { return *solver_; }
  const Eigen::MatrixXd& q0() const { return q0_; }
  bool zero_noise() const { return zero_noise_; }

 private:
  Probe make_probe(const Eigen::VectorXd& mu, int order) const;

  const PowerNetwork& net_;
  const LinearizedSystem& lin_;
  Eigen::VectorXd p_;
  DerivativeOptions opts_;
  ReducedSystem red_;
  std::unique_ptr<LyapunovSolver> solver_;
  Eigen::MatrixXd q0_;
  Eigen::VectorXd sigma_;
  bool zero_noise_ = false;
  std::map<std::pair<int, int>, Probe> probes_;  // (k,-1) single, (k,j) pair
};

// One-shot convenience for a single edge (Algorithm 1 verbatim).
SigmaDerivativeBundle gradient_hessian_sigma(const PowerNetwork& net,
                                             const LinearizedSystem& lin,
                                             const Eigen::VectorXd& p_s,
                                             int edge,
                                             const DerivativeOptions& opts = {});

// Relative movement of the sigma_i gradient when the finite-difference
// step is halved; large values flag an ill-chosen delta_fd.
double richardson_gradient_change(const PowerNetwork& net,
                                  const LinearizedSystem& lin,
                                  const Eigen::VectorXd& p_s, int edge,
                                  const DerivativeOptions& opts = {});

}  // namespace gridmin

#endif  // GRIDMIN_SIGMA_DERIVATIVES_HPP
