#include "gridmin/linearization.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "gridmin/errors.hpp"
#include "gridmin/network.hpp"

namespace gridmin {

LinearizedSystem build_linearization(const PowerNetwork& net) {
  LinearizedSystem lin;
  lin.incidence = incidence_matrix(net);
  lin.m_inv_sqrt = net.inertias.cwiseSqrt().cwiseInverse();
  lin.m_inv_d = net.dampings.cwiseQuotient(net.inertias);

  const Eigen::MatrixXd laplacian =
      lin.incidence * net.weights.asDiagonal() * lin.incidence.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
  if (eig.info() != Eigen::Success)
    throw NumericalError("Laplacian eigendecomposition failed");

  const Eigen::VectorXd lambda = eig.eigenvalues();  // ascending
  const double lambda_max = lambda(net.n_vertices - 1);
  const double zero_tol = 1e-10 * std::max(1.0, lambda_max);
  if (net.n_vertices > 1 && lambda(1) <= zero_tol)
    throw NumericalError(
        "multiple near-zero Laplacian eigenvalues; graph not connected");

  lin.u0 = eig.eigenvectors().transpose();  // rows are eigenvectors
  lin.lambda_dag = Eigen::VectorXd::Zero(net.n_vertices);
  for (int i = 0; i < net.n_vertices; ++i)
    if (lambda(i) > zero_tol) lin.lambda_dag(i) = 1.0 / lambda(i);

  // Columns U_i - U_{n+} for i = 1..n+-1 and i = n++1..n_V.
  const int pivot = net.n_plus - 1;  // 0-based index of the dependent supply
  lin.e_cols.resize(net.n_vertices, net.n_vertices - 1);
  int col = 0;
  for (int i = 0; i < net.n_vertices; ++i) {
    if (i == pivot) continue;
    lin.e_cols.col(col++) = lin.u0.col(i) - lin.u0.col(pivot);
  }

  lin.sine_map = lin.incidence.transpose() * lin.u0.transpose() *
                 lin.lambda_dag.asDiagonal() * lin.e_cols;
  lin.a_sync = lin.sine_map.leftCols(net.n_plus - 1);
  lin.b_sync = lin.sine_map.rightCols(net.n_demand()) * (-net.p_demand);
  return lin;
}

void check_saturation(const Eigen::VectorXd& sines, double margin) {
  for (int k = 0; k < sines.size(); ++k) {
    if (std::abs(sines(k)) >= 1.0 - margin)
      throw SaturationError(
          k, sines(k),
          "edge " + std::to_string(k + 1) +
              " saturates: |sin| = " + std::to_string(std::abs(sines(k))));
  }
}

Eigen::VectorXd weight_diag(const PowerNetwork& net,
                            const Eigen::VectorXd& sines) {
  return net.weights.array() * (1.0 - sines.array().square()).sqrt();
}

Eigen::MatrixXd assemble_j_d(const Eigen::MatrixXd& stiff,
                             const Eigen::MatrixXd& damp, bool zeroth_order) {
  const int n = static_cast<int>(stiff.rows());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n - 1, 2 * n - 1);
  if (zeroth_order)
    j.block(0, n - 1, n - 1, n).rightCols(n - 1).setIdentity();
  j.block(n - 1, 0, n, n - 1) = -stiff.rightCols(n - 1);
  j.block(n - 1, n - 1, n, n) = -damp;
  return j;
}

Eigen::MatrixXd assemble_k_d(const Eigen::MatrixXd& transformed_noise) {
  const int n = static_cast<int>(transformed_noise.rows());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2 * n - 1, n);
  k.bottomRows(n) = transformed_noise;
  return k;
}

Eigen::MatrixXd assemble_c_d(const Eigen::MatrixXd& transformed_incidence) {
  const int n_e = static_cast<int>(transformed_incidence.rows());
  const int n = static_cast<int>(transformed_incidence.cols());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_e, 2 * n - 1);
  c.leftCols(n - 1) = transformed_incidence.rightCols(n - 1);
  return c;
}

ReducedSystem reduce_system(const PowerNetwork& net,
                            const LinearizedSystem& lin,
                            const Eigen::VectorXd& p_s,
                            double saturation_margin) {
  ReducedSystem red;
  red.sines = lin.sines(p_s);
  check_saturation(red.sines, saturation_margin);
  red.w_diag = weight_diag(net, red.sines);

  const Eigen::MatrixXd scaled_incidence =
      lin.m_inv_sqrt.asDiagonal() * lin.incidence;
  const Eigen::MatrixXd stiffness =
      scaled_incidence * red.w_diag.asDiagonal() * scaled_incidence.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(stiffness);
  if (eig.info() != Eigen::Success)
    throw NumericalError("stiffness eigendecomposition failed");
  red.u_p = eig.eigenvectors();
  red.stiffness_eigs = eig.eigenvalues();

  const double top = red.stiffness_eigs(net.n_vertices - 1);
  if (std::abs(red.stiffness_eigs(0)) > 1e-8 * std::max(1.0, top))
    throw NumericalError("leading stiffness eigenvalue is not the zero mode");

  const Eigen::MatrixXd stiff_t =
      red.u_p.transpose() * stiffness * red.u_p;
  const Eigen::MatrixXd damp_t =
      red.u_p.transpose() * lin.m_inv_d.asDiagonal() * red.u_p;
  red.j_d = assemble_j_d(stiff_t, damp_t, true);
  const Eigen::VectorXd scaled_noise = lin.m_inv_sqrt.cwiseProduct(net.noise);
  red.k_d = assemble_k_d(red.u_p.transpose() * scaled_noise.asDiagonal());
  red.c_d = assemble_c_d(lin.incidence.transpose() *
                         lin.m_inv_sqrt.asDiagonal() * red.u_p);
  return red;
}

}  // namespace gridmin
