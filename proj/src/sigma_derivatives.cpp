#include "gridmin/sigma_derivatives.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "gridmin/errors.hpp"
#include "gridmin/network.hpp"

namespace gridmin {

namespace {

// Aligns the columns of a perturbed eigenbasis to the base one: same
// ordering (ascending eigenvalues keep it stable away from clustered
// spectra) and positive diagonal inner products.  Finite differences of
// eigenvectors are meaningless without this step.
Eigen::MatrixXd align_to_base(const Eigen::MatrixXd& base,
                              Eigen::MatrixXd perturbed) {
  const int n = static_cast<int>(base.cols());
  for (int i = 0; i < n; ++i) {
    const double d = base.col(i).dot(perturbed.col(i));
    if (std::abs(d) < 0.9)
      throw DegenerateSpectrumError(
          "eigenvector " + std::to_string(i + 1) +
          " rotated too far under the probe step; spectrum too clustered");
    if (d < 0.0) perturbed.col(i) *= -1.0;
  }
  return perturbed;
}

void check_gaps(const Eigen::VectorXd& eigs, double gap_tol) {
  for (int i = 0; i + 1 < eigs.size(); ++i) {
    if (eigs(i + 1) - eigs(i) < gap_tol)
      throw DegenerateSpectrumError(
          "stiffness eigenvalues " + std::to_string(i + 1) + " and " +
          std::to_string(i + 2) + " are separated by " +
          std::to_string(eigs(i + 1) - eigs(i)) +
          "; eigenvector differences are ill-posed");
  }
}

Eigen::MatrixXd eigenbasis_at(const PowerNetwork& net,
                              const LinearizedSystem& lin,
                              const Eigen::VectorXd& sines,
                              double saturation_margin) {
  check_saturation(sines, saturation_margin);
  const Eigen::VectorXd w = weight_diag(net, sines);
  const Eigen::MatrixXd sb = lin.m_inv_sqrt.asDiagonal() * lin.incidence;
  const Eigen::MatrixXd stiffness =
      sb * w.asDiagonal() * sb.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(stiffness);
  if (eig.info() != Eigen::Success)
    throw NumericalError("stiffness eigendecomposition failed");
  return eig.eigenvectors();
}

}  // namespace

WeightExpansion weight_expansion(const PowerNetwork& net,
                                 const LinearizedSystem& lin,
                                 const Eigen::VectorXd& p_s,
                                 const Eigen::VectorXd& mu,
                                 double saturation_margin) {
  const Eigen::VectorXd x = lin.sines(p_s);
  check_saturation(x, saturation_margin);
  const Eigen::ArrayXd a = (lin.a_sync * mu).array();
  const Eigen::ArrayXd xs = x.array();
  const Eigen::ArrayXd one_minus = 1.0 - xs.square();
  const Eigen::ArrayXd inv_sq = one_minus.rsqrt();

  WeightExpansion w;
  w.w0 = net.weights.array() * one_minus.sqrt();
  w.w1 = net.weights.array() * (-xs * inv_sq * a);
  w.w2 = net.weights.array() *
         (-0.5 * a.square() * inv_sq -
          0.5 * xs.square() * a.square() * inv_sq.cube());
  return w;
}

TransformExpansion transform_expansion(const PowerNetwork& net,
                                       const LinearizedSystem& lin,
                                       const Eigen::VectorXd& p_s,
                                       const Eigen::VectorXd& mu,
                                       const DerivativeOptions& opts) {
  const Eigen::VectorXd x = lin.sines(p_s);
  const Eigen::VectorXd a = lin.a_sync * mu;
  const double delta = opts.delta_fd;

  TransformExpansion t;
  t.u0 = eigenbasis_at(net, lin, x, opts.saturation_margin);
  const Eigen::MatrixXd u_plus = align_to_base(
      t.u0, eigenbasis_at(net, lin, x + delta * a, opts.saturation_margin));
  const Eigen::MatrixXd u_minus = align_to_base(
      t.u0, eigenbasis_at(net, lin, x - delta * a, opts.saturation_margin));
  t.u1 = (u_plus - u_minus) / (2.0 * delta);
  t.u2 = (u_plus - 2.0 * t.u0 + u_minus) / (2.0 * delta * delta);
  return t;
}

CascadeSolution cascade_solve(const LyapunovSolver& base,
                              const SystemExpansion& sys) {
  CascadeSolution q;
  q.q0 = base.solve(sys.kd0 * sys.kd0.transpose());

  const Eigen::MatrixXd r1 = q.q0 * sys.jd1.transpose() + sys.jd1 * q.q0 +
                             sys.kd0 * sys.kd1.transpose() +
                             sys.kd1 * sys.kd0.transpose();
  q.q1 = base.solve(r1);

  if (sys.jd2.size() > 0) {
    const Eigen::MatrixXd r2 =
        q.q0 * sys.jd2.transpose() + sys.jd2 * q.q0 +
        q.q1 * sys.jd1.transpose() + sys.jd1 * q.q1 +
        sys.kd0 * sys.kd2.transpose() + sys.kd1 * sys.kd1.transpose() +
        sys.kd2 * sys.kd0.transpose();
    q.q2 = base.solve(r2);
  }
  return q;
}

SigmaDerivativeEngine::SigmaDerivativeEngine(const PowerNetwork& net,
                                             const LinearizedSystem& lin,
                                             Eigen::VectorXd p_s,
                                             DerivativeOptions opts)
    : net_(net),
      lin_(lin),
      p_(std::move(p_s)),
      opts_(opts),
      red_(reduce_system(net, lin, p_, opts.saturation_margin)) {
  check_gaps(red_.stiffness_eigs, opts_.degenerate_gap);
  solver_ = std::make_unique<LyapunovSolver>(red_.j_d);
  q0_ = solver_->solve(red_.k_d * red_.k_d.transpose());
  const Eigen::MatrixXd q_y = red_.c_d * q0_ * red_.c_d.transpose();
  sigma_ = q_y.diagonal().cwiseMax(0.0).cwiseSqrt();
  zero_noise_ = net.noise.cwiseAbs().maxCoeff() == 0.0;
}

SigmaDerivativeEngine::Probe SigmaDerivativeEngine::make_probe(
    const Eigen::VectorXd& mu, int order) const {
  Probe pr;
  pr.order = order;
  pr.w = weight_expansion(net_, lin_, p_, mu, opts_.saturation_margin);

  // Central differences of the eigenbasis, reusing the base decomposition.
  const Eigen::VectorXd a = lin_.a_sync * mu;
  const double delta = opts_.delta_fd;
  pr.u.u0 = red_.u_p;
  const Eigen::MatrixXd u_plus =
      align_to_base(red_.u_p, eigenbasis_at(net_, lin_, red_.sines + delta * a,
                                            opts_.saturation_margin));
  const Eigen::MatrixXd u_minus =
      align_to_base(red_.u_p, eigenbasis_at(net_, lin_, red_.sines - delta * a,
                                            opts_.saturation_margin));
  pr.u.u1 = (u_plus - u_minus) / (2.0 * delta);
  if (order >= 2)
    pr.u.u2 = (u_plus - 2.0 * red_.u_p + u_minus) / (2.0 * delta * delta);

  const Eigen::MatrixXd sb = lin_.m_inv_sqrt.asDiagonal() * lin_.incidence;
  const Eigen::MatrixXd p0 = sb.transpose() * pr.u.u0;  // B^T M^{-1/2} U^(m)
  const Eigen::MatrixXd p1 = sb.transpose() * pr.u.u1;
  auto stiff = [](const Eigen::MatrixXd& pa, const Eigen::VectorXd& w,
                  const Eigen::MatrixXd& pb) -> Eigen::MatrixXd {
    return pa.transpose() * w.asDiagonal() * pb;
  };
  auto damp = [this](const Eigen::MatrixXd& ua,
                     const Eigen::MatrixXd& ub) -> Eigen::MatrixXd {
    return ua.transpose() * lin_.m_inv_d.asDiagonal() * ub;
  };
  const Eigen::VectorXd scaled_noise =
      lin_.m_inv_sqrt.cwiseProduct(net_.noise);

  pr.sys.jd0 = red_.j_d;
  pr.sys.kd0 = red_.k_d;
  pr.sys.cd0 = red_.c_d;
  pr.sys.jd1 = assemble_j_d(
      stiff(p1, pr.w.w0, p0) + stiff(p0, pr.w.w1, p0) + stiff(p0, pr.w.w0, p1),
      damp(pr.u.u1, pr.u.u0) + damp(pr.u.u0, pr.u.u1), false);
  pr.sys.kd1 = assemble_k_d(pr.u.u1.transpose() * scaled_noise.asDiagonal());
  pr.sys.cd1 = assemble_c_d(p1);
  if (order >= 2) {
    const Eigen::MatrixXd p2 = sb.transpose() * pr.u.u2;
    pr.sys.jd2 = assemble_j_d(
        stiff(p1, pr.w.w1, p0) + stiff(p1, pr.w.w0, p1) +
            stiff(p0, pr.w.w1, p1) + stiff(p2, pr.w.w0, p0) +
            stiff(p0, pr.w.w2, p0) + stiff(p0, pr.w.w0, p2),
        damp(pr.u.u1, pr.u.u1) + damp(pr.u.u2, pr.u.u0) +
            damp(pr.u.u0, pr.u.u2),
        false);
    pr.sys.kd2 = assemble_k_d(pr.u.u2.transpose() * scaled_noise.asDiagonal());
    pr.sys.cd2 = assemble_c_d(p2);
  }

  pr.q.q0 = q0_;
  const Eigen::MatrixXd r1 =
      q0_ * pr.sys.jd1.transpose() + pr.sys.jd1 * q0_ +
      pr.sys.kd0 * pr.sys.kd1.transpose() +
      pr.sys.kd1 * pr.sys.kd0.transpose();
  pr.q.q1 = solver_->solve(r1);
  if (order >= 2) {
    const Eigen::MatrixXd r2 =
        q0_ * pr.sys.jd2.transpose() + pr.sys.jd2 * q0_ +
        pr.q.q1 * pr.sys.jd1.transpose() + pr.sys.jd1 * pr.q.q1 +
        pr.sys.kd0 * pr.sys.kd2.transpose() +
        pr.sys.kd1 * pr.sys.kd1.transpose() +
        pr.sys.kd2 * pr.sys.kd0.transpose();
    pr.q.q2 = solver_->solve(r2);
  }

  // Directional derivatives of the variances, all edges at once.
  const Eigen::MatrixXd& c0 = pr.sys.cd0;
  const Eigen::MatrixXd& c1 = pr.sys.cd1;
  pr.v1 = (c1 * q0_ * c0.transpose()).diagonal() +
          (c0 * pr.q.q1 * c0.transpose()).diagonal() +
          (c0 * q0_ * c1.transpose()).diagonal();
  if (order >= 2) {
    const Eigen::MatrixXd& c2 = pr.sys.cd2;
    pr.v2 = 2.0 * ((c1 * pr.q.q1 * c0.transpose()).diagonal() +
                   (c1 * q0_ * c1.transpose()).diagonal() +
                   (c0 * pr.q.q1 * c1.transpose()).diagonal() +
                   (c2 * q0_ * c0.transpose()).diagonal() +
                   (c0 * pr.q.q2 * c0.transpose()).diagonal() +
                   (c0 * q0_ * c2.transpose()).diagonal());
  }
  return pr;
}

const SigmaDerivativeEngine::Probe& SigmaDerivativeEngine::probe_single(
    int k, int order) {
  const auto key = std::make_pair(k, -1);
  auto it = probes_.find(key);
  if (it != probes_.end() && it->second.order >= order) return it->second;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(net_.n_plus - 1);
  mu(k) = 1.0;
  return probes_[key] = make_probe(mu, order);
}

const SigmaDerivativeEngine::Probe& SigmaDerivativeEngine::probe_pair(int k,
                                                                      int j) {
  if (k > j) std::swap(k, j);
  const auto key = std::make_pair(k, j);
  auto it = probes_.find(key);
  if (it != probes_.end()) return it->second;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(net_.n_plus - 1);
  mu(k) = 1.0;
  mu(j) = 1.0;
  return probes_[key] = make_probe(mu, 2);
}

Eigen::VectorXd SigmaDerivativeEngine::sigma_gradient(int edge) {
  const int dim = net_.n_plus - 1;
  if (zero_noise_) return Eigen::VectorXd::Zero(dim);
  if (sigma_(edge) <= 1e-12)
    throw NumericalError("sigma of edge " + std::to_string(edge + 1) +
                         " vanishes; gradient undefined");
  Eigen::VectorXd g(dim);
  for (int k = 0; k < dim; ++k) g(k) = probe_single(k, 1).v1(edge);
  return g / (2.0 * sigma_(edge));
}

Eigen::MatrixXd SigmaDerivativeEngine::sigma_gradient_all() {
  const int dim = net_.n_plus - 1;
  Eigen::MatrixXd g(net_.n_edges, dim);
  if (zero_noise_) return g.setZero();
  for (int k = 0; k < dim; ++k) g.col(k) = probe_single(k, 1).v1;
  for (int i = 0; i < net_.n_edges; ++i) {
    if (sigma_(i) <= 1e-12)
      throw NumericalError("sigma of edge " + std::to_string(i + 1) +
                           " vanishes; gradient undefined");
    g.row(i) /= 2.0 * sigma_(i);
  }
  return g;
}

SigmaDerivativeBundle SigmaDerivativeEngine::bundle(int edge) {
  const int dim = net_.n_plus - 1;
  SigmaDerivativeBundle b;
  b.edge = edge;
  b.sigma = sigma_(edge);
  if (zero_noise_) {
    b.sigma_gradient = Eigen::VectorXd::Zero(dim);
    b.sigma_hessian = Eigen::MatrixXd::Zero(dim, dim);
    b.variance_gradient = Eigen::VectorXd::Zero(dim);
    b.variance_hessian = Eigen::MatrixXd::Zero(dim, dim);
    return b;
  }
  if (b.sigma <= 1e-12)
    throw NumericalError("sigma of edge " + std::to_string(edge + 1) +
                         " vanishes; derivatives undefined");

  b.variance_gradient.resize(dim);
  b.variance_hessian.resize(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const Probe& pk = probe_single(k, 2);
    b.variance_gradient(k) = pk.v1(edge);
    b.variance_hessian(k, k) = pk.v2(edge);
  }
  for (int k = 0; k < dim; ++k) {
    for (int j = k + 1; j < dim; ++j) {
      const Probe& pkj = probe_pair(k, j);
      const double off = 0.5 * (pkj.v2(edge) - b.variance_hessian(k, k) -
                                b.variance_hessian(j, j));
      b.variance_hessian(k, j) = off;
      b.variance_hessian(j, k) = off;
    }
  }

  b.sigma_gradient = b.variance_gradient / (2.0 * b.sigma);
  b.sigma_hessian =
      (b.variance_hessian -
       2.0 * b.sigma_gradient * b.sigma_gradient.transpose()) /
      (2.0 * b.sigma);
  b.sigma_hessian = 0.5 * (b.sigma_hessian + b.sigma_hessian.transpose());
  return b;
}

SigmaDerivativeBundle gradient_hessian_sigma(const PowerNetwork& net,
                                             const LinearizedSystem& lin,
                                             const Eigen::VectorXd& p_s,
                                             int edge,
                                             const DerivativeOptions& opts) {
  SigmaDerivativeEngine engine(net, lin, p_s, opts);
  return engine.bundle(edge);
}

double richardson_gradient_change(const PowerNetwork& net,
                                  const LinearizedSystem& lin,
                                  const Eigen::VectorXd& p_s, int edge,
                                  const DerivativeOptions& opts) {
  SigmaDerivativeEngine coarse(net, lin, p_s, opts);
  DerivativeOptions fine_opts = opts;
  fine_opts.delta_fd = 0.5 * opts.delta_fd;
  SigmaDerivativeEngine fine(net, lin, p_s, fine_opts);
  const Eigen::VectorXd g_coarse = coarse.sigma_gradient(edge);
  const Eigen::VectorXd g_fine = fine.sigma_gradient(edge);
  const double denom = std::max(1e-12, g_fine.norm());
  return (g_coarse - g_fine).norm() / denom;
}

}  // namespace gridmin
