#ifndef GRIDMIN_NETWORK_HPP
#define GRIDMIN_NETWORK_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace gridmin {

/// A power transmission network: graph topology plus the physical
/// parameters of the swing dynamics.
///
/// Nodes are 1-based in input files and 0-based internally.  Supply nodes
/// occupy indices 0..n_plus-1, demand nodes n_plus..n_vertices-1; the
/// loader rejects interleaved roles rather than permuting silently.
struct PowerNetwork {
  int n_vertices = 0;
  int n_edges = 0;
  int n_plus = 0;  // number of supply nodes (>= 2 after validation)

  // Edge k connects endpoints (first, second), 0-based.  Orientation is
  // +1 at first, -1 at second in the incidence matrix; the objective is
  // orientation-invariant.
  std::vector<std::pair<int, int>> edges;

  Eigen::VectorXd weights;   // per-edge susceptance w_k > 0
  Eigen::VectorXd inertias;  // per-node m_i > 0
  Eigen::VectorXd dampings;  // per-node d_i >= 0
  Eigen::VectorXd noise;     // per-node diagonal of K2, >= 0
  Eigen::VectorXd p_max;     // per-supply-node capacity, length n_plus
  Eigen::VectorXd p_demand;  // per-demand-node demand (stored positive)

  int n_demand() const { return n_vertices - n_plus; }
  double total_capacity() const { return p_max.sum(); }
  double total_demand() const { return p_demand.sum(); }

  // Injection vector for a supply decision p_s (length n_plus-1): supplies
  // first (the dependent last supply reconstructed from demand balance),
  // then negated demands.  Sums to zero by construction.
  Eigen::VectorXd injection(const Eigen::VectorXd& p_s) const;
};

// Checks connectivity, node ordering, positivity and the supply-capacity
// assumption total_capacity >= total_demand.  Throws InputError.
void validate_network(const PowerNetwork& net);

// Parses the versioned JSON network document (see README for the schema)
// and validates it.
PowerNetwork load_network(const std::string& path);
PowerNetwork parse_network(const std::string& json_text);

// Node-edge incidence matrix B (n_vertices x n_edges): column k carries
// +1 at the first endpoint and -1 at the second.
Eigen::MatrixXd incidence_matrix(const PowerNetwork& net);

}  // namespace gridmin

#endif  // GRIDMIN_NETWORK_HPP
