#include "gridmin/network.hpp"

#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "gridmin/errors.hpp"

namespace gridmin {

using nlohmann::json;

Eigen::VectorXd PowerNetwork::injection(const Eigen::VectorXd& p_s) const {
  if (p_s.size() != n_plus - 1) {
    throw InputError("supply vector has length " + std::to_string(p_s.size()) +
                     ", expected " + std::to_string(n_plus - 1));
  }
  Eigen::VectorXd q(n_vertices);
  q.head(n_plus - 1) = p_s;
  q(n_plus - 1) = total_demand() - p_s.sum();  // dependent last supply
  q.tail(n_demand()) = -p_demand;
  return q;
}

void validate_network(const PowerNetwork& net) {
  if (net.n_vertices < 2) throw InputError("network needs at least 2 nodes");
  if (net.n_plus < 2)
    throw InputError("network needs at least 2 supply nodes (got " +
                     std::to_string(net.n_plus) + ")");
  if (net.n_vertices != net.n_plus + static_cast<int>(net.p_demand.size()))
    throw InputError("node count does not match supply + demand roles");
  if (net.n_edges != static_cast<int>(net.edges.size()))
    throw InputError("edge count mismatch");
  if (net.weights.size() != net.n_edges ||
      net.inertias.size() != net.n_vertices ||
      net.dampings.size() != net.n_vertices ||
      net.noise.size() != net.n_vertices || net.p_max.size() != net.n_plus) {
    throw InputError("parameter vector lengths do not match network size");
  }

  for (int k = 0; k < net.n_edges; ++k) {
    auto [i, j] = net.edges[k];
    if (i < 0 || i >= net.n_vertices || j < 0 || j >= net.n_vertices || i == j)
      throw InputError("edge " + std::to_string(k + 1) + " has bad endpoints");
    if (!(net.weights(k) > 0.0))
      throw InputError("edge " + std::to_string(k + 1) +
                       " has nonpositive weight");
  }
  for (int i = 0; i < net.n_vertices; ++i) {
    if (!(net.inertias(i) > 0.0))
      throw InputError("node " + std::to_string(i + 1) +
                       " has nonpositive inertia");
    if (net.dampings(i) < 0.0)
      throw InputError("node " + std::to_string(i + 1) +
                       " has negative damping");
    if (net.noise(i) < 0.0)
      throw InputError("node " + std::to_string(i + 1) + " has negative noise");
  }
  for (int i = 0; i < net.n_plus; ++i)
    if (net.p_max(i) < 0.0)
      throw InputError("supply node " + std::to_string(i + 1) +
                       " has negative capacity");
  for (int i = 0; i < net.n_demand(); ++i)
    if (net.p_demand(i) < 0.0)
      throw InputError("demand node " + std::to_string(net.n_plus + i + 1) +
                       " has negative demand");

  if (net.total_capacity() < net.total_demand())
    throw InputError("supply deficit: total capacity " +
                     std::to_string(net.total_capacity()) +
                     " < total demand " + std::to_string(net.total_demand()));

  // BFS connectivity.
  std::vector<std::vector<int>> adj(net.n_vertices);
  for (auto [i, j] : net.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<char> seen(net.n_vertices, 0);
  std::queue<int> bfs;
  bfs.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop();
    for (int w : adj[u])
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        bfs.push(w);
      }
  }
  if (reached != net.n_vertices) throw InputError("graph is not connected");
}

namespace {

double require_number(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw InputError(ctx + ": missing numeric field '" + key + "'");
  return obj[key].get<double>();
}

}  // namespace

PowerNetwork parse_network(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("network file is not valid JSON: ") +
                     e.what());
  }
  if (!doc.contains("schema") || doc["schema"] != "gridmin-network/1")
    throw InputError("network document must declare schema gridmin-network/1");
  if (!doc.contains("nodes") || !doc["nodes"].is_array() ||
      !doc.contains("edges") || !doc["edges"].is_array())
    throw InputError("network document needs 'nodes' and 'edges' arrays");

  const auto& nodes = doc["nodes"];
  const auto& edges = doc["edges"];
  const int n_v = static_cast<int>(nodes.size());

  PowerNetwork net;
  net.n_vertices = n_v;
  net.inertias.resize(n_v);
  net.dampings.resize(n_v);
  net.noise.resize(n_v);

  std::vector<double> caps, demands;
  bool demand_seen = false;
  for (int i = 0; i < n_v; ++i) {
    const auto& nd = nodes[i];
    const std::string ctx = "node " + std::to_string(i + 1);
    if (!nd.contains("id") || !nd["id"].is_number_integer() ||
        nd["id"].get<int>() != i + 1)
      throw InputError(ctx + ": nodes must be listed with ids 1..n in order");
    if (!nd.contains("role") || !nd["role"].is_string())
      throw InputError(ctx + ": missing role");
    const std::string role = nd["role"].get<std::string>();
    net.inertias(i) = require_number(nd, "inertia", ctx);
    net.dampings(i) = require_number(nd, "damping", ctx);
    net.noise(i) = require_number(nd, "noise", ctx);
    if (role == "supply") {
      if (demand_seen)
        throw InputError(ctx +
                         ": supply nodes must precede all demand nodes");
      caps.push_back(require_number(nd, "p_max", ctx));
    } else if (role == "demand") {
      demand_seen = true;
      demands.push_back(require_number(nd, "demand", ctx));
    } else {
      throw InputError(ctx + ": role must be 'supply' or 'demand'");
    }
  }
  net.n_plus = static_cast<int>(caps.size());
  net.p_max = Eigen::Map<Eigen::VectorXd>(caps.data(), caps.size());
  net.p_demand = Eigen::Map<Eigen::VectorXd>(demands.data(), demands.size());

  net.n_edges = static_cast<int>(edges.size());
  net.weights.resize(net.n_edges);
  for (int k = 0; k < net.n_edges; ++k) {
    const auto& ed = edges[k];
    const std::string ctx = "edge " + std::to_string(k + 1);
    if (!ed.contains("from") || !ed.contains("to"))
      throw InputError(ctx + ": missing endpoints");
    int from = ed["from"].get<int>();
    int to = ed["to"].get<int>();
    if (from < 1 || from > n_v || to < 1 || to > n_v)
      throw InputError(ctx + ": endpoint out of range");
    net.edges.emplace_back(from - 1, to - 1);
    net.weights(k) = require_number(ed, "weight", ctx);
  }

  validate_network(net);
  return net;
}

PowerNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open network file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

Eigen::MatrixXd incidence_matrix(const PowerNetwork& net) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(net.n_vertices, net.n_edges);
  for (int k = 0; k < net.n_edges; ++k) {
    b(net.edges[k].first, k) = 1.0;
    b(net.edges[k].second, k) = -1.0;
  }
  return b;
}

}  // namespace gridmin
