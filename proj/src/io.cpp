#include "gridmin/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gridmin/errors.hpp"
#include "gridmin/network.hpp"

namespace gridmin {

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

std::string trace_to_csv(const std::vector<TraceRow>& trace, int dim) {
  std::string out = "iter,phase";
  for (int i = 1; i <= dim; ++i) out += ",p" + std::to_string(i);
  out += ",f,fprime,t,case\n";
  for (const auto& row : trace) {
    out += std::to_string(row.iter) + "," + row.phase;
    for (int i = 0; i < dim; ++i) out += "," + fmt(row.p(i));
    out += "," + fmt(row.f) + "," + fmt(row.fprime) + "," + fmt(row.t) + "," +
           row.note + "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file: " + path);
  out << content;
  if (!out) throw InputError("failed writing output file: " + path);
}

nlohmann::json result_to_json(const PowerNetwork& net,
                              const ObjectiveEvaluation& eval,
                              const Eigen::VectorXd& p_s) {
  nlohmann::json doc;
  doc["schema"] = "gridmin-result/1";
  doc["r"] = eval.r;
  doc["p_s"] = to_std(p_s);

  const Eigen::VectorXd q = net.injection(p_s);
  doc["dispatch"]["supply"] = to_std(q.head(net.n_plus));
  doc["dispatch"]["demand"] = to_std(net.p_demand);

  doc["f"] = eval.f;
  doc["f_edges"] = to_std(eval.f_edge);
  doc["mean_term"] = to_std(eval.mean_term);
  doc["sigma"] = to_std(eval.sigma);
  std::vector<int> i_max_1based;
  for (int k : eval.i_max) i_max_1based.push_back(k + 1);
  doc["i_max"] = i_max_1based;
  doc["case"] = case_name(eval.kind);
  return doc;
}

nlohmann::json result_to_json(const PowerNetwork& net, const RunResult& run,
                              const ObjectiveEvaluation& eval_at_opt) {
  nlohmann::json doc = result_to_json(net, eval_at_opt, run.p_opt);
  doc["termination"] = termination_name(run.termination);
  doc["warnings"] = run.warnings;
  doc["iterations"] = run.trace.empty() ? 0 : run.trace.back().iter;
  if (!std::isnan(run.empirical_rate))
    doc["empirical_rate"] = run.empirical_rate;
  return doc;
}

nlohmann::json gradients_to_json(
    const PowerNetwork& net, const Eigen::VectorXd& p_s,
    const std::vector<SigmaDerivativeBundle>& bundles,
    double richardson_change) {
  nlohmann::json doc;
  doc["schema"] = "gridmin-gradient/1";
  doc["p_s"] = to_std(p_s);
  doc["richardson_gradient_change"] = richardson_change;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& b : bundles) {
    nlohmann::json e;
    e["edge"] = b.edge + 1;
    e["endpoints"] = {net.edges[b.edge].first + 1,
                      net.edges[b.edge].second + 1};
    e["sigma"] = b.sigma;
    e["sigma_gradient"] = to_std(b.sigma_gradient);
    nlohmann::json hess = nlohmann::json::array();
    for (int i = 0; i < b.sigma_hessian.rows(); ++i)
      hess.push_back(to_std(b.sigma_hessian.row(i).transpose()));
    e["sigma_hessian"] = hess;
    edges.push_back(e);
  }
  doc["edges"] = edges;
  return doc;
}

Eigen::VectorXd supply_from_result(const nlohmann::json& doc) {
  if (!doc.contains("schema") || doc["schema"] != "gridmin-result/1")
    throw InputError("not a gridmin-result/1 document");
  const auto& ps = doc["p_s"];
  Eigen::VectorXd p(ps.size());
  for (size_t i = 0; i < ps.size(); ++i) p(i) = ps[i].get<double>();
  return p;
}

}  // namespace gridmin
