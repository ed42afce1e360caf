#ifndef GRIDMIN_IO_HPP
#define GRIDMIN_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "gridmin/objective.hpp"
#include "gridmin/optimizer.hpp"

namespace gridmin {

struct PowerNetwork;

// Fixed trace schema: iter,phase,p1..pD,f,fprime,t,case
// NaN fields are written empty; formatting is %.17g so identical runs
// produce byte-identical files.
std::string trace_to_csv(const std::vector<TraceRow>& trace, int dim);

void write_text_file(const std::string& path, const std::string& content);

// Result document (schema gridmin-result/1): optimal supply decision,
// the reconstructed full dispatch, objective value and per-edge terms.
nlohmann::json result_to_json(const PowerNetwork& net,
                              const ObjectiveEvaluation& eval,
                              const Eigen::VectorXd& p_s);
nlohmann::json result_to_json(const PowerNetwork& net, const RunResult& run,
                              const ObjectiveEvaluation& eval_at_opt);

// Gradient dump for the CLI `gradient` subcommand.
nlohmann::json gradients_to_json(const PowerNetwork& net,
                                 const Eigen::VectorXd& p_s,
                                 const std::vector<SigmaDerivativeBundle>&
                                     bundles,
                                 double richardson_change);

// Re-reads the supply vector of a result document (round-trip support).
Eigen::VectorXd supply_from_result(const nlohmann::json& doc);

}  // namespace gridmin

#endif  // GRIDMIN_IO_HPP
