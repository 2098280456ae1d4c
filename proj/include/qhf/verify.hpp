#pragma once

#include <string>
#include <vector>

namespace qhf::verify {

struct CriterionResult {
  std::string id;
  bool pass = false;
  std::string detail;  // measured values and tolerances
};

CriterionResult ib_mean_criterion();              // 1
CriterionResult ib_variance_criterion();          // 2
CriterionResult fano_alpha_independence();        // 3
CriterionResult heat_operator_identity_family();  // 4
CriterionResult tensor_vs_dense_toy();            // 5
CriterionResult chain_closed_forms();             // 6
CriterionResult convergence_gates();              // 7
CriterionResult nonequilibrium_properties();      // 8
CriterionResult zero_coupling_null();             // 9

/// scope ∈ {oracle, chain, engine, all}
std::vector<CriterionResult> run_scope(const std::string& scope);

}  // namespace qhf::verify
