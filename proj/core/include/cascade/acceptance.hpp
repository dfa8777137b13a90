#pragma once

#include <string>
#include <vector>

namespace cascade::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Fixed seed shared by every stochastic criterion.
inline constexpr unsigned long long kSeed = 7;

CriterionResult exact_sigma_trajectory();        // 1
CriterionResult moment_recursion_fixed_point();  // 2
CriterionResult fixed_point_second_moment();     // 3
CriterionResult clt_ks_sequence();               // 4
CriterionResult functional_clt_covariance();     // 5
CriterionResult additive_cascade();              // 6
CriterionResult spectrum();                      // 7
CriterionResult third_moment_control();          // 8
CriterionResult proof_apparatus_bounds();        // 9
CriterionResult determinism(unsigned workers);   // 10

std::vector<CriterionResult> run_all(unsigned workers = 4);

// "[PASS] 3 title (1.23 s): detail"
std::string format(const CriterionResult& result);

}  // namespace cascade::acceptance
