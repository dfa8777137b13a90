#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascade/weight_law.hpp"

namespace cascade {

// Everything a batch run needs. Stochastic commands refuse to run without
// a seed.
struct ExperimentConfig {
  std::string command;
  int b = 3;
  std::optional<WeightLaw> law;
  std::size_t pool_size = 100000;  // P
  int inner_iterations = 20;       // K
  int n = 4;                       // moment steps / T iterations
  int n_max = 4;                   // clt and cov: generations 1..n_max
  int depth = 2;                   // j
  int truncation = 10;             // L
  std::size_t replicas = 10000;    // R
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string mode = "marginal";   // limit: marginal | consistent
  std::string scheme = "canonical";// general: canonical | geometric
  double theta = 1.0;              // geometric scheme parameter
  std::size_t seeds = 100;         // zygmund: independent fields
  int min_depth = 8;               // zygmund trend range
  std::string pool_cache;          // directory for pool reuse; empty disables
};

// Files produced by a run (name -> contents) plus a JSON summary.
struct Artifacts {
  std::map<std::string, std::string> files;
  std::string summary;
  bool refused = false;  // a domain condition failed; summary carries the reason
};

std::vector<std::string> experiment_names();

// Dispatches on config.command. Throws InputError for unknown commands or
// invalid configs, DomainError/ResourceError as the underlying modules do.
Artifacts run_experiment(const ExperimentConfig& config);

Artifacts run_moments(const ExperimentConfig& config);
Artifacts run_domain(const ExperimentConfig& config);
Artifacts run_cascade(const ExperimentConfig& config);
Artifacts run_clt(const ExperimentConfig& config);
Artifacts run_limit(const ExperimentConfig& config);
Artifacts run_cov(const ExperimentConfig& config);
Artifacts run_spectrum(const ExperimentConfig& config);
Artifacts run_zygmund(const ExperimentConfig& config);
Artifacts run_general(const ExperimentConfig& config);

}  // namespace cascade
