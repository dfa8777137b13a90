#include "cascade/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <json.hpp>
#include <string>

#include "cascade/analysis.hpp"
#include "cascade/cascade_sim.hpp"
#include "cascade/csv.hpp"
#include "cascade/errors.hpp"
#include "cascade/gaussian_limit.hpp"
#include "cascade/moments.hpp"
#include "cascade/parallel.hpp"
#include "cascade/random.hpp"
#include "cascade/words.hpp"

namespace cascade {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kYnTag = 0x596e;
constexpr std::uint64_t kPathTag = 0x7061;
constexpr std::uint64_t kZetaTag = 0x7a65;
constexpr std::uint64_t kFieldTag = 0x6669;

std::uint64_t require_seed(const ExperimentConfig& config) {
  if (!config.seed) {
    throw InputError(config.command + ": a seed is required (use --seed)");
  }
  return *config.seed;
}

const WeightLaw& require_law(const ExperimentConfig& config) {
  if (!config.law) throw InputError(config.command + ": a weight law is required (use --law)");
  return *config.law;
}

PoolConfig pool_config(const ExperimentConfig& config) {
  return {config.pool_size, config.inner_iterations, config.workers};
}

Json estimate_json(const Estimate& e) { return Json{{"value", e.value}, {"se", e.se}}; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Refuses laws on which T cannot be iterated; returns the classification.
Domain require_iterable(const WeightLaw& law, int b) {
  const Domain domain = validate_for_cascade(law, b);
  if (domain == Domain::kOutside) {
    throw DomainError(law.describe() + " is OUTSIDE for b = " + std::to_string(b) +
                      ": m2 = " + format_real(law.moment(2)) +
                      " violates 1 < m2 < b - 1 (the set on which T is a transformation)");
  }
  return domain;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Pools T^1 mu .. T^n mu, read from and written to config.pool_cache when set.
// Cached values round-trip exactly (17 significant digits).
std::vector<SamplePool> pools_for(const WeightLaw& law, int b, int n,
                                  const ExperimentConfig& config, std::uint64_t seed) {
  if (config.pool_cache.empty()) return iterate_T_pools(law, b, n, pool_config(config), seed);
  require_iterable(law, b);
  namespace fs = std::filesystem;
  const std::string key = law.describe() + "|" + std::to_string(b) + "|" +
                          std::to_string(config.pool_size) + "|" +
                          std::to_string(config.inner_iterations) + "|" + std::to_string(seed);
  char name[32];
  std::snprintf(name, sizeof name, "pools-%016llx",
                static_cast<unsigned long long>(mix64(std::hash<std::string>{}(key))));
  const fs::path dir = fs::path(config.pool_cache) / name;
  std::error_code ec;
  fs::create_directories(dir, ec);

  std::vector<SamplePool> pools;
  pools.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 1; k <= n; ++k) {
    const fs::path values = dir / ("pool_" + std::to_string(k) + ".csv");
    const fs::path meta = dir / ("pool_" + std::to_string(k) + ".json");
    if (fs::exists(values) && fs::exists(meta)) {
      try {
        auto column = parse_column_csv(slurp(values));
        const auto j = Json::parse(slurp(meta));
        if (column.size() == config.pool_size && j.at("key").get<std::string>() == key) {
          PoolMeta m;
          m.b = j.at("b").get<int>();
          m.generation = j.at("generation").get<int>();
          m.inner_iterations = j.at("inner_iterations").get<int>();
          m.source = j.at("source").get<std::string>();
          m.seed = j.at("seed").get<std::uint64_t>();
          pools.emplace_back(std::move(column), std::move(m));
          continue;
        }
      } catch (const std::exception&) {
        // unreadable entry: recompute below
      }
    }
    if (k == 1) {
      pools.push_back(fixed_point_pool(WeightSource(law), b, pool_config(config), seed, 1));
    } else {
      pools.push_back(fixed_point_pool(WeightSource(pools.back()), b, pool_config(config), seed, k));
    }
    std::ofstream(values, std::ios::binary) << pools.back().to_csv();
    auto j = Json::parse(pools.back().meta_json());
    j["key"] = key;
    std::ofstream(meta, std::ios::binary) << j.dump(2) << "\n";
  }
  return pools;
}

MomentTrajectory law_trajectory(const WeightLaw& law, int b, int n) {
  return iterate_moments(b, law.moment(2), law.moment(3), n);
}

std::vector<double> exact_matrix_flat(int b, int j) { return exact_cov_matrix(b, j); }

struct Distance {
  double max_abs = 0.0;
  double frobenius = 0.0;
};

Distance distance_to(const std::vector<double>& a, const std::vector<double>& b) {
  Distance d;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a[i] - b[i]);
    d.max_abs = std::max(d.max_abs, diff);
    sq += diff * diff;
  }
  d.frobenius = std::sqrt(sq);
  return d;
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"moments", "domain", "cascade", "clt", "limit", "cov", "spectrum", "zygmund", "general"};
}

Artifacts run_experiment(const ExperimentConfig& config) {
  const std::string& c = config.command;
  if (c == "moments") return run_moments(config);
  if (c == "domain") return run_domain(config);
  if (c == "cascade") return run_cascade(config);
  if (c == "clt") return run_clt(config);
  if (c == "limit") return run_limit(config);
  if (c == "cov") return run_cov(config);
  if (c == "spectrum") return run_spectrum(config);
  if (c == "zygmund") return run_zygmund(config);
  if (c == "general") return run_general(config);
  throw InputError("unknown command '" + c + "'");
}

Artifacts run_moments(const ExperimentConfig& config) {
  const WeightLaw& law = require_law(config);
  const int b = config.b;
  const auto traj = law_trajectory(law, b, config.n);

  Artifacts out;
  out.files["trajectory.csv"] = trajectory_csv(traj);

  Json summary;
  summary["command"] = "moments";
  summary["b"] = b;
  summary["law"] = law.describe();
  summary["n"] = config.n;
  summary["u_last"] = traj.u.back();
  summary["v_last"] = traj.v.back();
  if (b >= 3) {
    summary["domain"] = std::string(to_string(validate_for_cascade(law, b)));
    summary["w2"] = w2_bound(b);
    const double m2 = law.moment(2);
    if (m2 > 1.0 && m2 < w2_bound(b)) summary["w3_at_m2"] = w3_bound(b, m2);
  }
  const double s0 = traj.sigma2.front();
  const bool contracting = b >= 3 && s0 > 0.0 && s0 < b - 2.0;
  if (contracting) {
    summary["sigma_limit"] = sigma_limit(b, s0);
    CsvWriter bounds({"n", "sigma2_closed_form", "r2", "t1_bound", "lindeberg_p3",
                      "third_moment_bound"});
    const auto z = iterate_third_moment_bound(traj, 10.0, config.n);
    for (int k = 0; k <= config.n; ++k) {
      const std::optional<double> r2 =
          k >= 1 ? std::optional<double>(rn_squared(b, traj.sigma2[k - 1], traj.sigma2[k]))
                 : std::nullopt;
      const std::optional<double> t1 =
          k >= 1 ? std::optional<double>(t1_variance_bound(b, traj.sigma2, k)) : std::nullopt;
      bounds.row(k, sigma_closed_form(b, s0, k), r2, t1, lindeberg_bound(b, 3.0, k, 1.0), z[k]);
    }
    out.files["bounds.csv"] = bounds.str();
  }
  out.summary = dump(summary);
  return out;
}

Artifacts run_domain(const ExperimentConfig& config) {
  const WeightLaw& law = require_law(config);
  const int b = config.b;
  const double m2 = law.moment(2);
  const double m3 = law.moment(3);
  const Domain domain = validate_for_cascade(law, b);

  Json summary;
  summary["command"] = "domain";
  summary["b"] = b;
  summary["law"] = law.describe();
  summary["m1"] = law.moment(1);
  summary["m2"] = m2;
  summary["m3"] = m3;
  summary["w2"] = w2_bound(b);
  if (m2 > 1.0 && m2 < w2_bound(b)) summary["w3_at_m2"] = w3_bound(b, m2);
  summary["classification"] = std::string(to_string(domain));

  Artifacts out;
  if (domain == Domain::kOutside) {
    out.refused = true;
    std::string reason;
    if (m2 <= 1.0) {
      reason = "m2 = " + format_real(m2) + " is not > 1 (requires 1 < m2 < b - 1)";
    } else {
      reason = "m2 = " + format_real(m2) + " >= b - 1 = " + std::to_string(b - 1) +
               " (requires 1 < m2 < b - 1)";
    }
    summary["reason"] = reason;
  } else if (domain == Domain::kInPbOnly) {
    summary["note"] = "third-moment control fails: need m2 < w2(b) and m3 < w3(b, m2)";
  }
  out.summary = dump(summary);
  return out;
}

Artifacts run_cascade(const ExperimentConfig& config) {
  const WeightLaw& law = require_law(config);
  const std::uint64_t seed = require_seed(config);
  const int b = config.b;
  require_iterable(law, b);
  const int n = std::max(1, config.n);
  const auto traj = law_trajectory(law, b, n);
  const auto pools = pools_for(law, b, n, config, seed);

  Artifacts out;
  Json summary;
  summary["command"] = "cascade";
  summary["b"] = b;
  summary["law"] = law.describe();
  summary["seed"] = seed;
  Json gens = Json::array();
  for (int k = 1; k <= n; ++k) {
    const auto& pool = pools[k - 1];
    out.files["pool_" + std::to_string(k) + ".csv"] = pool.to_csv();
    out.files["pool_" + std::to_string(k) + ".json"] = pool.meta_json();
    const auto m2 = empirical_moment(pool.values(), 2);
    const auto m3 = empirical_moment(pool.values(), 3);
    gens.push_back(Json{{"generation", k},
                        {"mean", pool.mean()},
                        {"m2", estimate_json(m2)},
                        {"m2_exact", traj.u[k]},
                        {"m3", estimate_json(m3)},
                        {"m3_exact", traj.v[k]}});
  }
  summary["pools"] = gens;

  // Replicas of Y_j from the exact tree.
  const int tree_depth = config.depth;
  checked_power(b, static_cast<std::size_t>(tree_depth));
  std::vector<double> yn(config.replicas);
  parallel_for(config.replicas, config.workers, [&](std::size_t r) {
    Stream rng(derive(seed, kYnTag), r);
    yn[r] = sample_Yn(law, b, tree_depth, rng);
  });
  out.files["yn.csv"] = column_csv("Y", yn);
  if (yn.size() >= 2) {
    summary["yn_depth"] = tree_depth;
    summary["yn_mean"] = estimate_json(empirical_moment(yn, 1));
    summary["yn_m2"] = estimate_json(empirical_moment(yn, 2));
    summary["yn_m2_exact"] = exact_yn_second_moment(law.moment(2), b, tree_depth);
  }

  // One path of h_n restricted to depth j.
  const WeightSource interior =
      n == 1 ? WeightSource(law) : WeightSource(pools[static_cast<std::size_t>(n) - 2]);
  const auto path = cascade_path(interior, WeightSource(pools.back()), b, config.depth,
                                 derive(seed, kPathTag));
  out.files["path.csv"] = path.to_csv();
  out.summary = dump(summary);
  return out;
}

Artifacts run_clt(const ExperimentConfig& config) {
  const WeightLaw& law = require_law(config);
  const std::uint64_t seed = require_seed(config);
  const int b = config.b;
  require_iterable(law, b);
  const auto traj = law_trajectory(law, b, config.n_max);
  const auto pools = pools_for(law, b, config.n_max, config, seed);

  CsvWriter table({"n", "sigma", "ks", "ks_critical_1pct", "z_mean", "z_var", "z_abs3"});
  Json rows = Json::array();
  for (int k = 1; k <= config.n_max; ++k) {
    const auto values = pools[k - 1].values();
    const std::size_t count = std::min(config.replicas, values.size());
    const double sigma = std::sqrt(traj.sigma2[k]);
    const auto z = sample_Z(values.first(count), sigma);
    const double ks = ks_normal(z);
    const auto mean = empirical_moment(z, 1);
    const auto var = empirical_moment(z, 2);
    const auto abs3 = empirical_abs_moment(z, 3.0);
    table.row(k, sigma, ks, ks_critical_1pct(count), mean.value, var.value, abs3.value);
    rows.push_back(Json{{"n", k}, {"ks", ks}, {"z_abs3", estimate_json(abs3)}});
  }
  Artifacts out;
  out.files["clt.csv"] = table.str();
  Json summary;
  summary["command"] = "clt";
  summary["b"] = b;
  summary["law"] = law.describe();
  summary["seed"] = seed;
  summary["samples_per_n"] = config.replicas;
  summary["rows"] = rows;
  out.summary = dump(summary);
  return out;
}

Artifacts run_limit(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const int b = config.b;
  const int j = config.depth;
  Artifacts out;
  Json summary;
  summary["command"] = "limit";
  summary["b"] = b;
  summary["depth"] = j;
  summary["mode"] = config.mode;
  summary["seed"] = seed;

  GaussianPath path;
  if (config.mode == "marginal") {
    const XiField field(b, j, seed);
    Stream zeta(derive(seed, kZetaTag), 0);
    path = marginal_increments(b, j, field, zeta);
  } else if (config.mode == "consistent") {
    const int L = config.truncation;
    const XiField field(b, L, seed);
    const auto measure = canonical_measure(b, L, field);
    path = consistent_measure(b, j, L, field);
    summary["truncation"] = L;
    summary["variance_deficit"] = path.variance_deficit;
    summary["additivity_residual"] = measure.additivity_residual();
  } else {
    throw InputError("limit: mode must be 'marginal' or 'consistent'");
  }
  out.files["increments.csv"] = path.increments_csv();
  out.files["grid.csv"] = path.grid_csv();

  const auto grid = integrate_path(path.increments);
  const auto rows = modulus_bound_check(grid, b, j);
  CsvWriter modulus({"m", "omega", "bound", "holds"});
  bool all_hold = true;
  for (const auto& row : rows) {
    modulus.row(row.m, row.lhs, row.rhs, row.holds);
    all_hold = all_hold && row.holds;
  }
  out.files["modulus.csv"] = modulus.str();
  summary["modulus_bound_holds"] = all_hold;
  out.summary = dump(summary);
  return out;
}

Artifacts run_cov(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const int b = config.b;
  const int j = config.depth;
  const auto exact = exact_matrix_flat(b, j);
  const auto words = level(b, static_cast<std::size_t>(j));
  const std::size_t dim = words.size();

  // Gaussian marginal generator.
  std::vector<std::vector<double>> rows(config.replicas);
  parallel_for(config.replicas, config.workers, [&](std::size_t r) {
    const std::uint64_t replica_seed = derive(seed, r);
    const XiField field(b, j, replica_seed);
    Stream zeta(derive(replica_seed, kZetaTag), 0);
    rows[r] = marginal_increments(b, j, field, zeta).increments;
  });
  const auto est = empirical_cov(rows);

  Artifacts out;
  CsvWriter table({"w", "w2", "exact", "empirical", "se", "z_score"});
  double worst_z = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t i = a * dim + c;
      const double z = est.se[i] > 0.0 ? (est.cov[i] - exact[i]) / est.se[i] : 0.0;
      worst_z = std::max(worst_z, std::abs(z));
      table.row(words[a].str(), words[c].str(), exact[i], est.cov[i], est.se[i], z);
    }
  }
  out.files["cov_gaussian.csv"] = table.str();
  out.files["exact_cov.json"] = covariance_json(b, j, exact);
  out.files["empirical_cov.json"] = covariance_json(b, j, est.cov);

  Json summary;
  summary["command"] = "cov";
  summary["b"] = b;
  summary["depth"] = j;
  summary["seed"] = seed;
  summary["replicas"] = config.replicas;
  summary["gaussian_max_abs_z"] = worst_z;

  if (config.law) {
    const WeightLaw& law = *config.law;
    require_iterable(law, b);
    const auto traj = law_trajectory(law, b, config.n_max);
    const auto pools = pools_for(law, b, config.n_max, config, seed);
    CsvWriter dist({"n", "sigma", "max_abs_distance", "frobenius_distance"});
    Json dists = Json::array();
    for (int k = 1; k <= config.n_max; ++k) {
      const WeightSource interior =
          k == 1 ? WeightSource(law) : WeightSource(pools[static_cast<std::size_t>(k) - 2]);
      const WeightSource leaves(pools[static_cast<std::size_t>(k) - 1]);
      const double sigma = std::sqrt(traj.sigma2[k]);
      const std::uint64_t path_seed = derive(derive(seed, kPathTag), static_cast<std::uint64_t>(k));
      std::vector<std::vector<double>> paths(config.replicas);
      parallel_for(config.replicas, config.workers, [&](std::size_t r) {
        const auto raw = cascade_path(interior, leaves, b, j, derive(path_seed, r));
        paths[r] = normalize_path(raw, sigma).increments;
      });
      const auto d = distance_to(empirical_cov(paths).cov, exact);
      dist.row(k, sigma, d.max_abs, d.frobenius);
      dists.push_back(Json{{"n", k}, {"max_abs", d.max_abs}, {"frobenius", d.frobenius}});
    }
    out.files["cov_cascade.csv"] = dist.str();
    summary["law"] = law.describe();
    summary["cascade_distance"] = dists;
  }
  out.summary = dump(summary);
  return out;
}

Artifacts run_spectrum(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const int b = config.b;
  const int n = config.depth;
  const XiField field(b, n, seed);
  const auto walk = branching_walk(field, n);
  const auto est = coarse_spectrum(walk, b, n);
  const auto q = default_q_grid();
  const auto beta = partition_beta(walk, b, n, q);
  std::vector<double> upper;
  for (double a : est.centers) upper.push_back(legendre_upper(q, beta, a, b));

  Artifacts out;
  out.files["spectrum.csv"] = spectrum_csv(est, upper);
  CsvWriter beta_csv({"q", "beta", "beta_lower"});
  const double log_b = std::log(static_cast<double>(b));
  for (std::size_t i = 0; i < q.size(); ++i) {
    beta_csv.row(q[i], beta[i], -1.0 - q[i] * q[i] / (2.0 * log_b));
  }
  out.files["beta.csv"] = beta_csv.str();

  Json summary;
  summary["command"] = "spectrum";
  summary["b"] = b;
  summary["depth"] = n;
  summary["seed"] = seed;
  summary["half_width"] = est.half_width;
  out.summary = dump(summary);
  return out;
}

Artifacts run_zygmund(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const int b = config.b;
  const int depth = config.depth;
  if (config.min_depth < 1 || config.min_depth > depth) {
    throw InputError("zygmund: need 1 <= min depth <= depth");
  }
  std::vector<int> ns;
  for (int k = 1; k <= depth; ++k) ns.push_back(k);

  std::vector<std::vector<ZygmundRow>> per_seed(config.seeds);
  parallel_for(config.seeds, config.workers, [&](std::size_t s) {
    const XiField field(b, depth, derive(derive(seed, kFieldTag), s));
    const auto path = consistent_measure(b, depth, depth, field);
    per_seed[s] = zygmund_stat(integrate_path(path.increments), b, depth, ns);
  });

  CsvWriter table({"seed_index", "n", "stat", "lil_ratio"});
  for (std::size_t s = 0; s < per_seed.size(); ++s) {
    for (const auto& row : per_seed[s]) table.row(s, row.n, row.stat, row.lil_ratio);
  }
  // Median over seeds of max_{n <= d} stat.
  CsvWriter trend({"depth", "median_running_max"});
  Json medians = Json::array();
  for (int d = config.min_depth; d <= depth; ++d) {
    std::vector<double> maxima;
    for (const auto& rows : per_seed) {
      double m = 0.0;
      for (const auto& row : rows) {
        if (row.n <= d) m = std::max(m, row.stat);
      }
      maxima.push_back(m);
    }
    std::sort(maxima.begin(), maxima.end());
    const std::size_t k = maxima.size();
    const double median = k % 2 ? maxima[k / 2] : 0.5 * (maxima[k / 2 - 1] + maxima[k / 2]);
    trend.row(d, median);
    medians.push_back(median);
  }
  Artifacts out;
  out.files["zygmund.csv"] = table.str();
  out.files["zygmund_trend.csv"] = trend.str();
  Json summary;
  summary["command"] = "zygmund";
  summary["b"] = b;
  summary["depth"] = depth;
  summary["seed"] = seed;
  summary["fields"] = config.seeds;
  summary["median_running_max"] = medians;
  summary["diagnostic_only"] = true;
  out.summary = dump(summary);
  return out;
}

Artifacts run_general(const ExperimentConfig& config) {
  const std::uint64_t seed = require_seed(config);
  const int b = config.b;
  CoefficientScheme scheme;
  if (config.scheme == "canonical") {
    scheme = canonical_scheme(b);
  } else if (config.scheme == "geometric") {
    scheme = geometric_scheme(b, config.theta);
  } else {
    throw InputError("general: scheme must be 'canonical' or 'geometric'");
  }
  const int L = config.truncation;
  const auto check = check_scheme(scheme, b, L);
  Json summary;
  summary["command"] = "general";
  summary["b"] = b;
  summary["scheme"] = scheme.name;
  summary["seed"] = seed;
  summary["scheme_ok"] = check.ok;
  Artifacts out;
  CsvWriter sums({"k", "level_sum"});
  for (std::size_t k = 0; k < check.level_sums.size(); ++k) sums.row(k + 1, check.level_sums[k]);
  out.files["level_sums.csv"] = sums.str();
  if (!check.ok) {
    out.refused = true;
    summary["reason"] = check.violation;
    out.summary = dump(summary);
    return out;
  }
  const XiField field(b, L, seed);
  const auto path = generalized_measure(scheme, b, config.depth, L, field);
  out.files["increments.csv"] = path.increments_csv();
  out.files["grid.csv"] = path.grid_csv();
  out.summary = dump(summary);
  return out;
}

}  // namespace cascade
