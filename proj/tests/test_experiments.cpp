#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "cascade/csv.hpp"
#include "cascade/errors.hpp"
#include "cascade/experiments.hpp"

using namespace cascade;

namespace {

ExperimentConfig base(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  c.b = 3;
  c.law = WeightLaw::two_point(0.7);
  c.seed = 7;
  c.pool_size = 4000;
  c.inner_iterations = 8;
  return c;
}

}  // namespace

TEST_CASE("every command is listed") {
  const auto names = experiment_names();
  for (const char* c : {"moments", "domain", "cascade", "clt", "limit", "cov", "spectrum",
                        "zygmund", "general"}) {
    CHECK(std::find(names.begin(), names.end(), c) != names.end());
  }
  auto bad = base("nope");
  CHECK_THROWS_AS(run_experiment(bad), InputError);
}

TEST_CASE("moments reaches the fixed point and needs no seed") {
  auto c = base("moments");
  c.seed.reset();
  c.n = 100;
  const auto out = run_experiment(c);
  const auto& csv = out.files.at("trajectory.csv");
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  CHECK(last.rfind("100,", 0) == 0);
  const double u = std::stod(last.substr(4, last.find(',', 4) - 4));
  CHECK(std::abs(u - 1.0) < 1e-12);
  CHECK(out.files.count("bounds.csv") == 1);
}

TEST_CASE("domain refuses laws outside P_b and cites the condition") {
  auto c = base("domain");
  c.law = WeightLaw::log_normal(1.0);
  const auto out = run_experiment(c);
  CHECK(out.refused);
  const auto j = nlohmann::json::parse(out.summary);
  CHECK(j["classification"] == "OUTSIDE");
  const std::string reason = j["reason"];
  CHECK(reason.find("m2 = 2.718") != std::string::npos);
  CHECK(reason.find("b - 1") != std::string::npos);

  c.law = WeightLaw::two_point(0.7);
  const auto ok = run_experiment(c);
  CHECK_FALSE(ok.refused);
  CHECK(nlohmann::json::parse(ok.summary)["classification"] == "IN_D_b");
}

TEST_CASE("stochastic commands require a seed") {
  for (const char* cmd : {"cascade", "clt", "limit", "cov", "spectrum", "zygmund", "general"}) {
    auto c = base(cmd);
    c.seed.reset();
    CHECK_THROWS_AS(run_experiment(c), InputError);
  }
}

TEST_CASE("outputs are identical across reruns and worker counts") {
  std::vector<ExperimentConfig> configs;
  auto clt = base("clt");
  clt.n_max = 3;
  clt.replicas = 1000;
  configs.push_back(clt);
  auto cascade = base("cascade");
  cascade.n = 2;
  cascade.depth = 2;
  cascade.replicas = 200;
  configs.push_back(cascade);
  auto cov = base("cov");
  cov.depth = 1;
  cov.n_max = 2;
  cov.replicas = 2000;
  configs.push_back(cov);
  auto limit = base("limit");
  limit.mode = "consistent";
  limit.depth = 3;
  limit.truncation = 6;
  configs.push_back(limit);
  auto spectrum = base("spectrum");
  spectrum.b = 2;
  spectrum.depth = 10;
  configs.push_back(spectrum);
  auto zyg = base("zygmund");
  zyg.b = 2;
  zyg.depth = 10;
  zyg.min_depth = 6;
  zyg.seeds = 5;
  configs.push_back(zyg);
  auto general = base("general");
  general.scheme = "geometric";
  general.theta = 1.2;
  general.depth = 2;
  general.truncation = 5;
  configs.push_back(general);

  for (auto c : configs) {
    INFO(c.command);
    c.workers = 1;
    const auto a = run_experiment(c);
    const auto again = run_experiment(c);
    c.workers = 3;
    const auto b = run_experiment(c);
    CHECK_FALSE(a.files.empty());
    CHECK(a.files == again.files);
    CHECK(a.files == b.files);
    CHECK(a.summary == b.summary);
  }
}

TEST_CASE("general refuses a scheme that fails the decay condition") {
  auto c = base("general");
  c.scheme = "geometric";
  c.theta = 2.0;
  c.depth = 2;
  c.truncation = 5;
  const auto out = run_experiment(c);
  CHECK(out.refused);
}

TEST_CASE("pool cache reproduces uncached outputs") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cascade_lab_cache_test";
  fs::remove_all(dir);
  auto c = base("clt");
  c.n_max = 2;
  c.replicas = 500;
  const auto plain = run_experiment(c);
  c.pool_cache = dir.string();
  const auto cold = run_experiment(c);
  const auto warm = run_experiment(c);
  CHECK(plain.files == cold.files);
  CHECK(plain.files == warm.files);
  CHECK(fs::exists(dir));
  fs::remove_all(dir);
}

TEST_CASE("resource caps surface as ResourceError") {
  auto c = base("limit");
  c.b = 4;
  c.depth = 14;
  c.truncation = 14;
  CHECK_THROWS_AS(run_experiment(c), ResourceError);
}
