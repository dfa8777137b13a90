// cascade_lab: batch front-end over the experiment runners.
//
//   cascade_lab moments --b 3 --law twopoint --a 0.7 --n 100
//   cascade_lab clt --b 3 --law twopoint --a 0.7 --n-max 4 --replicas 10000 --seed 7
//   cascade_lab --assert
//
// Exit codes: 0 ok, 2 validation or domain refusal, 3 resource cap,
// 4 acceptance failure under --assert.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "cascade/acceptance.hpp"
#include "cascade/errors.hpp"
#include "cascade/experiments.hpp"
#include "cascade/weight_law.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum Exit : int { kOk = 0, kRefused = 2, kResource = 3, kAssertFailed = 4 };

struct LawFlags {
  std::string name;
  std::optional<double> a, c, rho;
};

std::optional<cascade::WeightLaw> make_law(const LawFlags& f) {
  using cascade::WeightLaw;
  auto need = [&](const std::optional<double>& x, const char* flag) {
    if (!x) throw cascade::InputError("--law " + f.name + " requires " + flag);
    return *x;
  };
  if (f.name.empty()) return std::nullopt;
  if (f.name == "dirac") return WeightLaw::dirac();
  if (f.name == "twopoint") return WeightLaw::two_point(need(f.a, "--a"));
  if (f.name == "uniform") return WeightLaw::uniform(need(f.c, "--c"));
  if (f.name == "lognormal") return WeightLaw::log_normal(need(f.rho, "--rho"));
  throw cascade::InputError("unknown law '" + f.name + "' (dirac, twopoint, uniform, lognormal)");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw cascade::ResourceError("cannot write " + path.string());
}

Json config_json(const cascade::ExperimentConfig& c, const LawFlags& law) {
  Json j;
  j["command"] = c.command;
  j["b"] = c.b;
  j["law"] = c.law ? c.law->describe() : "";
  if (!law.name.empty()) j["law_name"] = law.name;
  j["pool_size"] = c.pool_size;
  j["inner_iterations"] = c.inner_iterations;
  j["n"] = c.n;
  j["n_max"] = c.n_max;
  j["depth"] = c.depth;
  j["truncation"] = c.truncation;
  j["replicas"] = c.replicas;
  j["workers"] = c.workers;
  j["mode"] = c.mode;
  j["scheme"] = c.scheme;
  j["theta"] = c.theta;
  j["seeds"] = c.seeds;
  j["min_depth"] = c.min_depth;
  j["pool_cache"] = c.pool_cache;
  return j;
}

void add_experiment_options(CLI::App* sub, cascade::ExperimentConfig& c, LawFlags& law,
                            std::optional<std::uint64_t>& seed) {
  sub->add_option("--b", c.b, "branching number b")->check(CLI::Range(2, 36));
  sub->add_option("--law", law.name, "weight law: dirac, twopoint, uniform, lognormal");
  sub->add_option("--a", law.a, "twopoint half-spread");
  sub->add_option("--c", law.c, "uniform half-width");
  sub->add_option("--rho", law.rho, "lognormal parameter");
  sub->add_option("--seed", seed, "master seed (required for stochastic runs)");
  sub->add_option("--pool-size,--P", c.pool_size, "pool size P");
  sub->add_option("--inner,--K", c.inner_iterations, "inner pool iterations K");
  sub->add_option("--n", c.n, "moment steps / T iterations");
  sub->add_option("--n-max", c.n_max, "largest generation for clt and cov");
  sub->add_option("--j,--depth", c.depth, "path depth j");
  sub->add_option("--L", c.truncation, "series truncation depth L");
  sub->add_option("--replicas,--R", c.replicas, "replica count R");
  sub->add_option("--mode", c.mode, "limit mode: marginal or consistent");
  sub->add_option("--scheme", c.scheme, "general scheme: canonical or geometric");
  sub->add_option("--theta", c.theta, "geometric scheme ratio");
  sub->add_option("--seeds", c.seeds, "independent fields for zygmund");
  sub->add_option("--min-depth", c.min_depth, "zygmund trend starting depth");
}

int run_assert(unsigned workers) {
  bool all = true;
  for (const auto& r : cascade::acceptance::run_all(workers)) {
    std::cout << cascade::acceptance::format(r) << std::endl;
    all = all && r.passed;
  }
  return all ? kOk : kAssertFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cascade_lab: multiplicative cascade experiments"};
  app.set_config("--config", "", "INI-style config file; [section] per subcommand, flags override");
  app.require_subcommand(0, 1);
  app.fallthrough();

  cascade::ExperimentConfig config;
  LawFlags law;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "cascade_out";
  bool assert_mode = false;

  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", config.workers, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 256u));
  app.add_flag("--assert", assert_mode, "run the acceptance suite; exit 4 on failure");

  for (const auto& name : cascade::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_experiment_options(sub, config, law, seed);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kRefused;
  }

  const auto chosen = app.get_subcommands();
  if (chosen.empty() && !assert_mode) {
    std::cerr << app.help();
    return kRefused;
  }

  int code = kOk;
  if (!chosen.empty()) {
    const auto* sub = chosen.front();
    config.command = sub->get_name();
    config.seed = seed;
    // spectrum and zygmund take their tree depth from --depth, else --n, else a b-dependent default
    if ((config.command == "spectrum" || config.command == "zygmund") && sub->count("--depth") == 0) {
      config.depth = sub->count("--n") > 0 ? config.n : (config.b == 2 ? 16 : 12);
    }
    if (const char* cache = std::getenv("CASCADE_LAB_CACHE"); cache && *cache) {
      config.pool_cache = cache;
    }
    Json manifest;
    manifest["tool"] = "cascade_lab";
    manifest["version"] = CASCADE_LAB_VERSION;
    manifest["compiler"] = __VERSION__;
    manifest["cplusplus"] = __cplusplus;
    try {
      config.law = make_law(law);
      manifest["config"] = config_json(config, law);
      manifest["seeds"] = Json{{"master", seed ? Json(*seed) : Json(nullptr)}};
      const auto artifacts = cascade::run_experiment(config);

      fs::create_directories(out_dir);
      Json files = Json::array();
      for (const auto& [name, text] : artifacts.files) {
        write_file(fs::path(out_dir) / name, text);
        files.push_back(name);
      }
      write_file(fs::path(out_dir) / "summary.json", artifacts.summary);
      manifest["files"] = files;
      manifest["summary"] = Json::parse(artifacts.summary);
      manifest["refused"] = artifacts.refused;
      write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");

      if (artifacts.refused) {
        std::cerr << "refused: " << manifest["summary"].value("reason", artifacts.summary)
                  << std::endl;
        code = kRefused;
      } else {
        std::cout << artifacts.summary;
      }
    } catch (const cascade::ResourceError& e) {
      std::cerr << "resource cap: " << e.what() << std::endl;
      code = kResource;
    } catch (const cascade::DomainError& e) {
      std::cerr << "domain refusal: " << e.what() << std::endl;
      code = kRefused;
    } catch (const cascade::InputError& e) {
      std::cerr << "invalid input: " << e.what() << std::endl;
      code = kRefused;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << std::endl;
      code = 1;
    }
  }

  if (assert_mode) {
    const int verdict = run_assert(config.workers == 1 ? 4 : config.workers);
    if (code == kOk) code = verdict;
  }
  return code;
}
