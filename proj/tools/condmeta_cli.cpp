// Command-line front end: run experiments, print gap diagnostics, emit
// synthetic environments as CSV, and validate config files.
//
// Exit codes: 0 success, 2 config error, 3 data/output error.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "condmeta/environments.hpp"
#include "condmeta/harness.hpp"
#include "condmeta/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

condmeta::ExperimentConfig load_or_die(const std::string& path) {
  // load_config throws invalid_argument on any malformed config.
  return condmeta::load_config(path);
}

std::vector<condmeta::TaskInstance> generate_synthetic(
    const condmeta::ExperimentConfig& cfg) {
  using condmeta::EnvKind;
  if (cfg.env_kind == EnvKind::Clusters) {
    condmeta::ClusterEnvSpec spec = cfg.clusters;
    spec.seed = cfg.seeds.front();
    return condmeta::gen_clusters(spec);
  }
  if (cfg.env_kind == EnvKind::Circle) {
    condmeta::CircleEnvSpec spec = cfg.circle;
    spec.seed = cfg.seeds.front();
    return condmeta::gen_circle(spec);
  }
  throw std::invalid_argument("a synthetic environment (clusters or circle) is required");
}

condmeta::FeatureMap diagnostic_feature_map(
    const condmeta::ExperimentConfig& cfg,
    const std::vector<condmeta::TaskInstance>& tasks) {
  using condmeta::Method;
  const int d = tasks.front().train.dim();
  for (Method m : cfg.methods) {
    switch (m) {
      case Method::CondMeanInputs: return condmeta::FeatureMap::mean_inputs(d);
      case Method::CondXyOuter: return condmeta::FeatureMap::xy_outer(d);
      case Method::CondCircle: return condmeta::FeatureMap::circle();
      case Method::CondRff:
        return condmeta::rff_new(
            cfg.rff_k, cfg.rff_sigma,
            tasks.front().side.kind == condmeta::SideInfo::Kind::Scalar ? 1 : d,
            cfg.seeds.front() * 7919 + 13);
      default: break;
    }
  }
  return condmeta::FeatureMap::zero();
}

int cmd_run(const std::string& config_path) {
  condmeta::ExperimentConfig cfg;
  try {
    cfg = load_or_die(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const condmeta::ExperimentResult result = condmeta::run_experiment(cfg);
    condmeta::emit_outputs(cfg, result);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "wrote " << result.rows.size() << " curve rows to "
              << cfg.output_dir << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_gap(const std::string& config_path) {
  condmeta::ExperimentConfig cfg;
  try {
    cfg = load_or_die(config_path);
    if (cfg.env_kind == condmeta::EnvKind::Csv)
      throw std::invalid_argument("gap: synthetic environment required");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const auto tasks = generate_synthetic(cfg);
    const auto fm = diagnostic_feature_map(cfg, tasks);
    const condmeta::GapReport report = condmeta::gap_report(tasks, fm);
    std::printf("tasks: %zu\n", tasks.size());
    std::printf("var_itl: %.17g\n", report.var_itl);
    std::printf("var_uncond: %.17g\n", report.var_uncond);
    std::printf("var_best_linear: %.17g\n", report.var_best_linear);
    std::printf("gap_uncond_vs_linear: %.17g\n", report.gap_uncond_vs_linear);
    std::printf("gap_itl_vs_uncond: %.17g\n", report.gap_itl_vs_uncond);
    if (cfg.env_kind == condmeta::EnvKind::Clusters) {
      const int n_side =
          static_cast<int>(tasks.front().side.points.rows());
      std::printf("cluster_gap_lower_bound: %.17g\n",
                  condmeta::cluster_gap_lower_bound(cfg.clusters, n_side));
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_gen(const std::string& config_path, const std::string& out_path) {
  condmeta::ExperimentConfig cfg;
  try {
    cfg = load_or_die(config_path);
    if (cfg.env_kind == condmeta::EnvKind::Csv)
      throw std::invalid_argument("gen: synthetic environment required");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const auto tasks = generate_synthetic(cfg);
    condmeta::save_csv_env(out_path, tasks);
    std::cout << "wrote " << tasks.size() << " tasks to " << out_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int cmd_validate(const std::string& config_path) {
  try {
    load_or_die(config_path);
    std::cout << "config ok\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional meta-learning experiments"};
  app.require_subcommand(1);

  std::string config_path, out_path;

  CLI::App* run = app.add_subcommand("run", "run the experiment in a config file");
  run->add_option("--config", config_path, "config file path")->required();

  CLI::App* gap = app.add_subcommand("gap", "oracle gap diagnostics for a synthetic environment");
  gap->add_option("--config", config_path, "config file path")->required();

  CLI::App* gen = app.add_subcommand("gen", "emit a synthetic environment to CSV");
  gen->add_option("--config", config_path, "config file path")->required();
  gen->add_option("--out", out_path, "output CSV path")->required();

  CLI::App* validate = app.add_subcommand("validate-config", "parse and check a config file");
  validate->add_option("--config", config_path, "config file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (run->parsed()) return cmd_run(config_path);
  if (gap->parsed()) return cmd_gap(config_path);
  if (gen->parsed()) return cmd_gen(config_path, out_path);
  if (validate->parsed()) return cmd_validate(config_path);
  return kExitConfig;
}
