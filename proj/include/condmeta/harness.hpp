#ifndef CONDMETA_HARNESS_HPP
#define CONDMETA_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "condmeta/core.hpp"
#include "condmeta/environments.hpp"
#include "condmeta/inner.hpp"
#include "condmeta/oracle.hpp"

namespace condmeta {

enum class EnvKind { Clusters, Circle, Csv };

/// Methods compared by the experiment harness.  The cond_* variants differ
/// only in the feature map placed on the side information.
enum class Method {
  Itl,           // tau == 0, gamma forced to 0
  Uncond,        // zero feature map, bias b only
  MeanOracle,    // tau == mean of training-task targets (synthetic only)
  CondMeanInputs,
  CondXyOuter,
  CondCircle,
  CondRff,
};

std::string method_name(Method m);

struct GridSpec {
  int count = 14;
  double min_value = 1e-5;
  double max_value = 1e5;
  std::vector<double> explicit_values;  // overrides the log range when set

  std::vector<double> values() const;
};

struct ExperimentConfig {
  EnvKind env_kind = EnvKind::Clusters;
  ClusterEnvSpec clusters;
  CircleEnvSpec circle;
  std::string csv_path;
  CsvSchema csv_schema = CsvSchema::Generic;

  std::vector<Method> methods;
  int rff_k = 50;
  double rff_sigma = 10.0;

  GridSpec lambda_grid;
  GridSpec gamma_grid;

  int T_tr = 300;
  int T_va = 100;
  int T_te = 80;
  double within_train_fraction = 0.5;

  std::vector<int> checkpoints;  // empty: 10 log-spaced values in [10, T_tr]
  std::vector<std::uint64_t> seeds{0};
  InnerMode inner_mode = InnerMode::Online;
  std::string output_dir = "out";

  void validate() const;
  std::vector<int> resolved_checkpoints() const;
};

/// Parse the flat [section] key = value config format.
ExperimentConfig load_config(const std::string& path);

struct CurveRow {
  std::string method;
  std::uint64_t seed = 0;
  int T = 0;
  double lambda = 0.0;
  double gamma = 0.0;
  double test_error = 0.0;
};

struct DiagnosticsRow {
  std::uint64_t seed = 0;
  GapReport report;
};

struct ExperimentResult {
  std::vector<CurveRow> rows;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<std::string> warnings;
};

/// Mean test error of a conditioning function over an evaluation set:
/// per task theta = model(side), inner training on the train split, then
/// the loss on the test split.  Tasks with an empty test split are skipped.
double evaluate_method(const ConditioningFn& model,
                       const std::vector<TaskInstance>& tasks, const Loss& loss,
                       double lambda, InnerMode inner_mode);

/// Full validation protocol: per seed, generate/load and split the tasks,
/// grid-search (lambda, gamma) per method on the validation tasks, then
/// re-train at every curve checkpoint and score the test tasks.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Write curves.csv, diagnostics.csv, run_meta.json and curves.svg into
/// cfg.output_dir.
void emit_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

}  // namespace condmeta

#endif
