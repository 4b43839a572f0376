#ifndef CONDMETA_ENVIRONMENTS_HPP
#define CONDMETA_ENVIRONMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "condmeta/core.hpp"
#include "condmeta/features.hpp"

namespace condmeta {

/// Mixture of m task clusters: targets scatter around per-cluster centers,
/// inputs around per-cluster input centers; side information is the input
/// collection.
struct ClusterEnvSpec {
  int m = 1;
  int d = 1;
  Mat w_centers;  // m x d
  Mat x_centers;  // m x d
  double sigma_w = 1.0;
  double sigma_x = 1.0;
  int n_tot = 20;
  int T_tot = 1;
  double snr = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Targets scatter around h(s) = r (cos 2 pi s, sin 2 pi s, 0, ...) + c with
/// s uniform on [0,1]; side information is the scalar s.
struct CircleEnvSpec {
  double r = 1.0;
  Vec c;  // d, defaults to zero when empty
  double sigma = 1.0;
  int d = 2;
  int n_tot = 20;
  int T_tot = 1;
  double snr = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Test fixture where the target is exactly linear in the features of a
/// scalar side information: w = M* Phi(s) + b* + noise.
struct PlantedEnvSpec {
  int d = 1;
  int n_tot = 20;
  int T_tot = 1;
  double snr = 1.0;
  std::uint64_t seed = 0;
};

std::vector<TaskInstance> gen_clusters(const ClusterEnvSpec& spec);
std::vector<TaskInstance> gen_circle(const CircleEnvSpec& spec);
std::vector<TaskInstance> gen_planted_linear(const ConditioningParams& star,
                                             const FeatureMap& feature_map,
                                             double noise,
                                             const PlantedEnvSpec& spec);

enum class CsvSchema { Generic, Lenk, Schools };

/// One row per datapoint: header task_id,y,x_1..x_d; tasks grouped by id.
/// Lenk tasks carry datapoint-collection side info, the others inputs.
std::vector<TaskInstance> load_csv_env(const std::string& path, CsvSchema schema);

/// Write tasks back out in the same flat format.
void save_csv_env(const std::string& path, const std::vector<TaskInstance>& tasks);

struct TaskSplit {
  std::vector<TaskInstance> train;
  std::vector<TaskInstance> val;
  std::vector<TaskInstance> test;
};

/// Disjoint shuffled partition into meta-train/val/test task sets.  Every
/// task's dataset is cut into a train part (the given fraction) and a test
/// remainder; meta-training tasks keep only the train part.  Collection
/// side information is rebuilt from the train part alone.
TaskSplit split_tasks(const std::vector<TaskInstance>& tasks, int T_tr, int T_va,
                      int T_te, double within_train_fraction, std::uint64_t seed);

}  // namespace condmeta

#endif
