#ifndef CONDMETA_META_HPP
#define CONDMETA_META_HPP

#include <utility>
#include <vector>

#include "condmeta/core.hpp"
#include "condmeta/features.hpp"
#include "condmeta/inner.hpp"

namespace condmeta {

struct MetaConfig {
  double gamma = 0.0;   // meta-step size, 0 freezes the iterates (ITL)
  double lambda = 1.0;  // inner regularization
  InnerMode inner_mode = InnerMode::Batch;
  int T = 1;
  FeatureMap feature_map;
  Loss loss = Loss::absolute();
  InnerConfig batch_cfg;  // lambda/mode fields are overridden per call
  bool log_iterations = false;
};

struct MetaIterLog {
  double surrogate = 0.0;  // surrogate loss at the iteration's task
  double grad_norm = 0.0;  // Frobenius norm of the stacked gradient
  double phi_norm = 0.0;   // ||Phi(s_t)||
  double input_radius = 0.0;  // max ||x_i|| in Z_t
  Vec theta;               // bias used at this iteration
};

struct MetaTrainResult {
  ConditioningParams avg_params;   // mean of the T iterates
  ConditioningParams last_params;  // iterate T+1
  std::vector<MetaIterLog> trajectory;  // filled when log_iterations
};

/// Regularized empirical risk at the inner algorithm's output for bias
/// theta = M phi + b.  Batch mode evaluates at the batch minimizer; online
/// mode at the last online iterate, matching the gradient approximation.
double surrogate_loss(const ConditioningParams& params, const Vec& phi,
                      const Dataset& data, const Loss& loss, double lambda,
                      InnerMode inner_mode,
                      const InnerConfig& batch_cfg = InnerConfig{});

/// Gradient of the surrogate meta-loss in (M, b):
///   G_M = -lambda (w - theta) phi^T,  g_b = -lambda (w - theta),
/// with w the batch minimizer (batch mode) or the last online iterate.
std::pair<Mat, Vec> meta_gradient(const ConditioningParams& params, const Vec& phi,
                                  const Dataset& data, const Loss& loss,
                                  double lambda, InnerMode inner_mode,
                                  const InnerConfig& batch_cfg = InnerConfig{});

/// SGD on the surrogate objective over the linear conditioning family,
/// started at (0, 0), one task per step, averaged iterates returned.
MetaTrainResult train_meta(const std::vector<TaskInstance>& task_stream,
                           const MetaConfig& cfg);

/// The theoretical schedules lambda = 2RL/(Var sqrt(n)) and
/// gamma = ||(M,b)||_F / (L R sqrt(K^2+1) sqrt(T)).
std::pair<double, double> theoretical_hyperparams(double var_estimate,
                                                  double norm_mb, double L,
                                                  double R, double K, int n,
                                                  int T);

}  // namespace condmeta

#endif
