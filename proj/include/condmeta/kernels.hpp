#ifndef CONDMETA_KERNELS_HPP
#define CONDMETA_KERNELS_HPP

#include <vector>

#include "condmeta/core.hpp"
#include "condmeta/features.hpp"
#include "condmeta/inner.hpp"

namespace condmeta {

/// Kernel on side information: either the explicit-feature inner product
/// k(s, s') = Phi(s)^T Phi(s') or a Gaussian kernel on a mean embedding of
/// the side information.
struct KernelFn {
  enum class Kind { LinearFeatures, Gaussian };

  Kind kind = Kind::LinearFeatures;
  FeatureMap features;      // LinearFeatures
  double bandwidth = 1.0;   // Gaussian

  static KernelFn linear(FeatureMap features);
  static KernelFn gaussian(double bandwidth);

  double eval(const SideInfo& a, const SideInfo& b) const;

  /// Embedding used by the Gaussian kernel: the scalar itself, the mean
  /// input, or the mean of vec(x (y,1)^T) over the datapoints.
  static Vec embed(const SideInfo& side);
};

/// Kernel expansion theta(s) = -gamma * sum_j weight_j g_j k(s_j, s) + b,
/// with g_j the meta-subgradient recorded at iteration j.
struct KernelModel {
  std::vector<SideInfo> sides;
  std::vector<Vec> grads;
  std::vector<double> weights;  // 1 for the per-iterate model, (T-j)/T averaged
  Vec b;
  double gamma = 0.0;
  double lambda = 1.0;
  KernelFn kernel;
};

struct KernelTrainResult {
  KernelModel last;      // predicts theta_{T+1}
  KernelModel averaged;  // predicts the mean of the T per-iterate predictors
  std::vector<Vec> theta_log;  // theta_t per iteration when requested
};

KernelTrainResult kernel_train_meta(const std::vector<TaskInstance>& task_stream,
                                    const KernelFn& kernel, double gamma,
                                    double lambda, int T, InnerMode inner_mode,
                                    const Loss& loss, bool log_theta = false);

Vec kernel_predict(const KernelModel& model, const SideInfo& side);

}  // namespace condmeta

#endif
