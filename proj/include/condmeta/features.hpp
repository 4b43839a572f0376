#ifndef CONDMETA_FEATURES_HPP
#define CONDMETA_FEATURES_HPP

#include <cstdint>
#include <vector>

#include "condmeta/core.hpp"

namespace condmeta {

/// Phi(X) = (1/n) sum_i x_i for a collection of input points.
Vec phi_mean_inputs(const SideInfo& side);

/// Phi(Z) = mean of vec(x_i (y_i, 1)^T) over the datapoints; the x*y column
/// is stacked first, then x.
Vec phi_xy_outer(const SideInfo& side);

/// Phi(s) = (cos 2 pi s, sin 2 pi s) for a scalar s in [0,1].
Vec phi_circle(double s);

enum class FeatureKind { Zero, MeanInputs, XyOuter, Circle, Rff };

/// A feature map on side information with a known (possibly conservative)
/// sup-norm bound K.  Immutable after construction; apply() is pure.
struct FeatureMap {
  FeatureKind kind = FeatureKind::Zero;
  int k = 0;
  double bound_K = 0.0;

  // Random Fourier feature parameters (kind == Rff only).
  Mat rff_u;  // k x d, entries i.i.d. N(0, sigma^2)
  Vec rff_v;  // k, uniform on [0, 2*pi]
  double rff_sigma = 0.0;
  std::uint64_t rff_seed = 0;

  static FeatureMap zero();
  static FeatureMap mean_inputs(int d);
  static FeatureMap xy_outer(int d);
  static FeatureMap circle();

  Vec apply(const SideInfo& side) const;

  /// Largest observed feature norm over the given tasks.  Used for
  /// maps whose analytic bound is not available (mean_inputs, xy_outer).
  double estimate_bound(const std::vector<TaskInstance>& tasks) const;
};

/// Random Fourier features approximating a Gaussian kernel:
/// phi(x) = sqrt(2/k) cos(U x + v) applied component-wise, ||phi|| <= sqrt(2).
/// Collection side information is mapped per point and averaged; scalar side
/// information is treated as a 1-dimensional input (d must be 1).
FeatureMap rff_new(int k, double sigma, int d, std::uint64_t seed);

}  // namespace condmeta

#endif
