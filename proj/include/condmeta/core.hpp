#ifndef CONDMETA_CORE_HPP
#define CONDMETA_CORE_HPP

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace condmeta {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A finite sample of (input vector, scalar output) pairs for one task.
/// Inputs are stored row-wise, one row per datapoint.
struct Dataset {
  Mat inputs;   // n x d
  Vec outputs;  // n

  Dataset() = default;
  Dataset(Mat x, Vec y);

  int n() const { return static_cast<int>(inputs.rows()); }
  int dim() const { return static_cast<int>(inputs.cols()); }
  bool empty() const { return inputs.rows() == 0; }

  /// Largest input norm max_i ||x_i||.
  double input_radius() const;

  /// Rows [begin, begin+count).
  Dataset slice(int begin, int count) const;
};

enum class LossKind { Absolute, Squared };

/// Pointwise loss l(pred, y) with a valid subgradient in the first argument.
/// Squared loss is 0.5*(pred-y)^2, so its prediction gradient is pred-y and
/// the batch regularized minimizer has the usual ridge closed form.
struct Loss {
  LossKind kind = LossKind::Absolute;
  double lipschitz = 1.0;

  static Loss absolute() { return Loss{LossKind::Absolute, 1.0}; }
  // Squared loss is not globally Lipschitz; the caller supplies a bound
  // valid on the data range it will be used on.
  static Loss squared(double lipschitz_bound);

  double value(double pred, double y) const;
  // At a kink of the absolute loss (pred == y) the minimal-norm
  // subgradient 0 is returned.
  double subgradient(double pred, double y) const;
};

/// Side information observed with a task: a scalar descriptor in [0,1],
/// a collection of input points, or a collection of datapoints.
struct SideInfo {
  enum class Kind { Scalar, Inputs, Datapoints };

  Kind kind = Kind::Scalar;
  double scalar = 0.0;
  Mat points;   // rows are input vectors (Inputs / Datapoints)
  Vec outputs;  // Datapoints only

  static SideInfo from_scalar(double s);
  static SideInfo from_inputs(Mat x);
  static SideInfo from_datapoints(Mat x, Vec y);
};

/// One task as observed by the learner: a train split, an optional test
/// split, side information, and (synthetic environments only) the
/// ground-truth target vector.
struct TaskInstance {
  Dataset train;
  Dataset test;
  SideInfo side;
  std::optional<Vec> target;
};

/// Parameters (M, b) of the linear conditioning function
/// tau(s) = M * Phi(s) + b.  k = 0 encodes the unconditional family.
struct ConditioningParams {
  Mat M;  // d x k
  Vec b;  // d

  static ConditioningParams zeros(int d, int k);

  int dim() const { return static_cast<int>(b.size()); }
  int k() const { return static_cast<int>(M.cols()); }
  double frobenius_sq() const { return M.squaredNorm() + b.squaredNorm(); }
};

/// tau(s) = M * phi_s + b.
Vec apply_tau(const ConditioningParams& params, const Vec& phi_s);

/// Empirical risk (1/n) sum_i l(<x_i, w>, y_i).
double loss_eval(const Loss& loss, const Vec& w, const Dataset& data);

}  // namespace condmeta

#endif
