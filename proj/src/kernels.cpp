#include "condmeta/kernels.hpp"

#include <cmath>

namespace condmeta {

KernelFn KernelFn::linear(FeatureMap features) {
  KernelFn k;
  k.kind = Kind::LinearFeatures;
  k.features = std::move(features);
  return k;
}

KernelFn KernelFn::gaussian(double bandwidth) {
  if (!(bandwidth > 0))
    throw std::invalid_argument("KernelFn::gaussian: bandwidth > 0 required");
  KernelFn k;
  k.kind = Kind::Gaussian;
  k.bandwidth = bandwidth;
  return k;
}

Vec KernelFn::embed(const SideInfo& side) {
  switch (side.kind) {
    case SideInfo::Kind::Scalar: {
      Vec v(1);
      v << side.scalar;
      return v;
    }
    case SideInfo::Kind::Inputs:
      return phi_mean_inputs(side);
    case SideInfo::Kind::Datapoints:
      return phi_xy_outer(side);
  }
  throw std::logic_error("KernelFn::embed: unknown side kind");
}

double KernelFn::eval(const SideInfo& a, const SideInfo& b) const {
  if (kind == Kind::LinearFeatures)
    return features.apply(a).dot(features.apply(b));
  const double dist2 = (embed(a) - embed(b)).squaredNorm();
  return std::exp(-dist2 / (2.0 * bandwidth * bandwidth));
}

Vec kernel_predict(const KernelModel& model, const SideInfo& side) {
  Vec theta = model.b;
  for (size_t j = 0; j < model.sides.size(); ++j) {
    if (model.weights[j] == 0.0) continue;
    theta -= model.gamma * model.weights[j] *
             model.kernel.eval(model.sides[j], side) * model.grads[j];
  }
  return theta;
}

KernelTrainResult kernel_train_meta(const std::vector<TaskInstance>& task_stream,
                                    const KernelFn& kernel, double gamma,
                                    double lambda, int T, InnerMode inner_mode,
                                    const Loss& loss, bool log_theta) {
  if (T < 1) throw std::invalid_argument("kernel_train_meta: T >= 1 required");
  if (!(lambda > 0))
    throw std::invalid_argument("kernel_train_meta: lambda > 0 required");
  if (gamma < 0) throw std::invalid_argument("kernel_train_meta: gamma >= 0");
  if (static_cast<int>(task_stream.size()) < T)
    throw std::invalid_argument("kernel_train_meta: task stream shorter than T");

  const int d = task_stream.front().train.dim();

  KernelModel model;
  model.gamma = gamma;
  model.lambda = lambda;
  model.kernel = kernel;
  model.b = Vec::Zero(d);

  KernelTrainResult res;
  Vec b_sum = Vec::Zero(d);

  for (int t = 0; t < T; ++t) {
    const TaskInstance& task = task_stream[t];

    // theta_t from the gradient history, by kernel evaluations only
    Vec theta = model.b;
    for (int j = 0; j < t; ++j)
      theta -= gamma * kernel.eval(model.sides[j], task.side) * model.grads[j];
    if (log_theta) res.theta_log.push_back(theta);
    b_sum += model.b;

    Vec w;
    if (inner_mode == InnerMode::Batch) {
      InnerConfig cfg;
      cfg.lambda = lambda;
      w = solve_batch(task.train, theta, loss, cfg).w_out;
    } else {
      w = solve_online(task.train, theta, loss, lambda).w_last;
    }
    const Vec g = -lambda * (w - theta);

    model.sides.push_back(task.side);
    model.grads.push_back(g);
    model.weights.push_back(1.0);
    model.b -= gamma * g;
  }

  res.averaged = model;
  res.averaged.b = b_sum / T;
  // Entry j (1-based) enters the per-iterate predictors t = j+1..T, so its
  // weight in the averaged predictor is (T - j) / T.
  for (int j = 0; j < T; ++j)
    res.averaged.weights[j] = double(T - (j + 1)) / T;
  res.last = std::move(model);
  return res;
}

}  // namespace condmeta
