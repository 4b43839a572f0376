#include "condmeta/meta.hpp"

#include <cmath>

namespace condmeta {

namespace {

Vec inner_point(const ConditioningParams& params, const Vec& phi,
                const Dataset& data, const Loss& loss, double lambda,
                InnerMode inner_mode, const InnerConfig& batch_cfg) {
  const Vec theta = apply_tau(params, phi);
  if (inner_mode == InnerMode::Batch) {
    InnerConfig cfg = batch_cfg;
    cfg.lambda = lambda;
    cfg.mode = InnerMode::Batch;
    return solve_batch(data, theta, loss, cfg).w_out;
  }
  return solve_online(data, theta, loss, lambda).w_last;
}

}  // namespace

double surrogate_loss(const ConditioningParams& params, const Vec& phi,
                      const Dataset& data, const Loss& loss, double lambda,
                      InnerMode inner_mode, const InnerConfig& batch_cfg) {
  const Vec theta = apply_tau(params, phi);
  const Vec w = inner_point(params, phi, data, loss, lambda, inner_mode, batch_cfg);
  return regularized_objective(w, data, theta, loss, lambda);
}

std::pair<Mat, Vec> meta_gradient(const ConditioningParams& params, const Vec& phi,
                                  const Dataset& data, const Loss& loss,
                                  double lambda, InnerMode inner_mode,
                                  const InnerConfig& batch_cfg) {
  const Vec theta = apply_tau(params, phi);
  const Vec w = inner_point(params, phi, data, loss, lambda, inner_mode, batch_cfg);
  const Vec g_b = -lambda * (w - theta);
  return {g_b * phi.transpose(), g_b};
}

MetaTrainResult train_meta(const std::vector<TaskInstance>& task_stream,
                           const MetaConfig& cfg) {
  if (cfg.T < 1) throw std::invalid_argument("train_meta: T >= 1 required");
  if (!(cfg.lambda > 0)) throw std::invalid_argument("train_meta: lambda > 0");
  if (cfg.gamma < 0) throw std::invalid_argument("train_meta: gamma >= 0");
  if (static_cast<int>(task_stream.size()) < cfg.T)
    throw std::invalid_argument("train_meta: task stream shorter than T");

  const int d = task_stream.front().train.dim();
  const int k = cfg.feature_map.k;

  ConditioningParams iter = ConditioningParams::zeros(d, k);
  Mat m_sum = Mat::Zero(d, k);
  Vec b_sum = Vec::Zero(d);

  MetaTrainResult res;
  if (cfg.log_iterations) res.trajectory.reserve(cfg.T);

  for (int t = 0; t < cfg.T; ++t) {
    const TaskInstance& task = task_stream[t];
    const Vec phi = cfg.feature_map.apply(task.side);
    m_sum += iter.M;
    b_sum += iter.b;

    const auto [g_m, g_b] =
        meta_gradient(iter, phi, task.train, cfg.loss, cfg.lambda,
                      cfg.inner_mode, cfg.batch_cfg);

    if (cfg.log_iterations) {
      MetaIterLog log;
      log.surrogate = surrogate_loss(iter, phi, task.train, cfg.loss, cfg.lambda,
                                     cfg.inner_mode, cfg.batch_cfg);
      log.grad_norm = std::sqrt(g_m.squaredNorm() + g_b.squaredNorm());
      log.phi_norm = phi.norm();
      log.input_radius = task.train.input_radius();
      log.theta = apply_tau(iter, phi);
      res.trajectory.push_back(std::move(log));
    }

    iter.M -= cfg.gamma * g_m;
    iter.b -= cfg.gamma * g_b;
  }

  res.avg_params = ConditioningParams{m_sum / cfg.T, b_sum / cfg.T};
  res.last_params = std::move(iter);
  return res;
}

std::pair<double, double> theoretical_hyperparams(double var_estimate,
                                                  double norm_mb, double L,
                                                  double R, double K, int n,
                                                  int T) {
  if (!(var_estimate > 0) || !(norm_mb > 0) || !(L > 0) || !(R > 0) ||
      !(K > 0) || n < 1 || T < 1)
    throw std::invalid_argument("theoretical_hyperparams: inputs must be positive");
  const double lambda = 2.0 * R * L / (var_estimate * std::sqrt(double(n)));
  const double gamma =
      norm_mb / (L * R * std::sqrt(K * K + 1.0) * std::sqrt(double(T)));
  return {lambda, gamma};
}

}  // namespace condmeta
