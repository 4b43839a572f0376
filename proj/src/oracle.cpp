#include "condmeta/oracle.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace condmeta {

namespace {
const Vec& require_target(const TaskInstance& task) {
  if (!task.target)
    throw std::invalid_argument("oracle: task without ground-truth target");
  return *task.target;
}
}  // namespace

double estimate_variance(const ConditioningFn& tau,
                         const std::vector<TaskInstance>& tasks) {
  if (tasks.empty()) throw std::invalid_argument("estimate_variance: no tasks");
  double acc = 0.0;
  for (const auto& task : tasks)
    acc += (require_target(task) - tau(task.side)).squaredNorm();
  return acc / tasks.size();
}

Vec unconditional_mean(const std::vector<TaskInstance>& tasks) {
  if (tasks.empty()) throw std::invalid_argument("unconditional_mean: no tasks");
  Vec mean = Vec::Zero(require_target(tasks.front()).size());
  for (const auto& task : tasks) mean += require_target(task);
  return mean / tasks.size();
}

double cluster_gap_lower_bound(const ClusterEnvSpec& spec, int n) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("cluster_gap_lower_bound: n >= 1");
  const double m = spec.m;
  double acc = 0.0;
  for (int i = 0; i < spec.m; ++i) {
    for (int j = 0; j < spec.m; ++j) {
      const double dx2 =
          (spec.x_centers.row(i) - spec.x_centers.row(j)).squaredNorm();
      const double dw2 =
          (spec.w_centers.row(i) - spec.w_centers.row(j)).squaredNorm();
      const double overlap =
          (m / 2.0) * std::exp(-(n / (spec.sigma_x * spec.sigma_x)) * dx2);
      acc += (1.0 - overlap) * dw2;
    }
  }
  return acc / (2.0 * m * m);
}

BestLinearResult best_linear_params(const std::vector<TaskInstance>& tasks,
                                    const FeatureMap& feature_map,
                                    double ridge_eps) {
  if (tasks.size() < 2)
    throw std::invalid_argument("best_linear_params: >= 2 tasks required");
  const int T = static_cast<int>(tasks.size());
  const int d = static_cast<int>(require_target(tasks.front()).size());
  const int k = feature_map.k;

  Mat phis(T, k);
  Mat ws(T, d);
  for (int t = 0; t < T; ++t) {
    phis.row(t) = feature_map.apply(tasks[t].side).transpose();
    ws.row(t) = require_target(tasks[t]).transpose();
  }
  const Vec nu = phis.colwise().mean().transpose();
  const Vec w_mean = ws.colwise().mean().transpose();
  const double phi_scale = phis.squaredNorm() / T;  // mean ||phi||^2
  phis.rowwise() -= nu.transpose();
  ws.rowwise() -= w_mean.transpose();

  const Mat cov_ss = phis.transpose() * phis / T;  // k x k
  const Mat cov_ws = ws.transpose() * phis / T;    // d x k

  Mat m = Mat::Zero(d, k);
  if (k > 0) {
    Eigen::JacobiSVD<Mat> svd(cov_ss, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec sv = svd.singularValues();
    // anchored to the raw feature scale so that a numerically-zero
    // covariance (constant features) is treated as zero, not inverted
    const double cutoff =
        ridge_eps * std::max(sv.size() > 0 ? sv[0] : 0.0, phi_scale);
    Vec inv = Vec::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > cutoff && sv[i] > 0.0) inv[i] = 1.0 / sv[i];
    const Mat pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    m = cov_ws * pinv;
  }

  BestLinearResult res;
  res.params = ConditioningParams{m, w_mean - m * nu};
  const ConditioningParams& p = res.params;
  res.achieved_variance = estimate_variance(
      [&](const SideInfo& s) { return apply_tau(p, feature_map.apply(s)); },
      tasks);
  return res;
}

GapReport gap_report(const std::vector<TaskInstance>& tasks,
                     const FeatureMap& feature_map) {
  const Vec w_mean = unconditional_mean(tasks);
  const Vec zero = Vec::Zero(w_mean.size());

  GapReport report;
  report.var_itl =
      estimate_variance([&](const SideInfo&) { return zero; }, tasks);
  report.var_uncond =
      estimate_variance([&](const SideInfo&) { return w_mean; }, tasks);
  report.var_best_linear =
      best_linear_params(tasks, feature_map).achieved_variance;
  report.gap_uncond_vs_linear = report.var_uncond - report.var_best_linear;
  report.gap_itl_vs_uncond = report.var_itl - report.var_uncond;
  return report;
}

}  // namespace condmeta
