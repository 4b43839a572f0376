#ifndef CONDMETA_ORACLE_HPP
#define CONDMETA_ORACLE_HPP

#include <functional>
#include <vector>

#include "condmeta/core.hpp"
#include "condmeta/environments.hpp"
#include "condmeta/features.hpp"

namespace condmeta {

using ConditioningFn = std::function<Vec(const SideInfo&)>;

/// Monte-Carlo estimate of the squared variance of the targets around a
/// conditioning function: (1/T) sum ||w_target - tau(s)||^2.  Requires
/// ground-truth targets (synthetic environments only).
double estimate_variance(const ConditioningFn& tau,
                         const std::vector<TaskInstance>& tasks);

/// Arithmetic mean of the targets, the optimal constant bias.
Vec unconditional_mean(const std::vector<TaskInstance>& tasks);

/// Closed-form lower bound on the conditional-vs-unconditional variance gap
/// for a cluster environment whose side information is n input points:
///   (1/2m^2) sum_{i,j} (1 - (m/2) exp(-(n/sigma_x^2) ||x(i)-x(j)||^2))
///            * ||w(i)-w(j)||^2.
double cluster_gap_lower_bound(const ClusterEnvSpec& spec, int n);

struct BestLinearResult {
  ConditioningParams params;
  double achieved_variance = 0.0;  // empirical Var^2 of the fitted function
};

/// Best linear conditioning function in hindsight from empirical first and
/// second moments: M = Cov(w,s) Cov(s,s)^+, b = w_mean - M nu.  Singular
/// values below ridge_eps * sigma_max are zeroed in the pseudo-inverse.
BestLinearResult best_linear_params(const std::vector<TaskInstance>& tasks,
                                    const FeatureMap& feature_map,
                                    double ridge_eps = 1e-10);

struct GapReport {
  double var_itl = 0.0;          // Var(tau == 0)^2
  double var_uncond = 0.0;       // Var(tau == mean)^2
  double var_best_linear = 0.0;  // Var of the fitted linear function
  double gap_uncond_vs_linear = 0.0;
  double gap_itl_vs_uncond = 0.0;
};

GapReport gap_report(const std::vector<TaskInstance>& tasks,
                     const FeatureMap& feature_map);

}  // namespace condmeta

#endif
