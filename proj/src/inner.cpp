#include "condmeta/inner.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace condmeta {

namespace {

void check_inputs(const Dataset& data, const Vec& theta, double lambda) {
  if (data.empty()) throw std::invalid_argument("inner: empty dataset");
  if (theta.size() != data.dim())
    throw std::invalid_argument("inner: theta dimension mismatch");
  if (!(lambda > 0)) throw std::invalid_argument("inner: lambda must be > 0");
  if (!data.inputs.allFinite() || !data.outputs.allFinite() || !theta.allFinite())
    throw std::invalid_argument("inner: non-finite input");
}

// Subgradient of the regularized objective at w.
Vec objective_subgradient(const Vec& w, const Dataset& data, const Vec& theta,
                          const Loss& loss, double lambda) {
  Vec g = lambda * (w - theta);
  for (int i = 0; i < data.n(); ++i) {
    const double s = loss.subgradient(data.inputs.row(i).dot(w), data.outputs[i]);
    if (s != 0.0) g += (s / data.n()) * data.inputs.row(i).transpose();
  }
  return g;
}

}  // namespace

double regularized_objective(const Vec& w, const Dataset& data, const Vec& theta,
                             const Loss& loss, double lambda) {
  if (!(lambda > 0))
    throw std::invalid_argument("regularized_objective: lambda must be > 0");
  const Vec diff = w - theta;
  return loss_eval(loss, w, data) + 0.5 * lambda * diff.squaredNorm();
}

InnerResult solve_batch(const Dataset& data, const Vec& theta, const Loss& loss,
                        const InnerConfig& cfg) {
  check_inputs(data, theta, cfg.lambda);
  if (cfg.batch_max_iters < 1)
    throw std::invalid_argument("solve_batch: batch_max_iters must be >= 1");
  if (!(cfg.batch_tol > 0))
    throw std::invalid_argument("solve_batch: batch_tol must be > 0");
  const double lambda = cfg.lambda;
  const int n = data.n();

  InnerResult res;
  if (loss.kind == LossKind::Squared) {
    // lambda I keeps the system positive definite, so LLT never fails.
    Mat a = data.inputs.transpose() * data.inputs / n;
    a.diagonal().array() += lambda;
    const Vec rhs = data.inputs.transpose() * data.outputs / n + lambda * theta;
    res.w_out = a.llt().solve(rhs);
  } else {
    // Deterministic subgradient descent under lambda-strong convexity.
    Vec w = theta;
    Vec weighted_sum = Vec::Zero(theta.size());
    double weight_total = 0.0;
    double window_obj = regularized_objective(theta, data, theta, loss, lambda);
    for (int t = 1; t <= cfg.batch_max_iters; ++t) {
      const Vec g = objective_subgradient(w, data, theta, loss, lambda);
      w -= (2.0 / (lambda * (t + 1))) * g;
      weighted_sum += (t + 1) * w;
      weight_total += t + 1;
      if (t % 10 == 0) {
        const Vec avg = weighted_sum / weight_total;
        const double obj = regularized_objective(avg, data, theta, loss, lambda);
        if (window_obj - obj < cfg.batch_tol && window_obj >= obj) break;
        window_obj = std::min(window_obj, obj);
      }
    }
    res.w_out = weighted_sum / weight_total;
  }
  res.w_last = res.w_out;
  res.objective = regularized_objective(res.w_out, data, theta, loss, lambda);
  return res;
}

InnerResult solve_online(const Dataset& data, const Vec& theta, const Loss& loss,
                         double lambda) {
  check_inputs(data, theta, lambda);
  const int n = data.n();

  Vec w = theta;
  Vec sum = Vec::Zero(theta.size());
  for (int i = 1; i <= n; ++i) {
    sum += w;
    const double s =
        loss.subgradient(data.inputs.row(i - 1).dot(w), data.outputs[i - 1]);
    const Vec step =
        s * data.inputs.row(i - 1).transpose() + lambda * (w - theta);
    w -= step / (lambda * i);
  }

  InnerResult res;
  res.w_out = sum / n;
  res.w_last = w;
  res.objective = regularized_objective(res.w_out, data, theta, loss, lambda);
  return res;
}

}  // namespace condmeta
