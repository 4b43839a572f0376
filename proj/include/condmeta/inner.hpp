#ifndef CONDMETA_INNER_HPP
#define CONDMETA_INNER_HPP

#include "condmeta/core.hpp"

namespace condmeta {

enum class InnerMode { Batch, Online };

struct InnerConfig {
  double lambda = 1.0;
  InnerMode mode = InnerMode::Batch;
  int batch_max_iters = 2000;
  // Stopping tolerance on the objective decrease of the averaged iterate
  // over a 10-iteration window (nonsmooth losses only).
  double batch_tol = 1e-9;
};

struct InnerResult {
  Vec w_out;   // the algorithm's official output A(theta, Z)
  Vec w_last;  // last online iterate w_{n+1}; equals w_out in batch mode
  double objective = 0.0;  // regularized objective at w_out (batch mode)
};

/// R_Z(w) + (lambda/2) ||w - theta||^2.
double regularized_objective(const Vec& w, const Dataset& data, const Vec& theta,
                             const Loss& loss, double lambda);

/// Biased regularized empirical risk minimization.  Squared loss uses the
/// exact closed form (X^T X / n + lambda I)^{-1} (X^T y / n + lambda theta);
/// the absolute loss runs a deterministic subgradient method with step
/// 2/(lambda (t+1)) and (t+1)-weighted iterate averaging.
InnerResult solve_batch(const Dataset& data, const Vec& theta, const Loss& loss,
                        const InnerConfig& cfg);

/// Online gradient descent on the regularized objective, started at theta,
/// one pass over the data in the given order:
///   w_1 = theta,  w_{i+1} = w_i - (s_i x_i + lambda (w_i - theta)) / (lambda i).
/// w_out averages w_1..w_n; w_last is the post-update iterate w_{n+1}.
InnerResult solve_online(const Dataset& data, const Vec& theta, const Loss& loss,
                         double lambda);

}  // namespace condmeta

#endif
