#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "condmeta/inner.hpp"

using namespace condmeta;

namespace {

Dataset random_dataset(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat x(n, d);
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = g(rng);
    y[i] = g(rng);
  }
  return Dataset(std::move(x), std::move(y));
}

// Reference ridge-with-bias solution via a dense solve independent of the
// implementation's Cholesky path.
Vec ridge_reference(const Dataset& data, const Vec& theta, double lambda) {
  const int n = data.n();
  Mat a = data.inputs.transpose() * data.inputs / n;
  a.diagonal().array() += lambda;
  const Vec rhs = data.inputs.transpose() * data.outputs / n + lambda * theta;
  return a.colPivHouseholderQr().solve(rhs);
}

}  // namespace

TEST_CASE("batch squared-loss solver matches the ridge closed form") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> nd(1, 10), nn(1, 50);
  std::uniform_real_distribution<double> le(-3.0, 3.0);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = nd(rng);
    const Dataset data = random_dataset(rng, nn(rng), d);
    Vec theta(d);
    for (int j = 0; j < d; ++j) theta[j] = g(rng);
    InnerConfig cfg;
    cfg.lambda = std::pow(10.0, le(rng));
    const Vec w = solve_batch(data, theta, Loss::squared(100.0), cfg).w_out;
    worst = std::max(worst,
                     (w - ridge_reference(data, theta, cfg.lambda)).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("batch solver returns theta when theta already interpolates") {
  std::mt19937_64 rng(5);
  const Dataset base = random_dataset(rng, 20, 4);
  Vec theta(4);
  theta << 1, -2, 0.5, 3;
  const Dataset data(base.inputs, base.inputs * theta);
  InnerConfig cfg;
  cfg.lambda = 0.37;
  const Vec w = solve_batch(data, theta, Loss::squared(100.0), cfg).w_out;
  CHECK((w - theta).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("batch absolute-loss solver at an already optimal start") {
  Mat x(1, 1);
  x << 1;
  Vec y(1);
  y << 0;
  InnerConfig cfg;
  cfg.lambda = 1.0;
  const Vec w = solve_batch(Dataset(x, y), Vec::Zero(1), Loss::absolute(), cfg).w_out;
  CHECK(std::abs(w[0]) <= 1e-6);
}

TEST_CASE("batch absolute-loss solver reaches the one-dimensional optimum") {
  // min |w - 10| + w^2/2 has its optimum at w = 1.
  Mat x(1, 1);
  x << 1;
  Vec y(1);
  y << 10;
  Dataset data(x, y);
  InnerConfig cfg;
  cfg.lambda = 1.0;
  cfg.batch_max_iters = 200000;
  cfg.batch_tol = 1e-12;
  const InnerResult res = solve_batch(data, Vec::Zero(1), Loss::absolute(), cfg);
  const double opt = regularized_objective(Vec::Ones(1), data, Vec::Zero(1),
                                           Loss::absolute(), 1.0);
  CHECK(res.objective <= opt + 1e-6);
  CHECK(std::abs(res.w_out[0] - 1.0) <= 2e-2);
}

TEST_CASE("batch absolute-loss objective beats a dense grid oracle") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset data = random_dataset(rng, 8, 1);
    Vec theta(1);
    theta << 0.3;
    const double lambda = 0.8;
    InnerConfig cfg;
    cfg.lambda = lambda;
    cfg.batch_max_iters = 100000;
    cfg.batch_tol = 1e-12;
    const InnerResult res = solve_batch(data, theta, Loss::absolute(), cfg);
    double grid_best = 1e300;
    for (int i = -4000; i <= 4000; ++i) {
      Vec w(1);
      w << i * 1e-3;
      grid_best = std::min(grid_best,
                           regularized_objective(w, data, theta, Loss::absolute(), lambda));
    }
    CHECK(res.objective <= grid_best + 1e-5);
  }
}

TEST_CASE("large regularization pulls the batch solution onto the bias") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const Loss& loss : {Loss::absolute(), Loss::squared(100.0)}) {
    const Dataset data = random_dataset(rng, 30, 5);
    Vec theta(5);
    for (int j = 0; j < 5; ++j) theta[j] = g(rng);
    InnerConfig cfg;
    cfg.lambda = 1e8;
    const Vec w = solve_batch(data, theta, loss, cfg).w_out;
    CHECK((w - theta).norm() <= 1e-4 * (1.0 + theta.norm()));
  }
}

TEST_CASE("online solver with one datapoint outputs the starting bias") {
  std::mt19937_64 rng(23);
  const Dataset data = random_dataset(rng, 1, 3);
  Vec theta(3);
  theta << 1, 2, 3;
  const InnerResult res = solve_online(data, theta, Loss::absolute(), 2.0);
  CHECK((res.w_out - theta).norm() == 0.0);
}

TEST_CASE("online solver is stationary when theta interpolates under squared loss") {
  std::mt19937_64 rng(29);
  const Dataset base = random_dataset(rng, 15, 3);
  Vec theta(3);
  theta << -1, 0.5, 2;
  const Dataset data(base.inputs, base.inputs * theta);
  const InnerResult res = solve_online(data, theta, Loss::squared(100.0), 0.7);
  CHECK((res.w_out - theta).norm() == 0.0);
  CHECK((res.w_last - theta).norm() == 0.0);
}

TEST_CASE("online solver single absolute-loss step by hand") {
  Mat x(1, 1);
  x << 1;
  Vec y(1);
  y << 10;
  const InnerResult res = solve_online(Dataset(x, y), Vec::Zero(1),
                                       Loss::absolute(), 1.0);
  CHECK(res.w_out[0] == doctest::Approx(0.0));
  CHECK(res.w_last[0] == doctest::Approx(1.0));
}

TEST_CASE("online output equals the independently recomputed iterate average") {
  std::mt19937_64 rng(31);
  const Dataset data = random_dataset(rng, 25, 4);
  Vec theta(4);
  theta << 0.2, -0.4, 1.0, 0.0;
  const double lambda = 0.9;
  const Loss loss = Loss::absolute();
  const InnerResult res = solve_online(data, theta, loss, lambda);

  Vec w = theta;
  Vec sum = Vec::Zero(4);
  for (int i = 1; i <= data.n(); ++i) {
    sum += w;
    const double s = loss.subgradient(data.inputs.row(i - 1).dot(w),
                                      data.outputs[i - 1]);
    w -= (s * data.inputs.row(i - 1).transpose() + lambda * (w - theta)) /
         (lambda * i);
  }
  CHECK((res.w_out - sum / data.n()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((res.w_last - w).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("online last iterate admits the prefix-sum closed form") {
  // Unrolling the recursion gives w_{n+1} = theta - (1/(lambda n)) sum s_i x_i.
  std::mt19937_64 rng(37);
  const Dataset data = random_dataset(rng, 12, 3);
  Vec theta(3);
  theta << 1, 1, -1;
  const double lambda = 1.7;
  const Loss loss = Loss::absolute();
  const InnerResult res = solve_online(data, theta, loss, lambda);

  Vec w = theta;
  Vec grad_sum = Vec::Zero(3);
  for (int i = 1; i <= data.n(); ++i) {
    const double s = loss.subgradient(data.inputs.row(i - 1).dot(w),
                                      data.outputs[i - 1]);
    grad_sum += s * data.inputs.row(i - 1).transpose();
    w = theta - grad_sum / (lambda * i);
  }
  CHECK((res.w_last - w).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("inner solvers validate their inputs") {
  std::mt19937_64 rng(41);
  const Dataset data = random_dataset(rng, 5, 2);
  InnerConfig cfg;
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(solve_batch(data, Vec::Zero(2), Loss::absolute(), cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_online(data, Vec::Zero(2), Loss::absolute(), -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_online(data, Vec::Zero(3), Loss::absolute(), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_online(Dataset{}, Vec::Zero(0), Loss::absolute(), 1.0),
                  std::invalid_argument);
  Mat bad = data.inputs;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_online(Dataset(bad, data.outputs), Vec::Zero(2),
                               Loss::absolute(), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      regularized_objective(Vec::Zero(2), data, Vec::Zero(2), Loss::absolute(), 0.0),
      std::invalid_argument);
}

TEST_CASE("regularized objective reduces to the empirical risk at the bias") {
  std::mt19937_64 rng(43);
  const Dataset data = random_dataset(rng, 10, 3);
  Vec theta(3);
  theta << 0.1, 0.2, 0.3;
  CHECK(regularized_objective(theta, data, theta, Loss::absolute(), 5.0) ==
        doctest::Approx(loss_eval(Loss::absolute(), theta, data)));
}
