#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "condmeta/environments.hpp"
#include "condmeta/meta.hpp"

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

ConditioningParams random_params(std::mt19937_64& rng, int d, int k) {
  std::normal_distribution<double> g(0.0, 1.0);
  ConditioningParams p = ConditioningParams::zeros(d, k);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < k; ++j) p.M(i, j) = g(rng);
    p.b[i] = g(rng);
  }
  return p;
}

Vec random_phi(std::mt19937_64& rng, int k) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec phi(k);
  for (int i = 0; i < k; ++i) phi[i] = g(rng);
  return phi;
}

std::vector<TaskInstance> cluster_stream(int T, std::uint64_t seed) {
  ClusterEnvSpec spec;
  spec.m = 2;
  spec.d = 3;
  spec.w_centers = Mat(2, 3);
  spec.w_centers << 4, 4, 4, -4, -4, -4;
  spec.x_centers = Mat(2, 3);
  spec.x_centers << 1, 1, 1, -1, -1, -1;
  spec.n_tot = 8;
  spec.T_tot = T;
  spec.seed = seed;
  return gen_clusters(spec);
}

}  // namespace

TEST_CASE("meta gradient matches central finite differences of the surrogate") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nd(1, 5), nk(1, 4), nn(2, 12);
  const Loss loss = Loss::squared(100.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = nd(rng), k = nk(rng);
    const Dataset data = random_dataset(rng, nn(rng), d);
    ConditioningParams p = random_params(rng, d, k);
    const Vec phi = random_phi(rng, k);
    const double lambda = 0.5;

    const auto [g_m, g_b] =
        meta_gradient(p, phi, data, loss, lambda, InnerMode::Batch);

    const auto fd_check = [&](double analytic, double* coeff) {
      const double orig = *coeff;
      *coeff = orig + h;
      const double up = surrogate_loss(p, phi, data, loss, lambda, InnerMode::Batch);
      *coeff = orig - h;
      const double dn = surrogate_loss(p, phi, data, loss, lambda, InnerMode::Batch);
      *coeff = orig;
      const double fd = (up - dn) / (2.0 * h);
      CHECK(std::abs(analytic - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    };
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < k; ++j) fd_check(g_m(i, j), &p.M(i, j));
      fd_check(g_b[i], &p.b[i]);
    }
  }
}

TEST_CASE("meta gradient has the stated rank-one structure") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data = random_dataset(rng, 10, 4);
    const ConditioningParams p = random_params(rng, 4, 3);
    const Vec phi = random_phi(rng, 3);
    for (InnerMode mode : {InnerMode::Batch, InnerMode::Online}) {
      const auto [g_m, g_b] =
          meta_gradient(p, phi, data, Loss::absolute(), 0.8, mode);
      CHECK((g_m - g_b * phi.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
}

TEST_CASE("interpolating bias gives zero surrogate gradient under squared loss") {
  std::mt19937_64 rng(66);
  const Dataset base = random_dataset(rng, 10, 3);
  ConditioningParams p = ConditioningParams::zeros(3, 2);
  p.b << 1, -1, 2;
  Vec phi = Vec::Zero(2);
  const Dataset data(base.inputs, base.inputs * p.b);
  const auto [g_m, g_b] =
      meta_gradient(p, phi, data, Loss::squared(100.0), 0.5, InnerMode::Batch);
  CHECK(g_b.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(g_m.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("surrogate equals the regularized objective at the inner output") {
  std::mt19937_64 rng(77);
  const Dataset data = random_dataset(rng, 14, 4);
  const ConditioningParams p = random_params(rng, 4, 2);
  const Vec phi = random_phi(rng, 2);
  const Loss loss = Loss::squared(100.0);
  const double lambda = 1.3;
  const Vec theta = apply_tau(p, phi);
  InnerConfig cfg;
  cfg.lambda = lambda;
  const Vec w = solve_batch(data, theta, loss, cfg).w_out;
  CHECK(surrogate_loss(p, phi, data, loss, lambda, InnerMode::Batch) ==
        doctest::Approx(regularized_objective(w, data, theta, loss, lambda))
            .epsilon(1e-12));
}

TEST_CASE("huge regularization collapses the surrogate onto the risk at theta") {
  std::mt19937_64 rng(88);
  const Dataset data = random_dataset(rng, 10, 3);
  const ConditioningParams p = random_params(rng, 3, 2);
  const Vec phi = random_phi(rng, 2);
  const Vec theta = apply_tau(p, phi);
  const double val =
      surrogate_loss(p, phi, data, Loss::absolute(), 1e8, InnerMode::Batch);
  CHECK(std::abs(val - loss_eval(Loss::absolute(), theta, data)) <= 1e-3);
}

TEST_CASE("surrogate is convex along segments in the meta parameters") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Dataset data = random_dataset(rng, 12, 3);
  const Vec phi = random_phi(rng, 2);
  const Loss loss = Loss::squared(100.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ConditioningParams p1 = random_params(rng, 3, 2);
    const ConditioningParams p2 = random_params(rng, 3, 2);
    const double t = u(rng);
    const ConditioningParams mid{t * p1.M + (1 - t) * p2.M,
                                 t * p1.b + (1 - t) * p2.b};
    const double lhs = surrogate_loss(mid, phi, data, loss, 0.7, InnerMode::Batch);
    const double rhs =
        t * surrogate_loss(p1, phi, data, loss, 0.7, InnerMode::Batch) +
        (1 - t) * surrogate_loss(p2, phi, data, loss, 0.7, InnerMode::Batch);
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("one meta iteration returns the zero initialization as average") {
  const auto tasks = cluster_stream(5, 1);
  MetaConfig cfg;
  cfg.gamma = 0.1;
  cfg.lambda = 1.0;
  cfg.T = 1;
  cfg.feature_map = FeatureMap::mean_inputs(3);
  const MetaTrainResult res = train_meta(tasks, cfg);
  CHECK(res.avg_params.frobenius_sq() == 0.0);
  CHECK(res.last_params.frobenius_sq() > 0.0);
}

TEST_CASE("zero meta step size freezes the iterates") {
  const auto tasks = cluster_stream(30, 2);
  MetaConfig cfg;
  cfg.gamma = 0.0;
  cfg.lambda = 1.0;
  cfg.T = 30;
  cfg.feature_map = FeatureMap::mean_inputs(3);
  const MetaTrainResult res = train_meta(tasks, cfg);
  CHECK(res.avg_params.frobenius_sq() == 0.0);
  CHECK(res.last_params.frobenius_sq() == 0.0);
}

TEST_CASE("averaged parameters match a reference re-run of the update loop") {
  const auto tasks = cluster_stream(40, 3);
  MetaConfig cfg;
  cfg.gamma = 0.05;
  cfg.lambda = 0.5;
  cfg.inner_mode = InnerMode::Online;
  cfg.T = 40;
  cfg.feature_map = FeatureMap::mean_inputs(3);
  const MetaTrainResult res = train_meta(tasks, cfg);

  ConditioningParams iter = ConditioningParams::zeros(3, 3);
  Mat m_sum = Mat::Zero(3, 3);
  Vec b_sum = Vec::Zero(3);
  for (int t = 0; t < 40; ++t) {
    const Vec phi = cfg.feature_map.apply(tasks[t].side);
    m_sum += iter.M;
    b_sum += iter.b;
    const auto [g_m, g_b] = meta_gradient(iter, phi, tasks[t].train, cfg.loss,
                                          cfg.lambda, cfg.inner_mode);
    iter.M -= cfg.gamma * g_m;
    iter.b -= cfg.gamma * g_b;
  }
  CHECK((res.avg_params.M - m_sum / 40).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((res.avg_params.b - b_sum / 40).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((res.last_params.M - iter.M).cwiseAbs().maxCoeff() == 0.0);
  CHECK((res.last_params.b - iter.b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero feature map reduces training to a bias-only recursion") {
  const auto tasks = cluster_stream(50, 4);
  MetaConfig cfg;
  cfg.gamma = 0.08;
  cfg.lambda = 0.7;
  cfg.inner_mode = InnerMode::Online;
  cfg.T = 50;
  cfg.feature_map = FeatureMap::zero();
  const MetaTrainResult res = train_meta(tasks, cfg);
  CHECK(res.avg_params.k() == 0);

  // bias-only reference that never touches a slope matrix
  Vec b = Vec::Zero(3);
  Vec b_sum = Vec::Zero(3);
  for (int t = 0; t < 50; ++t) {
    b_sum += b;
    const Vec w = solve_online(tasks[t].train, b, cfg.loss, cfg.lambda).w_last;
    b -= cfg.gamma * (-cfg.lambda * (w - b));
  }
  CHECK((res.avg_params.b - b_sum / 50).cwiseAbs().maxCoeff() == 0.0);
  CHECK((res.last_params.b - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training reduces the surrogate loss on a planted environment") {
  const FeatureMap fm = FeatureMap::circle();
  ConditioningParams star{Mat(2, 2), Vec(2)};
  star.M << 5, 0, 0, 5;
  star.b << 1, -1;
  PlantedEnvSpec spec;
  spec.d = 2;
  spec.n_tot = 10;
  spec.T_tot = 600;
  spec.seed = 12;
  const auto tasks = gen_planted_linear(star, fm, 0.0, spec);

  MetaConfig cfg;
  cfg.gamma = 0.05;
  cfg.lambda = 1.0;
  cfg.T = 500;
  cfg.feature_map = fm;
  cfg.loss = Loss::squared(100.0);
  const MetaTrainResult res = train_meta(tasks, cfg);

  double trained = 0.0, zero = 0.0;
  const ConditioningParams origin = ConditioningParams::zeros(2, 2);
  for (int t = 500; t < 600; ++t) {
    const Vec phi = fm.apply(tasks[t].side);
    trained += surrogate_loss(res.avg_params, phi, tasks[t].train, cfg.loss,
                              cfg.lambda, InnerMode::Batch);
    zero += surrogate_loss(origin, phi, tasks[t].train, cfg.loss, cfg.lambda,
                           InnerMode::Batch);
  }
  CHECK(trained < zero);
}

TEST_CASE("logged gradient norms respect the Lipschitz feature bound") {
  const auto tasks = cluster_stream(60, 6);
  MetaConfig cfg;
  cfg.gamma = 0.02;
  cfg.lambda = 1.0;
  cfg.inner_mode = InnerMode::Online;
  cfg.T = 60;
  cfg.feature_map = FeatureMap::mean_inputs(3);
  cfg.log_iterations = true;
  const MetaTrainResult res = train_meta(tasks, cfg);
  REQUIRE(res.trajectory.size() == 60);
  for (const auto& log : res.trajectory) {
    const double bound =
        1.0 * log.input_radius * std::sqrt(log.phi_norm * log.phi_norm + 1.0);
    CHECK(log.grad_norm <= bound + 1e-9);
  }
}

TEST_CASE("theoretical schedules evaluate the closed-form expressions") {
  {
    const auto [lambda, gamma] = theoretical_hyperparams(
        2.0 * 3.0 * 1.5, 1.0, 1.5, 3.0, 1.0, 1, 4);
    CHECK(lambda == doctest::Approx(1.0));
  }
  {
    const double L = 2.0, R = 1.5, K = 3.0;
    const auto [lambda, gamma] = theoretical_hyperparams(
        1.0, L * R * std::sqrt(K * K + 1.0), L, R, K, 4, 1);
    CHECK(gamma == doctest::Approx(1.0));
  }
  {
    const auto [l1, g1] = theoretical_hyperparams(1.0, 1.0, 1.0, 1.0, 1.0, 5, 7);
    const auto [l2, g2] = theoretical_hyperparams(1.0, 1.0, 1.0, 1.0, 1.0, 20, 7);
    CHECK(l2 == doctest::Approx(l1 / 2.0));
  }
  CHECK_THROWS_AS(theoretical_hyperparams(-1, 1, 1, 1, 1, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("training validates its inputs") {
  const auto tasks = cluster_stream(5, 8);
  MetaConfig cfg;
  cfg.gamma = 0.1;
  cfg.lambda = 1.0;
  cfg.T = 10;  // longer than the stream
  cfg.feature_map = FeatureMap::mean_inputs(3);
  CHECK_THROWS_AS(train_meta(tasks, cfg), std::invalid_argument);
  cfg.T = 5;
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(train_meta(tasks, cfg), std::invalid_argument);
  cfg.lambda = 1.0;
  cfg.gamma = -0.1;
  CHECK_THROWS_AS(train_meta(tasks, cfg), std::invalid_argument);
}
