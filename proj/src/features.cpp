#include "condmeta/features.hpp"

#include <cmath>
#include <random>

namespace condmeta {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

const Mat& collection_points(const SideInfo& side, const char* op) {
  if (side.kind == SideInfo::Kind::Scalar)
    throw std::invalid_argument(std::string(op) + ": collection side info required");
  if (side.points.rows() == 0)
    throw std::invalid_argument(std::string(op) + ": empty side info");
  return side.points;
}
}  // namespace

Vec phi_mean_inputs(const SideInfo& side) {
  const Mat& x = collection_points(side, "phi_mean_inputs");
  return x.colwise().mean().transpose();
}

Vec phi_xy_outer(const SideInfo& side) {
  if (side.kind != SideInfo::Kind::Datapoints)
    throw std::invalid_argument("phi_xy_outer: datapoint side info required");
  const Mat& x = collection_points(side, "phi_xy_outer");
  const int d = static_cast<int>(x.cols());
  const int n = static_cast<int>(x.rows());
  Vec phi = Vec::Zero(2 * d);
  for (int i = 0; i < n; ++i) {
    phi.head(d) += side.outputs[i] * x.row(i).transpose();
    phi.tail(d) += x.row(i).transpose();
  }
  return phi / n;
}

Vec phi_circle(double s) {
  if (s < 0.0 || s > 1.0)
    throw std::invalid_argument("phi_circle: s must lie in [0,1]");
  Vec phi(2);
  phi << std::cos(kTwoPi * s), std::sin(kTwoPi * s);
  return phi;
}

FeatureMap FeatureMap::zero() { return FeatureMap{}; }

FeatureMap FeatureMap::mean_inputs(int d) {
  if (d < 1) throw std::invalid_argument("FeatureMap::mean_inputs: d >= 1 required");
  FeatureMap f;
  f.kind = FeatureKind::MeanInputs;
  f.k = d;
  return f;
}

FeatureMap FeatureMap::xy_outer(int d) {
  if (d < 1) throw std::invalid_argument("FeatureMap::xy_outer: d >= 1 required");
  FeatureMap f;
  f.kind = FeatureKind::XyOuter;
  f.k = 2 * d;
  return f;
}

FeatureMap FeatureMap::circle() {
  FeatureMap f;
  f.kind = FeatureKind::Circle;
  f.k = 2;
  f.bound_K = 1.0;
  return f;
}

FeatureMap rff_new(int k, double sigma, int d, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("rff_new: k >= 1 required");
  if (!(sigma > 0)) throw std::invalid_argument("rff_new: sigma > 0 required");
  if (d < 1) throw std::invalid_argument("rff_new: d >= 1 required");
  FeatureMap f;
  f.kind = FeatureKind::Rff;
  f.k = k;
  f.bound_K = std::sqrt(2.0);
  f.rff_sigma = sigma;
  f.rff_seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  f.rff_u = Mat(k, d);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) f.rff_u(i, j) = gauss(rng);
  f.rff_v = Vec(k);
  for (int i = 0; i < k; ++i) f.rff_v[i] = uniform(rng);
  return f;
}

namespace {
Vec rff_point(const FeatureMap& f, const Vec& x) {
  if (x.size() != f.rff_u.cols())
    throw std::invalid_argument("FeatureMap: rff input dimension mismatch");
  return std::sqrt(2.0 / f.k) * (f.rff_u * x + f.rff_v).array().cos().matrix();
}
}  // namespace

Vec FeatureMap::apply(const SideInfo& side) const {
  switch (kind) {
    case FeatureKind::Zero:
      return Vec(0);
    case FeatureKind::MeanInputs:
      return phi_mean_inputs(side);
    case FeatureKind::XyOuter:
      return phi_xy_outer(side);
    case FeatureKind::Circle:
      if (side.kind != SideInfo::Kind::Scalar)
        throw std::invalid_argument("FeatureMap: circle map needs scalar side info");
      return phi_circle(side.scalar);
    case FeatureKind::Rff: {
      if (side.kind == SideInfo::Kind::Scalar) {
        Vec x(1);
        x << side.scalar;
        return rff_point(*this, x);
      }
      const Mat& pts = collection_points(side, "FeatureMap::apply");
      Vec phi = Vec::Zero(k);
      for (int i = 0; i < pts.rows(); ++i)
        phi += rff_point(*this, pts.row(i).transpose());
      return phi / pts.rows();
    }
  }
  throw std::logic_error("FeatureMap: unknown kind");
}

double FeatureMap::estimate_bound(const std::vector<TaskInstance>& tasks) const {
  double bound = 0.0;
  for (const auto& task : tasks) bound = std::max(bound, apply(task.side).norm());
  return bound;
}

}  // namespace condmeta
